#include "authorbench/runner.hpp"

#include "authorbench/error.hpp"
#include "authorbench/fixtures.hpp"
#include "authorbench/text.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace authorbench {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string_view to_string(SystemKind kind) {
    switch (kind) {
    case SystemKind::llm: return "llm";
    case SystemKind::tfidf: return "tfidf";
    case SystemKind::embedding: return "embedding";
    }
    return "llm";
}

std::string SystemSpec::display_label() const {
    if (!label.empty()) return label;
    switch (kind) {
    case SystemKind::llm: return model.empty() ? "llm" : model;
    case SystemKind::tfidf: return "TF-IDF";
    case SystemKind::embedding: return model.empty() ? "embedding" : model;
    }
    return model;
}

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
    if (systems.empty()) throw ConfigError("config: at least one system is required");
    bool any_llm = std::any_of(systems.begin(), systems.end(), [](const auto& s) { return s.kind == SystemKind::llm; });
    if (any_llm && strategies.empty()) throw ConfigError("config: LLM systems need at least one strategy");
    if (plan.task != task) throw ConfigError("config: plan task does not match experiment task");
    plan.validate();
    if (task == Task::attribution) {
        for (auto c : candidate_counts)
            if (c < 2) throw ConfigError("config: candidate counts must be at least 2");
    }
    if (parallelism == 0) throw ConfigError("config: parallelism must be at least 1");
    std::vector<std::string> labels;
    for (const auto& s : systems) {
        auto l = s.display_label();
        if (std::find(labels.begin(), labels.end(), l) != labels.end())
            throw ConfigError("config: duplicate system label " + l);
        labels.push_back(l);
    }
    if (!corpus && !sample_path && dataset.path.empty())
        throw ConfigError("config: either dataset.path or sample is required");
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base.empty()) return base / path;
    return path;
}

SystemSpec system_from_json(const json& j, const std::filesystem::path& base) {
    SystemSpec s;
    std::string type = j.value("type", std::string("llm"));
    if (type == "llm") s.kind = SystemKind::llm;
    else if (type == "tfidf") s.kind = SystemKind::tfidf;
    else if (type == "embedding") s.kind = SystemKind::embedding;
    else throw ConfigError("config: unknown system type " + type);
    s.label = j.value("label", std::string());
    s.model = j.value("model", std::string());
    s.provider = j.value("provider", std::string("mock"));
    s.mock = j.value("mock", std::string());
    if (j.contains("mock_script")) s.mock_script = resolve(base, j.at("mock_script").get<std::string>());
    s.embedding_mode = j.value("mode", s.embedding_mode);
    s.threshold = j.value("threshold", s.threshold);
    if (s.kind == SystemKind::llm && s.model.empty()) throw ConfigError("config: llm system needs a model");
    return s;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j, const std::filesystem::path& base) {
    ExperimentConfig c;
    try {
        c.task = task_from_string(j.at("task").get<std::string>());
        if (j.contains("dataset")) {
            const auto& d = j.at("dataset");
            if (d.contains("path")) c.dataset.path = resolve(base, d.at("path").get<std::string>());
            c.dataset.format = corpus_format_from_string(d.value("format", std::string("jsonl")));
            c.dataset.name = d.value("name", std::string());
            c.dataset.min_texts_per_author = d.value("min_texts_per_author", c.dataset.min_texts_per_author);
            if (d.contains("language")) c.dataset.language = d.at("language").get<std::string>();
        }
        if (j.contains("sample")) c.sample_path = resolve(base, j.at("sample").get<std::string>());

        json plan = j.value("plan", json::object());
        if (plan.contains("task") && task_from_string(plan.at("task").get<std::string>()) != c.task)
            throw ConfigError("config: plan task does not match experiment task");
        plan["task"] = to_string(c.task);
        if (plan.contains("n_candidates") && plan.at("n_candidates").is_array()) {
            c.candidate_counts = plan.at("n_candidates").get<std::vector<std::size_t>>();
            if (c.candidate_counts.empty()) throw ConfigError("config: empty candidate count list");
            plan["n_candidates"] = c.candidate_counts.front();
        }
        c.plan = SamplePlan::from_json(plan);
        if (c.candidate_counts.empty()) c.candidate_counts = {c.plan.n_candidates};

        for (const auto& s : j.value("strategies", json::array()))
            c.strategies.push_back(PromptStrategy::parse(s.get<std::string>()));
        for (const auto& s : j.value("systems", json::array())) c.systems.push_back(system_from_json(s, base));

        if (j.contains("provider")) {
            const auto& p = j.at("provider");
            c.provider.endpoint = p.value("endpoint", c.provider.endpoint);
            c.provider.api_key_env = p.value("api_key_env", c.provider.api_key_env);
            c.provider.timeout = std::chrono::seconds(p.value("timeout_s", 120));
            c.provider.temperature = p.value("temperature", c.provider.temperature);
            c.provider.top_p = p.value("top_p", c.provider.top_p);
            if (p.contains("max_output_tokens") && !p.at("max_output_tokens").is_null())
                c.provider.max_output_tokens = p.at("max_output_tokens").get<int>();
            c.provider.json_reminder = p.value("json_reminder", c.provider.json_reminder);
            if (p.contains("retry")) {
                const auto& r = p.at("retry");
                c.provider.retry.max_attempts = r.value("max_attempts", c.provider.retry.max_attempts);
                c.provider.retry.base_delay =
                    std::chrono::milliseconds(r.value("base_delay_ms", static_cast<long long>(1000)));
                c.provider.retry.factor = r.value("factor", c.provider.retry.factor);
            }
        }
        c.parallelism = j.value("parallelism", c.parallelism);
        c.outdir = resolve(base, j.value("outdir", std::string("out")));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const SamplingError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const PromptError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const CorpusError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return from_json(j, path.parent_path());
}

// ---------------------------------------------------------------------------
// Records

namespace {

json answer_json(const std::optional<Answer>& a) {
    if (!a) return nullptr;
    if (const bool* b = std::get_if<bool>(&*a)) return *b;
    return std::get<std::string>(*a);
}

std::optional<Answer> answer_from(const json& j) {
    if (j.is_boolean()) return Answer(j.get<bool>());
    if (j.is_string()) return Answer(j.get<std::string>());
    return std::nullopt;
}

} // namespace

ojson RunRecord::to_json() const {
    ojson j;
    j["instance_id"] = instance_id;
    j["task"] = to_string(task);
    j["dataset"] = dataset;
    j["repetition"] = repetition;
    if (task == Task::attribution) j["n_candidates"] = n_candidates;
    j["strategy"] = strategy;
    j["system"] = system;
    j["prompt_digest"] = prompt_digest;
    j["raw_response"] = raw_response;
    j["analysis"] = analysis ? json(*analysis) : json(nullptr);
    j["parsed_answer"] = answer_json(parsed_answer);
    j["parse_status"] = to_string(parse_status);
    j["truth"] = answer_json(truth);
    j["correct"] = correct;
    return j;
}

RunRecord RunRecord::from_json(const json& j) {
    RunRecord r;
    try {
        r.instance_id = j.at("instance_id").get<std::string>();
        r.task = task_from_string(j.at("task").get<std::string>());
        r.dataset = j.value("dataset", std::string());
        r.repetition = j.at("repetition").get<std::size_t>();
        r.n_candidates = j.value("n_candidates", static_cast<std::size_t>(0));
        r.strategy = j.at("strategy").get<std::string>();
        r.system = j.at("system").get<std::string>();
        r.prompt_digest = j.value("prompt_digest", std::string());
        r.raw_response = j.value("raw_response", std::string());
        if (j.contains("analysis") && j.at("analysis").is_string()) r.analysis = j.at("analysis").get<std::string>();
        r.parsed_answer = answer_from(j.value("parsed_answer", json(nullptr)));
        r.parse_status = parse_status_from_string(j.at("parse_status").get<std::string>());
        auto truth = answer_from(j.at("truth"));
        if (!truth) throw ReportError("record " + r.instance_id + " has no truth");
        r.truth = *truth;
        r.correct = j.at("correct").get<bool>();
    } catch (const json::exception& e) {
        throw ReportError(std::string("bad record: ") + e.what());
    }
    return r;
}

ojson RunTiming::to_json() const {
    ojson j;
    j["instance_id"] = instance_id;
    j["strategy"] = strategy;
    j["system"] = system;
    j["latency_ms"] = latency_ms;
    j["attempts"] = attempts;
    j["from_cache"] = from_cache;
    if (!usage.is_null()) j["usage"] = usage;
    return j;
}

std::vector<RunRecord> load_records(const std::filesystem::path& path) {
    std::vector<RunRecord> out;
    std::string contents = read_file(path);
    std::size_t start = 0, line_no = 0;
    while (start < contents.size()) {
        std::size_t end = contents.find('\n', start);
        if (end == std::string::npos) end = contents.size();
        ++line_no;
        std::string_view line(contents.data() + start, end - start);
        if (!trim(line).empty()) {
            try {
                out.push_back(RunRecord::from_json(json::parse(line)));
            } catch (const json::parse_error& e) {
                throw ReportError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
        }
        start = end + 1;
    }
    return out;
}

void save_records(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
    std::string out;
    for (const auto& r : records) out += r.to_json().dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
    write_file(path, out);
}

std::vector<AggregateReport> reports_from_records(const std::vector<RunRecord>& records) {
    struct Group {
        ExperimentDescriptor descriptor;
        std::map<std::size_t, std::vector<const RunRecord*>> by_rep;
    };
    std::vector<Group> groups;
    std::map<std::string, std::size_t> index;
    for (const auto& r : records) {
        std::string key = std::string(to_string(r.task)) + '\x1f' + r.dataset + '\x1f' +
                          std::to_string(r.n_candidates) + '\x1f' + r.system + '\x1f' + r.strategy;
        auto [it, fresh] = index.emplace(key, groups.size());
        if (fresh) {
            Group g;
            g.descriptor.task = to_string(r.task);
            g.descriptor.model = r.system;
            g.descriptor.strategy = r.strategy;
            g.descriptor.dataset = r.dataset;
            if (r.task == Task::attribution) g.descriptor.n_candidates = r.n_candidates;
            groups.push_back(std::move(g));
        }
        groups[it->second].by_rep[r.repetition].push_back(&r);
    }

    std::vector<AggregateReport> out;
    for (auto& g : groups) {
        std::vector<AnyReport> reps;
        for (auto& [rep, recs] : g.by_rep) {
            std::sort(recs.begin(), recs.end(),
                      [](const RunRecord* a, const RunRecord* b) { return a->instance_id < b->instance_id; });
            if (g.descriptor.task == "verification") {
                std::vector<BinaryPrediction> preds;
                for (const auto* r : recs) {
                    BinaryPrediction p;
                    p.truth = std::get<bool>(r->truth);
                    if (r->parsed_answer && std::holds_alternative<bool>(*r->parsed_answer))
                        p.predicted = std::get<bool>(*r->parsed_answer);
                    preds.push_back(p);
                }
                reps.push_back(binary_metrics(preds));
            } else {
                std::vector<LabelPrediction> preds;
                for (const auto* r : recs) {
                    LabelPrediction p;
                    p.truth = std::get<std::string>(r->truth);
                    if (r->parsed_answer && std::holds_alternative<std::string>(*r->parsed_answer))
                        p.predicted = std::get<std::string>(*r->parsed_answer);
                    preds.push_back(p);
                }
                reps.push_back(multiclass_f1(preds));
            }
        }
        out.push_back(aggregate(reps, g.descriptor));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Execution

namespace {

struct Job {
    std::size_t system = 0;
    std::optional<PromptStrategy> strategy;
    std::size_t repetition = 0;
    std::size_t n_candidates = 0;
    const VerificationInstance* verification = nullptr;
    const AttributionInstance* attribution = nullptr;
};

struct JobOutput {
    RunRecord record;
    RunTiming timing;
};

struct Systems {
    std::vector<std::shared_ptr<Provider>> llm;
    std::vector<std::shared_ptr<EmbeddingProvider>> embedders;
};

Corpus obtain_corpus(const ExperimentConfig& config) {
    Corpus corpus;
    if (config.corpus) {
        corpus = *config.corpus;
    } else {
        std::string name = config.dataset.name;
        corpus = load_corpus(config.dataset.path, config.dataset.format, name);
    }
    if (!config.dataset.name.empty()) corpus.name = config.dataset.name;
    if (config.dataset.language) corpus = filter_language(corpus, *config.dataset.language);
    return dedup_and_filter(corpus, config.dataset.min_texts_per_author);
}

Answer parse_constant(std::string_view text, Task task) {
    if (task == Task::verification) {
        std::string t = to_lower_ascii(text);
        if (t == "true" || t == "same") return true;
        if (t == "false" || t == "different") return false;
        throw ConfigError("constant mock answer for verification must be true/false: " + std::string(text));
    }
    return std::string(text);
}

MockScript script_for(const SystemSpec& spec, Task task, const std::map<std::string, Answer>& truths,
                      const std::vector<std::string>& ids) {
    if (!spec.mock_script.empty()) return MockScript::load(spec.mock_script);
    if (spec.mock == "oracle") return oracle_mock(truths, ids);
    if (spec.mock == "malformed") return malformed_mock();
    if (spec.mock.starts_with("constant:")) return adversarial_mock(parse_constant(spec.mock.substr(9), task));
    throw ConfigError("system " + spec.display_label() + ": mock provider needs mock or mock_script");
}

Systems build_systems(const ExperimentConfig& config, const std::map<std::string, Answer>& truths,
                      const std::vector<std::string>& ids) {
    Systems out;
    const auto emb_dir = config.outdir / "responses" / "embeddings";
    for (const auto& spec : config.systems) {
        std::shared_ptr<Provider> llm;
        std::shared_ptr<EmbeddingProvider> emb;
        if (spec.kind == SystemKind::llm) {
            if (spec.llm_provider) llm = spec.llm_provider;
            else if (spec.provider == "mock") llm = std::make_shared<MockProvider>(script_for(spec, config.task, truths, ids));
            else if (spec.provider == "replay") llm = std::make_shared<ReplayProvider>();
            else if (spec.provider == "openai" || spec.provider == "http")
                llm = std::make_shared<OpenAiCompatibleProvider>(OpenAiCompatibleProvider::Settings{
                    config.provider.endpoint, config.provider.api_key_env, config.provider.timeout});
            else throw ConfigError("unknown llm provider " + spec.provider);
        } else if (spec.kind == SystemKind::embedding) {
            // Vectors are stored under the model name so a replay run finds them.
            const std::string key = spec.model.empty() ? "mock-" + spec.embedding_mode : spec.model;
            if (spec.embedding_provider) emb = spec.embedding_provider;
            else if (spec.provider == "mock")
                emb = std::make_shared<CachedEmbeddingProvider>(
                    std::make_shared<MockEmbeddingProvider>(MockEmbeddingProvider::mode_from_string(spec.embedding_mode)),
                    emb_dir, key);
            else if (spec.provider == "http")
                emb = std::make_shared<CachedEmbeddingProvider>(
                    std::make_shared<HttpEmbeddingProvider>(HttpEmbeddingProvider::Settings{
                        config.provider.endpoint, spec.model, config.provider.api_key_env, config.provider.timeout}),
                    emb_dir, key);
            else if (spec.provider == "replay")
                emb = std::make_shared<CachedEmbeddingProvider>(nullptr, emb_dir, key);
            else throw ConfigError("unknown embedding provider " + spec.provider);
        }
        out.llm.push_back(std::move(llm));
        out.embedders.push_back(std::move(emb));
    }
    return out;
}

std::string score_summary(const VerifyResult& r) {
    ojson j{{"similarity", r.similarity}, {"same_author", r.same_author}, {"no_signal", r.no_signal}};
    return j.dump();
}

std::string score_summary(const AttributionResult& r) {
    ojson scores = ojson::object();
    for (const auto& [id, s] : r.scores) scores[id] = s;
    ojson j{{"predicted", r.predicted}, {"scores", std::move(scores)}, {"no_signal", r.no_signal}};
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

JobOutput run_job(const Job& job, const ExperimentConfig& config, const std::string& dataset, Systems& systems,
                  ResponseCache& cache) {
    const SystemSpec& spec = config.systems[job.system];
    JobOutput out;
    RunRecord& rec = out.record;
    rec.task = config.task;
    rec.dataset = dataset;
    rec.repetition = job.repetition;
    rec.n_candidates = job.n_candidates;
    rec.strategy = job.strategy ? job.strategy->name() : "-";
    rec.system = spec.display_label();
    rec.instance_id = job.verification ? job.verification->instance_id : job.attribution->instance_id;
    rec.truth = job.verification ? Answer(job.verification->same_author) : Answer(job.attribution->true_author);
    out.timing.instance_id = rec.instance_id;
    out.timing.strategy = rec.strategy;
    out.timing.system = rec.system;

    const auto started = std::chrono::steady_clock::now();
    if (spec.kind == SystemKind::llm) {
        RenderedPrompt prompt = job.verification ? render_verification(*job.verification, *job.strategy)
                                                 : render_attribution(*job.attribution, *job.strategy);
        ChatRequest req;
        req.model_name = spec.model;
        req.system_text = std::move(prompt.system_text);
        req.user_text = std::move(prompt.user_text);
        req.temperature = config.provider.temperature;
        req.top_p = config.provider.top_p;
        req.max_output_tokens = config.provider.max_output_tokens;
        req.instance_id = rec.instance_id;

        AnswerParser parser;
        if (job.verification) {
            parser = parse_verification_answer;
        } else {
            auto ids = job.attribution->candidate_ids();
            parser = [ids](std::string_view raw) { return parse_attribution_answer(raw, ids); };
        }
        ModelResponse resp = config.provider.json_reminder
                                 ? complete_with_reminder(req, *systems.llm[job.system], cache, config.provider.retry, parser)
                                 : complete(req, *systems.llm[job.system], cache, config.provider.retry, parser);
        rec.prompt_digest = request_digest(req);
        rec.raw_response = resp.raw_text;
        rec.analysis = resp.parsed_analysis;
        rec.parsed_answer = resp.parsed_answer;
        rec.parse_status = resp.parse_status;
        out.timing.latency_ms = resp.latency.count();
        out.timing.attempts = resp.attempts;
        out.timing.from_cache = resp.from_cache;
        if (resp.provider_meta.contains("usage")) out.timing.usage = resp.provider_meta.at("usage");
    } else {
        EmbeddingProvider* emb = systems.embedders[job.system].get();
        if (job.verification) {
            const auto& a = job.verification->text_a.text;
            const auto& b = job.verification->text_b.text;
            VerifyResult r = spec.kind == SystemKind::tfidf ? tfidf_verify(a, b, spec.threshold)
                                                            : embedding_verify(a, b, *emb, spec.threshold);
            rec.raw_response = score_summary(r);
            rec.parsed_answer = r.same_author;
        } else {
            AttributionResult r = spec.kind == SystemKind::tfidf ? tfidf_attribute(*job.attribution)
                                                                 : embedding_attribute(*job.attribution, *emb);
            rec.raw_response = score_summary(r);
            rec.parsed_answer = r.predicted;
        }
        rec.parse_status = ParseStatus::ok;
        out.timing.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::steady_clock::now() - started)
                                    .count();
    }
    rec.correct = rec.parsed_answer.has_value() && *rec.parsed_answer == rec.truth;
    return out;
}

struct PreparedSamples {
    std::string dataset;
    std::vector<VerificationSample> verification;  // at most one
    std::vector<AttributionSample> attribution;    // one per candidate count
    std::vector<std::string> warnings;
};

PreparedSamples prepare_samples(const ExperimentConfig& config) {
    PreparedSamples out;
    const auto dir = config.outdir / "samples";
    if (config.sample_path) {
        std::string contents = read_file(*config.sample_path);
        if (sample_task(contents) != config.task) throw ConfigError("sample file task does not match config task");
        if (config.task == Task::verification) out.verification.push_back(parse_verification_sample(contents));
        else out.attribution.push_back(parse_attribution_sample(contents));
        out.dataset = config.task == Task::verification ? out.verification.front().plan.corpus_name
                                                        : out.attribution.front().plan.corpus_name;
        if (!config.dataset.name.empty()) out.dataset = config.dataset.name;
        write_file(dir / (std::string(to_string(config.task)) + ".json"), contents);
        return out;
    }
    Corpus corpus = obtain_corpus(config);
    out.dataset = corpus.name;
    SamplePlan plan = config.plan;
    plan.corpus_name = corpus.name;
    if (config.task == Task::verification) {
        out.verification.push_back(sample_verification(corpus, plan));
        auto& s = out.verification.back();
        auto check = validate_sample(s, corpus);
        if (!check.ok()) throw SamplingError("sample failed validation: " + check.violations.front());
        write_file(dir / "verification.json", serialize_sample(s));
        out.warnings.insert(out.warnings.end(), s.warnings.begin(), s.warnings.end());
    } else {
        std::vector<std::size_t> counts = config.candidate_counts;
        if (counts.empty()) counts.push_back(plan.n_candidates);
        for (auto count : counts) {
            SamplePlan p = plan;
            p.n_candidates = count;
            // Instance ids must stay unique across candidate counts.
            p.corpus_name = corpus.name + "-c" + std::to_string(count);
            out.attribution.push_back(sample_attribution(corpus, p));
            auto& s = out.attribution.back();
            auto check = validate_sample(s, corpus);
            if (!check.ok()) throw SamplingError("sample failed validation: " + check.violations.front());
            write_file(dir / ("attribution-c" + std::to_string(count) + ".json"), serialize_sample(s));
            out.warnings.insert(out.warnings.end(), s.warnings.begin(), s.warnings.end());
        }
    }
    return out;
}

template <typename Instance>
std::vector<const Instance*> sorted_instances(const std::vector<Instance>& rep) {
    std::vector<const Instance*> out;
    for (const auto& i : rep) out.push_back(&i);
    std::sort(out.begin(), out.end(), [](const Instance* a, const Instance* b) { return a->instance_id < b->instance_id; });
    return out;
}

void write_resume_marker(const std::filesystem::path& path, const ExperimentConfig& config, std::size_t done,
                         std::size_t total, const std::string& error, std::string_view kind) {
    ojson j;
    j["status"] = "incomplete";
    j["task"] = to_string(config.task);
    j["completed"] = done;
    j["total"] = total;
    j["error_kind"] = kind;
    j["error"] = error;
    j["resume"] = "rerun the same command; cached responses are not re-requested";
    write_file(path, j.dump(2, ' ', false, json::error_handler_t::replace) + "\n");
}

std::string_view kind_name(ProviderError::Kind k) {
    switch (k) {
    case ProviderError::Kind::transient: return "transient";
    case ProviderError::Kind::auth: return "auth";
    case ProviderError::Kind::refusal: return "refusal";
    case ProviderError::Kind::exhausted: return "exhausted";
    case ProviderError::Kind::cache_miss: return "cache_miss";
    case ProviderError::Kind::invalid: return "invalid";
    }
    return "invalid";
}

ExperimentResult run_impl(const ExperimentConfig& config, const std::string& stem, bool write_reports) {
    config.validate();
    PreparedSamples samples = prepare_samples(config);

    std::map<std::string, Answer> truths;
    std::vector<std::string> ids;
    for (const auto& s : samples.verification)
        for (const auto& rep : s.repetitions)
            for (const auto& i : rep) {
                truths.emplace(i.instance_id, i.same_author);
                ids.push_back(i.instance_id);
            }
    for (const auto& s : samples.attribution)
        for (const auto& rep : s.repetitions)
            for (const auto& i : rep) {
                truths.emplace(i.instance_id, i.true_author);
                ids.push_back(i.instance_id);
            }

    Systems systems = build_systems(config, truths, ids);
    ResponseCache cache(config.outdir / "responses");

    std::vector<Job> jobs;
    auto add_jobs = [&](std::size_t sys, const std::optional<PromptStrategy>& strategy) {
        for (const auto& s : samples.verification)
            for (std::size_t r = 0; r < s.repetitions.size(); ++r)
                for (const auto* inst : sorted_instances(s.repetitions[r]))
                    jobs.push_back({sys, strategy, r + 1, 0, inst, nullptr});
    };
    auto add_attr_jobs = [&](const AttributionSample& s, std::size_t sys, const std::optional<PromptStrategy>& strategy) {
        for (std::size_t r = 0; r < s.repetitions.size(); ++r)
            for (const auto* inst : sorted_instances(s.repetitions[r]))
                jobs.push_back({sys, strategy, r + 1, inst->candidates.size(), nullptr, inst});
    };
    if (config.task == Task::verification) {
        for (std::size_t sys = 0; sys < config.systems.size(); ++sys) {
            if (config.systems[sys].kind == SystemKind::llm) {
                for (const auto& st : config.strategies) add_jobs(sys, st);
            } else {
                add_jobs(sys, std::nullopt);
            }
        }
    } else {
        for (const auto& s : samples.attribution) {
            for (std::size_t sys = 0; sys < config.systems.size(); ++sys) {
                if (config.systems[sys].kind == SystemKind::llm) {
                    for (const auto& st : config.strategies) add_attr_jobs(s, sys, st);
                } else {
                    add_attr_jobs(s, sys, std::nullopt);
                }
            }
        }
    }

    std::vector<std::optional<JobOutput>> outputs(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto worker = [&] {
        for (;;) {
            if (stop.load()) return;
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                outputs[i] = run_job(jobs[i], config, samples.dataset, systems, cache);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                stop.store(true);
                return;
            }
        }
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(config.parallelism, jobs.size()));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ExperimentResult result;
    result.warnings = samples.warnings;
    for (auto& o : outputs) {
        if (!o) continue;
        result.records.push_back(std::move(o->record));
        result.timings.push_back(std::move(o->timing));
    }

    const auto records_dir = config.outdir / "records";
    const auto marker = records_dir / (stem + ".resume.json");
    save_records(result.records, records_dir / (stem + ".jsonl"));
    {
        std::string t;
        for (const auto& r : result.timings) t += r.to_json().dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
        write_file(records_dir / (stem + ".timing.jsonl"), t);
    }
    if (error) {
        std::string what = "unknown error";
        std::string_view kind = "error";
        try {
            std::rethrow_exception(error);
        } catch (const ProviderError& e) {
            what = e.what();
            kind = kind_name(e.kind());
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        write_resume_marker(marker, config, result.records.size(), jobs.size(), what, kind);
        std::rethrow_exception(error);
    }
    std::filesystem::remove(marker);

    result.reports = reports_from_records(result.records);
    if (write_reports) {
        const auto reports_dir = config.outdir / "reports";
        for (auto f : {ReportFormat::markdown, ReportFormat::csv, ReportFormat::json})
            emit_report(result.reports, f, reports_dir, stem);
    }
    return result;
}

} // namespace

ExperimentResult run_verification_experiment(const ExperimentConfig& config) {
    if (config.task != Task::verification) throw ConfigError("run_verification_experiment needs a verification config");
    return run_impl(config, "verification", true);
}

ExperimentResult run_attribution_experiment(const ExperimentConfig& config) {
    if (config.task != Task::attribution) throw ConfigError("run_attribution_experiment needs an attribution config");
    return run_impl(config, "attribution", true);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    return config.task == Task::verification ? run_verification_experiment(config)
                                             : run_attribution_experiment(config);
}

AblationResult run_ablation(const ExperimentConfig& config) {
    if (config.task != Task::attribution) throw ConfigError("ablation runs on the attribution task");
    if (!config.strategies.empty() &&
        std::find(config.strategies.begin(), config.strategies.end(), PromptStrategy::lip()) == config.strategies.end())
        throw ConfigError("ablation needs the lip strategy as its base");

    AblationResult out;
    for (auto f : all_features()) {
        ExperimentConfig cfg = config;
        cfg.strategies = {PromptStrategy::ablation(f)};
        auto r = run_impl(cfg, "ablation-" + std::string(slug(f)), false);
        for (auto& rep : r.reports) out.rows.emplace_back(f, std::move(rep));
        out.records.insert(out.records.end(), std::make_move_iterator(r.records.begin()),
                           std::make_move_iterator(r.records.end()));
    }
    const auto dir = config.outdir / "reports";
    for (auto f : {ReportFormat::markdown, ReportFormat::csv, ReportFormat::json}) {
        try {
            write_file(dir / ("ablation." + std::string(extension(f))), render_ablation(out.rows, f));
        } catch (const ReportError&) {
            throw;
        } catch (const std::exception& e) {
            throw ReportError(std::string("cannot write ablation report: ") + e.what());
        }
    }
    return out;
}

} // namespace authorbench
