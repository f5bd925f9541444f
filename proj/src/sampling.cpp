#include "authorbench/sampling.hpp"

#include "authorbench/error.hpp"
#include "authorbench/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace authorbench {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Task task) {
    return task == Task::verification ? "verification" : "attribution";
}

Task task_from_string(std::string_view name) {
    if (name == "verification" || name == "verify") return Task::verification;
    if (name == "attribution" || name == "attribute") return Task::attribution;
    throw ConfigError("unknown task '" + std::string(name) + "'");
}

void SamplePlan::validate() const {
    if (repetitions < 1) throw SamplingError("repetitions must be >= 1");
    if (task == Task::verification) {
        if (n_pairs == 0) throw SamplingError("n_pairs must be > 0");
        if (n_pairs % 2 != 0) throw SamplingError("n_pairs must be even for a balanced sample");
    } else if (n_candidates < 1) {
        throw SamplingError("n_candidates must be >= 1");
    }
}

ordered_json SamplePlan::to_json() const {
    ordered_json j;
    j["task"] = std::string(to_string(task));
    if (task == Task::verification) {
        j["n_pairs"] = n_pairs;
    } else {
        j["n_candidates"] = n_candidates;
    }
    j["repetitions"] = repetitions;
    j["seed"] = seed;
    j["corpus_name"] = corpus_name;
    return j;
}

SamplePlan SamplePlan::from_json(const json& j) {
    SamplePlan plan;
    plan.task = task_from_string(j.value("task", std::string("verification")));
    plan.n_pairs = j.value("n_pairs", plan.n_pairs);
    plan.n_candidates = j.value("n_candidates", plan.n_candidates);
    plan.repetitions = j.value("repetitions", plan.repetitions);
    plan.seed = j.value("seed", plan.seed);
    plan.corpus_name = j.value("corpus_name", std::string());
    return plan;
}

std::vector<std::string> AttributionInstance::candidate_ids() const {
    std::vector<std::string> ids;
    ids.reserve(candidates.size());
    for (const auto& c : candidates) ids.push_back(c.author_id);
    return ids;
}

std::string make_instance_id(std::string_view corpus, Task task, std::size_t rep, std::size_t ordinal) {
    char suffix[48];
    std::snprintf(suffix, sizeof suffix, "-r%zu-%03zu", rep, ordinal);
    std::string id(corpus);
    id += "-";
    id += to_string(task);
    id += suffix;
    return id;
}

namespace {

using AuthorGroups = std::vector<std::pair<std::string, std::vector<const Document*>>>;

std::string plan_corpus_name(const SamplePlan& plan, const Corpus& corpus) {
    return plan.corpus_name.empty() ? corpus.name : plan.corpus_name;
}

} // namespace

VerificationSample sample_verification(const Corpus& corpus, const SamplePlan& plan) {
    if (plan.task != Task::verification) throw SamplingError("plan task is not verification");
    plan.validate();
    const std::size_t positives = plan.n_pairs / 2;
    const std::size_t negatives = plan.n_pairs - positives;

    const AuthorGroups groups = corpus.by_author();
    const auto eligible = static_cast<std::size_t>(std::count_if(
        groups.begin(), groups.end(), [](const auto& g) { return g.second.size() >= 2; }));
    if (eligible < positives) {
        throw SamplingError("insufficient corpus: need " + std::to_string(positives) +
                            " authors with >=2 texts for positive pairs, have " + std::to_string(eligible));
    }
    if (groups.size() < positives + 2 * negatives) {
        throw SamplingError("insufficient corpus: need " + std::to_string(positives + 2 * negatives) +
                            " distinct authors, have " + std::to_string(groups.size()));
    }

    VerificationSample sample;
    sample.plan = plan;
    sample.plan.corpus_name = plan_corpus_name(plan, corpus);

    for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
        SplitMix64 rng = SplitMix64::for_stream(plan.seed, rep);
        std::vector<std::size_t> order(groups.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(std::span(order));

        std::vector<char> used(groups.size(), 0);
        std::vector<VerificationInstance> pairs;
        pairs.reserve(plan.n_pairs);

        for (std::size_t idx : order) {
            if (pairs.size() == positives) break;
            const auto& docs = groups[idx].second;
            if (docs.size() < 2) continue;
            std::vector<const Document*> pick = docs;
            rng.shuffle(std::span(pick));
            VerificationInstance inst;
            inst.text_a = *pick[0];
            inst.text_b = *pick[1];
            inst.same_author = true;
            pairs.push_back(std::move(inst));
            used[idx] = 1;
        }

        std::vector<std::size_t> remaining;
        for (std::size_t idx : order) {
            if (!used[idx]) remaining.push_back(idx);
        }
        // Feasibility was checked above: positives consume exactly `positives` authors.
        for (std::size_t k = 0; k < negatives; ++k) {
            const auto& docs_a = groups[remaining[2 * k]].second;
            const auto& docs_b = groups[remaining[2 * k + 1]].second;
            VerificationInstance inst;
            inst.text_a = *docs_a[rng.uniform(docs_a.size())];
            inst.text_b = *docs_b[rng.uniform(docs_b.size())];
            inst.same_author = false;
            pairs.push_back(std::move(inst));
        }

        rng.shuffle(std::span(pairs));
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            pairs[i].instance_id = make_instance_id(sample.plan.corpus_name, Task::verification, rep + 1, i + 1);
        }
        sample.repetitions.push_back(std::move(pairs));
    }
    return sample;
}

AttributionSample sample_attribution(const Corpus& corpus, const SamplePlan& plan) {
    if (plan.task != Task::attribution) throw SamplingError("plan task is not attribution");
    plan.validate();
    const std::size_t n = plan.n_candidates;

    const AuthorGroups groups = corpus.by_author();
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].second.size() >= 2) eligible.push_back(i);
    }
    if (eligible.size() < n) {
        std::string msg = "insufficient corpus: need " + std::to_string(n) +
                          " authors with >=2 texts, have " + std::to_string(eligible.size());
        if (groups.size() >= n) {
            msg += " (" + std::to_string(groups.size() - eligible.size()) +
                   " authors lack a second text for the query)";
        }
        throw SamplingError(msg);
    }

    AttributionSample sample;
    sample.plan = plan;
    sample.plan.corpus_name = plan_corpus_name(plan, corpus);

    for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
        SplitMix64 rng = SplitMix64::for_stream(plan.seed, rep);
        std::vector<std::size_t> order = eligible;
        rng.shuffle(std::span(order));
        order.resize(n);

        // Per author: docs[0] is the query, docs[1..] the example pool.
        std::vector<std::vector<const Document*>> docs(n);
        for (std::size_t a = 0; a < n; ++a) {
            docs[a] = groups[order[a]].second;
            rng.shuffle(std::span(docs[a]));
        }

        // Query instances in a shuffled order; candidate presentation order is
        // the repetition's author order.
        std::vector<std::size_t> query_order(n);
        for (std::size_t i = 0; i < n; ++i) query_order[i] = i;
        rng.shuffle(std::span(query_order));

        std::vector<std::size_t> next_example(n, 1);
        std::vector<AttributionInstance> instances;
        instances.reserve(n);
        std::set<std::string> reused_authors;
        for (std::size_t qi = 0; qi < n; ++qi) {
            const std::size_t truth = query_order[qi];
            AttributionInstance inst;
            inst.instance_id = make_instance_id(sample.plan.corpus_name, Task::attribution, rep + 1, qi + 1);
            inst.query = *docs[truth][0];
            inst.true_author = groups[order[truth]].first;
            for (std::size_t a = 0; a < n; ++a) {
                const auto& pool = docs[a];
                const std::size_t spare = pool.size() - 1;
                std::size_t pick = next_example[a]++;
                if (pick > spare) {
                    pick = 1 + (pick - 1) % spare;
                    reused_authors.insert(groups[order[a]].first);
                }
                inst.candidates.push_back({groups[order[a]].first, *pool[pick]});
            }
            instances.push_back(std::move(inst));
        }
        for (const auto& author : reused_authors) {
            sample.warnings.push_back("r" + std::to_string(rep + 1) + ": author " + author +
                                      " has too few documents; example texts reused across instances");
        }
        sample.repetitions.push_back(std::move(instances));
    }
    return sample;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_document(const Document& doc, const Corpus& corpus, const std::string& where,
                    ValidationReport& report) {
    const Document* source = corpus.find(doc.doc_id);
    if (source == nullptr) {
        report.violations.push_back(where + ": unknown document " + doc.doc_id);
        return;
    }
    if (source->author_id != doc.author_id) {
        report.violations.push_back(where + ": author mismatch for " + doc.doc_id);
    }
    if (source->text != doc.text) report.violations.push_back(where + ": text mismatch for " + doc.doc_id);
}

} // namespace

ValidationReport validate_sample(const VerificationSample& sample, const Corpus& corpus) {
    ValidationReport report;
    report.warnings = sample.warnings;
    std::set<std::string> ids;
    for (std::size_t rep = 0; rep < sample.repetitions.size(); ++rep) {
        const auto& pairs = sample.repetitions[rep];
        const std::string rtag = "r" + std::to_string(rep + 1);
        std::size_t positives = 0;
        std::set<std::string> docs_seen;
        std::map<std::string, std::string> author_pair;  // author -> first instance using it
        for (const auto& inst : pairs) {
            const std::string& where = inst.instance_id;
            if (!ids.insert(inst.instance_id).second) {
                report.violations.push_back(where + ": duplicate instance_id");
            }
            check_document(inst.text_a, corpus, where, report);
            check_document(inst.text_b, corpus, where, report);
            if (inst.text_a.doc_id == inst.text_b.doc_id) {
                report.violations.push_back(where + ": pair uses the same document twice");
            }
            if (inst.same_author != (inst.text_a.author_id == inst.text_b.author_id)) {
                report.violations.push_back(where + ": label mismatch");
            }
            if (inst.text_a.author_id == inst.text_b.author_id) ++positives;
            if (!docs_seen.insert(inst.text_a.doc_id).second) {
                report.violations.push_back(where + ": document " + inst.text_a.doc_id + " reused in " + rtag);
            }
            if (inst.text_b.doc_id != inst.text_a.doc_id && !docs_seen.insert(inst.text_b.doc_id).second) {
                report.violations.push_back(where + ": document " + inst.text_b.doc_id + " reused in " + rtag);
            }
            std::set<std::string> pair_authors{inst.text_a.author_id, inst.text_b.author_id};
            for (const auto& author : pair_authors) {
                auto [it, inserted] = author_pair.try_emplace(author, inst.instance_id);
                if (!inserted) {
                    report.violations.push_back(where + ": author " + author + " also used by " + it->second);
                }
            }
        }
        if (positives * 2 != pairs.size()) {
            report.violations.push_back(rtag + ": unbalanced (" + std::to_string(positives) + " positive of " +
                                        std::to_string(pairs.size()) + ")");
        }
    }
    return report;
}

ValidationReport validate_sample(const AttributionSample& sample, const Corpus& corpus) {
    ValidationReport report;
    report.warnings = sample.warnings;
    std::set<std::string> ids;
    for (std::size_t rep = 0; rep < sample.repetitions.size(); ++rep) {
        const std::string rtag = "r" + std::to_string(rep + 1);
        std::map<std::string, std::string> query_authors;
        std::set<std::string> query_docs;
        std::set<std::string> example_docs;
        for (const auto& inst : sample.repetitions[rep]) {
            const std::string& where = inst.instance_id;
            if (!ids.insert(inst.instance_id).second) {
                report.violations.push_back(where + ": duplicate instance_id");
            }
            check_document(inst.query, corpus, where, report);
            if (inst.query.author_id != inst.true_author) {
                report.violations.push_back(where + ": label mismatch");
            }
            auto [it, inserted] = query_authors.try_emplace(inst.query.author_id, inst.instance_id);
            if (!inserted) {
                report.violations.push_back(where + ": query author " + inst.query.author_id +
                                            " also queried by " + it->second);
            }
            query_docs.insert(inst.query.doc_id);
            std::set<std::string> keys;
            std::size_t true_hits = 0;
            for (const auto& cand : inst.candidates) {
                check_document(cand.document, corpus, where, report);
                if (!keys.insert(cand.author_id).second) {
                    report.violations.push_back(where + ": duplicate candidate author " + cand.author_id);
                }
                if (cand.document.author_id != cand.author_id) {
                    report.violations.push_back(where + ": candidate " + cand.author_id +
                                                " example written by " + cand.document.author_id);
                }
                if (cand.document.doc_id == inst.query.doc_id) {
                    report.violations.push_back(where + ": query text shown as candidate example");
                }
                if (cand.author_id == inst.true_author) ++true_hits;
                example_docs.insert(cand.document.doc_id);
            }
            if (true_hits != 1) {
                report.violations.push_back(where + ": true author appears " + std::to_string(true_hits) +
                                            " times among candidates");
            }
        }
        for (const auto& doc : query_docs) {
            if (example_docs.count(doc) != 0) {
                report.violations.push_back(rtag + ": query document " + doc + " also used as an example");
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

ordered_json instance_to_json(const VerificationInstance& inst) {
    ordered_json j;
    j["instance_id"] = inst.instance_id;
    j["text_a"] = document_to_json(inst.text_a);
    j["text_b"] = document_to_json(inst.text_b);
    j["same_author"] = inst.same_author;
    return j;
}

ordered_json instance_to_json(const AttributionInstance& inst) {
    ordered_json j;
    j["instance_id"] = inst.instance_id;
    j["query"] = document_to_json(inst.query);
    ordered_json cands = ordered_json::array();
    for (const auto& c : inst.candidates) {
        ordered_json cj;
        cj["author_id"] = c.author_id;
        cj["document"] = document_to_json(c.document);
        cands.push_back(std::move(cj));
    }
    j["candidates"] = std::move(cands);
    j["true_author"] = inst.true_author;
    return j;
}

template <typename Instance>
ordered_json sample_to_json(const SampleSet<Instance>& sample) {
    ordered_json j;
    j["plan"] = sample.plan.to_json();
    ordered_json reps = ordered_json::array();
    for (const auto& rep : sample.repetitions) {
        ordered_json items = ordered_json::array();
        for (const auto& inst : rep) items.push_back(instance_to_json(inst));
        reps.push_back(std::move(items));
    }
    j["repetitions"] = std::move(reps);
    j["warnings"] = sample.warnings;
    return j;
}

VerificationInstance verification_from_json(const json& j) {
    VerificationInstance inst;
    inst.instance_id = j.at("instance_id").get<std::string>();
    inst.text_a = document_from_json(j.at("text_a"));
    inst.text_b = document_from_json(j.at("text_b"));
    inst.same_author = j.at("same_author").get<bool>();
    return inst;
}

AttributionInstance attribution_from_json(const json& j) {
    AttributionInstance inst;
    inst.instance_id = j.at("instance_id").get<std::string>();
    inst.query = document_from_json(j.at("query"));
    for (const auto& cj : j.at("candidates")) {
        inst.candidates.push_back({cj.at("author_id").get<std::string>(), document_from_json(cj.at("document"))});
    }
    inst.true_author = j.at("true_author").get<std::string>();
    return inst;
}

template <typename Instance, typename Parse>
SampleSet<Instance> sample_from_json(std::string_view contents, Task expected, Parse parse) {
    try {
        const json j = json::parse(contents);
        SampleSet<Instance> sample;
        sample.plan = SamplePlan::from_json(j.at("plan"));
        if (sample.plan.task != expected) {
            throw SamplingError("sample file holds a " + std::string(to_string(sample.plan.task)) + " sample");
        }
        for (const auto& rep : j.at("repetitions")) {
            std::vector<Instance> items;
            for (const auto& ij : rep) items.push_back(parse(ij));
            sample.repetitions.push_back(std::move(items));
        }
        if (j.contains("warnings")) sample.warnings = j.at("warnings").get<std::vector<std::string>>();
        return sample;
    } catch (const json::exception& e) {
        throw SamplingError(std::string("malformed sample file: ") + e.what());
    } catch (const CorpusError& e) {
        throw SamplingError(std::string("malformed sample file: ") + e.what());
    }
}

} // namespace

ordered_json to_json(const VerificationSample& sample) { return sample_to_json(sample); }
ordered_json to_json(const AttributionSample& sample) { return sample_to_json(sample); }

std::string serialize_sample(const VerificationSample& sample) { return to_json(sample).dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n"; }
std::string serialize_sample(const AttributionSample& sample) { return to_json(sample).dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n"; }

VerificationSample parse_verification_sample(std::string_view contents) {
    return sample_from_json<VerificationInstance>(contents, Task::verification, verification_from_json);
}

AttributionSample parse_attribution_sample(std::string_view contents) {
    return sample_from_json<AttributionInstance>(contents, Task::attribution, attribution_from_json);
}

Task sample_task(std::string_view contents) {
    try {
        const json j = json::parse(contents);
        return task_from_string(j.at("plan").at("task").get<std::string>());
    } catch (const json::exception& e) {
        throw SamplingError(std::string("malformed sample file: ") + e.what());
    }
}

} // namespace authorbench
