#include "authorbench/prompts.hpp"

#include "authorbench/error.hpp"
#include "authorbench/text.hpp"

#include <nlohmann/json.hpp>

namespace authorbench {

namespace {

struct FeatureName {
    LinguisticFeature feature;
    std::string_view display;
    std::string_view slug;
};

constexpr FeatureName kFeatures[] = {
    {LinguisticFeature::phrasal_verbs, "phrasal verbs", "phrasal_verbs"},
    {LinguisticFeature::modal_verbs, "modal verbs", "modal_verbs"},
    {LinguisticFeature::punctuation, "punctuation", "punctuation"},
    {LinguisticFeature::rare_words, "rare words", "rare_words"},
    {LinguisticFeature::affixes, "affixes", "affixes"},
    {LinguisticFeature::quantities, "quantities", "quantities"},
    {LinguisticFeature::humor, "humor", "humor"},
    {LinguisticFeature::sarcasm, "sarcasm", "sarcasm"},
    {LinguisticFeature::typographical_errors, "typographical errors", "typographical_errors"},
    {LinguisticFeature::misspellings, "misspellings", "misspellings"},
};

const FeatureName& lookup(LinguisticFeature feature) {
    return kFeatures[static_cast<std::size_t>(feature)];
}

constexpr std::string_view kTemplateNames[] = {
    "system", "user", "task_description", "no_guidance", "little_guidance", "grammar", "lip",
};

std::string template_key(Task task, std::string_view name) {
    std::string key(to_string(task));
    key.push_back('/');
    key += name;
    return key;
}

} // namespace

const std::array<LinguisticFeature, 10>& all_features() {
    static const std::array<LinguisticFeature, 10> features = [] {
        std::array<LinguisticFeature, 10> out{};
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = kFeatures[i].feature;
        return out;
    }();
    return features;
}

std::string_view display_name(LinguisticFeature feature) { return lookup(feature).display; }
std::string_view slug(LinguisticFeature feature) { return lookup(feature).slug; }

std::optional<LinguisticFeature> feature_from_string(std::string_view name) {
    for (const auto& f : kFeatures) {
        if (f.slug == name || f.display == name) return f.feature;
    }
    if (name == "typos") return LinguisticFeature::typographical_errors;
    return std::nullopt;
}

std::vector<std::string> feature_list() {
    std::vector<std::string> out;
    for (const auto& f : kFeatures) out.emplace_back(f.display);
    return out;
}

PromptStrategy PromptStrategy::ablation(LinguisticFeature feature) {
    PromptStrategy s(StrategyKind::feature_ablation);
    s.feature_ = feature;
    return s;
}

PromptStrategy PromptStrategy::parse(std::string_view name) {
    if (name == "no_guidance") return no_guidance();
    if (name == "little_guidance") return little_guidance();
    if (name == "grammar" || name == "grammar_guidance") return grammar();
    if (name == "lip" || name == "LIP") return lip();
    constexpr std::string_view prefix = "ablation:";
    if (name.substr(0, prefix.size()) == prefix) {
        if (auto f = feature_from_string(name.substr(prefix.size()))) return ablation(*f);
    }
    throw ConfigError("unknown prompt strategy '" + std::string(name) + "'");
}

std::array<PromptStrategy, 4> PromptStrategy::guidance_levels() {
    return {no_guidance(), little_guidance(), grammar(), lip()};
}

std::string PromptStrategy::name() const {
    switch (kind_) {
    case StrategyKind::no_guidance: return "no_guidance";
    case StrategyKind::little_guidance: return "little_guidance";
    case StrategyKind::grammar: return "grammar";
    case StrategyKind::lip: return "lip";
    case StrategyKind::feature_ablation: return "ablation:" + std::string(slug(*feature_));
    }
    return {};
}

// ---------------------------------------------------------------------------

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
    TemplateSet set;
    for (Task task : {Task::verification, Task::attribution}) {
        for (auto name : kTemplateNames) {
            const auto path = dir / std::string(to_string(task)) / (std::string(name) + ".txt");
            std::string body;
            try {
                body = read_file(path);
            } catch (const Error&) {
                throw PromptError("missing prompt template " + path.string());
            }
            if (!body.empty() && body.back() == '\n') body.pop_back();
            if (!body.empty() && body.back() == '\r') body.pop_back();
            set.entries_.emplace(template_key(task, name), std::move(body));
        }
    }
    return set;
}

const TemplateSet& TemplateSet::builtin() {
    static const TemplateSet set = load(data_dir() / "templates");
    return set;
}

const std::string& TemplateSet::get(Task task, std::string_view name) const {
    const auto it = entries_.find(template_key(task, name));
    if (it == entries_.end()) throw PromptError("no template " + template_key(task, name));
    return it->second;
}

std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            const std::size_t close = tmpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                const auto it = values.find(tmpl.substr(i + 1, close - i - 1));
                if (it != values.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(tmpl[i++]);
    }
    return out;
}

std::string join_feature_names(const std::vector<std::string>& names) {
    if (names.empty()) return {};
    if (names.size() == 1) return names.front();
    if (names.size() == 2) return names[0] + " and " + names[1];
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) out += ", ";
        if (i + 1 == names.size()) out += "and ";
        out += names[i];
    }
    return out;
}

std::string strategy_text(Task task, const PromptStrategy& strategy, const TemplateSet& templates) {
    std::string features;
    std::string_view file;
    switch (strategy.kind()) {
    case StrategyKind::no_guidance: file = "no_guidance"; break;
    case StrategyKind::little_guidance: file = "little_guidance"; break;
    case StrategyKind::grammar: file = "grammar"; break;
    case StrategyKind::lip:
        file = "lip";
        features = join_feature_names(feature_list());
        break;
    case StrategyKind::feature_ablation:
        if (!strategy.feature()) throw PromptError("ablation strategy without a feature");
        file = "lip";
        features = std::string(display_name(*strategy.feature()));
        break;
    }
    return fill_template(templates.get(task, file), {
        {"task_description", templates.get(task, "task_description")},
        {"features", features},
    });
}

std::string candidate_json(const AttributionInstance& instance) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (const auto& c : instance.candidates) obj[c.author_id] = c.document.text;
    return obj.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

namespace {

void enforce_budget(const RenderedPrompt& prompt, const RenderOptions& options) {
    if (!options.max_chars) return;
    const std::size_t size = prompt.system_text.size() + prompt.user_text.size();
    if (size > *options.max_chars) {
        throw PromptError(prompt.instance_id + ": rendered prompt is " + std::to_string(size) +
                          " chars, limit " + std::to_string(*options.max_chars));
    }
}

} // namespace

RenderedPrompt render_verification(const VerificationInstance& instance, const PromptStrategy& strategy,
                                   const TemplateSet& templates, const RenderOptions& options) {
    if (trim(instance.text_a.text).empty() || trim(instance.text_b.text).empty()) {
        throw PromptError(instance.instance_id + ": empty input text");
    }
    RenderedPrompt out;
    out.task = Task::verification;
    out.strategy = strategy;
    out.instance_id = instance.instance_id;
    out.system_text = templates.get(Task::verification, "system");
    out.user_text = fill_template(templates.get(Task::verification, "user"), {
        {"prompt", strategy_text(Task::verification, strategy, templates)},
        {"text_1", instance.text_a.text},
        {"text_2", instance.text_b.text},
    });
    enforce_budget(out, options);
    return out;
}

RenderedPrompt render_attribution(const AttributionInstance& instance, const PromptStrategy& strategy,
                                  const TemplateSet& templates, const RenderOptions& options) {
    if (instance.candidates.empty()) throw PromptError(instance.instance_id + ": empty candidate set");
    if (trim(instance.query.text).empty()) throw PromptError(instance.instance_id + ": empty query text");
    RenderedPrompt out;
    out.task = Task::attribution;
    out.strategy = strategy;
    out.instance_id = instance.instance_id;
    out.system_text = templates.get(Task::attribution, "system");
    out.user_text = fill_template(templates.get(Task::attribution, "user"), {
        {"prompt", strategy_text(Task::attribution, strategy, templates)},
        {"query_text", instance.query.text},
        {"example_texts", candidate_json(instance)},
    });
    enforce_budget(out, options);
    return out;
}

} // namespace authorbench
