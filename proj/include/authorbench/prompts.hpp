#pragma once

#include "authorbench/sampling.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace authorbench {

enum class LinguisticFeature {
    phrasal_verbs,
    modal_verbs,
    punctuation,
    rare_words,
    affixes,
    quantities,
    humor,
    sarcasm,
    typographical_errors,
    misspellings,
};

/// The ten features in prompt order.
const std::array<LinguisticFeature, 10>& all_features();

/// Prompt wording, e.g. "phrasal verbs".
std::string_view display_name(LinguisticFeature feature);
/// Identifier form, e.g. "phrasal_verbs".
std::string_view slug(LinguisticFeature feature);
std::optional<LinguisticFeature> feature_from_string(std::string_view name);

std::vector<std::string> feature_list();

enum class StrategyKind { no_guidance, little_guidance, grammar, lip, feature_ablation };

class PromptStrategy {
public:
    PromptStrategy() = default;

    static PromptStrategy no_guidance() { return PromptStrategy(StrategyKind::no_guidance); }
    static PromptStrategy little_guidance() { return PromptStrategy(StrategyKind::little_guidance); }
    static PromptStrategy grammar() { return PromptStrategy(StrategyKind::grammar); }
    static PromptStrategy lip() { return PromptStrategy(StrategyKind::lip); }
    static PromptStrategy ablation(LinguisticFeature feature);

    /// "no_guidance", "little_guidance", "grammar", "lip", "ablation:<feature slug>".
    static PromptStrategy parse(std::string_view name);
    static std::array<PromptStrategy, 4> guidance_levels();

    StrategyKind kind() const noexcept { return kind_; }
    const std::optional<LinguisticFeature>& feature() const noexcept { return feature_; }
    std::string name() const;

    bool operator==(const PromptStrategy&) const = default;

private:
    explicit PromptStrategy(StrategyKind kind) : kind_(kind) {}

    StrategyKind kind_ = StrategyKind::no_guidance;
    std::optional<LinguisticFeature> feature_;
};

struct RenderedPrompt {
    std::string system_text;
    std::string user_text;
    Task task = Task::verification;
    PromptStrategy strategy;
    std::string instance_id;
};

/// Prompt wording loaded from <dir>/<task>/{system,user,task_description,
/// no_guidance,little_guidance,grammar,lip}.txt. One trailing newline per
/// file is dropped. Placeholders: {task_description} and {features} in the
/// strategy files; {prompt}, {text_1}, {text_2}, {query_text},
/// {example_texts} in user.txt.
class TemplateSet {
public:
    static TemplateSet load(const std::filesystem::path& dir);
    /// Loaded once from data_dir()/templates.
    static const TemplateSet& builtin();

    const std::string& get(Task task, std::string_view name) const;

private:
    std::map<std::string, std::string, std::less<>> entries_;
};

struct RenderOptions {
    /// Hard cap on system + user characters (bytes); exceeding it throws.
    std::optional<std::size_t> max_chars;
};

/// "a", "a and b", "a, b, and c".
std::string join_feature_names(const std::vector<std::string>& names);

/// Task description plus the strategy's guidance clause.
std::string strategy_text(Task task, const PromptStrategy& strategy,
                          const TemplateSet& templates = TemplateSet::builtin());

/// Compact JSON object of example texts keyed by author ID, in candidate order.
std::string candidate_json(const AttributionInstance& instance);

RenderedPrompt render_verification(const VerificationInstance& instance, const PromptStrategy& strategy,
                                   const TemplateSet& templates = TemplateSet::builtin(),
                                   const RenderOptions& options = {});

RenderedPrompt render_attribution(const AttributionInstance& instance, const PromptStrategy& strategy,
                                  const TemplateSet& templates = TemplateSet::builtin(),
                                  const RenderOptions& options = {});

/// Single-pass placeholder substitution; substituted values are never rescanned.
std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values);

} // namespace authorbench
