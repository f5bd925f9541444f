#pragma once

#include "authorbench/baselines.hpp"
#include "authorbench/corpus.hpp"
#include "authorbench/linguistic_features.hpp"
#include "authorbench/llm_client.hpp"
#include "authorbench/metrics.hpp"
#include "authorbench/prompts.hpp"
#include "authorbench/sampling.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace authorbench {

enum class SystemKind { llm, tfidf, embedding };

std::string_view to_string(SystemKind kind);

/// One column of the sweep. LLM systems are crossed with every strategy;
/// baselines ignore strategies and run once per repetition.
struct SystemSpec {
    SystemKind kind = SystemKind::llm;
    std::string label;  // report "Model" column; defaults from kind and model
    std::string model;

    /// llm: "openai" (HTTP), "mock", or "replay" (cache only).
    /// embedding: "http", "mock", or "replay".
    std::string provider = "mock";
    /// llm mocks: "oracle", "malformed", "constant:<answer>", or empty when
    /// mock_script names a script file.
    std::string mock;
    std::filesystem::path mock_script;
    /// Embedding mock mode: hashed, high_similarity, constant.
    std::string embedding_mode = "hashed";
    double threshold = 0.5;  // verification baselines

    /// Programmatic overrides; take precedence over the fields above.
    std::shared_ptr<Provider> llm_provider;
    std::shared_ptr<EmbeddingProvider> embedding_provider;

    std::string display_label() const;
};

struct ProviderSettings {
    std::string endpoint = "https://api.openai.com/v1";
    std::string api_key_env = "LLM_API_KEY";
    std::chrono::seconds timeout{120};
    double temperature = 0.0;
    double top_p = 1.0;
    std::optional<int> max_output_tokens;
    RetryPolicy retry;
    bool json_reminder = true;
};

struct DatasetSpec {
    std::filesystem::path path;
    CorpusFormat format = CorpusFormat::jsonl;
    std::string name;
    std::size_t min_texts_per_author = 2;
    std::optional<std::string> language;  // e.g. "en"
};

/// Config file schema (JSON):
///
///   task           "verification" | "attribution"
///   dataset        {path, format, name, min_texts_per_author, language}
///   sample         path to a sample file; replaces dataset sampling
///   plan           {n_pairs, n_candidates (number or list), repetitions, seed}
///   strategies     ["no_guidance", "little_guidance", "grammar", "lip", "ablation:<feature>"]
///   systems        [{type: llm|tfidf|embedding, label, model, provider, mock,
///                    mock_script, mode, threshold}]
///   provider       {endpoint, api_key_env, timeout_s, temperature, top_p,
///                   max_output_tokens, json_reminder,
///                   retry: {max_attempts, base_delay_ms, factor}}
///   parallelism    in-flight request limit
///   outdir         output root
///
/// Relative paths resolve against the config file's directory.
struct ExperimentConfig {
    Task task = Task::verification;
    DatasetSpec dataset;
    std::optional<std::filesystem::path> sample_path;
    SamplePlan plan;
    std::vector<std::size_t> candidate_counts;  // attribution; defaults to {plan.n_candidates}
    std::vector<PromptStrategy> strategies;
    std::vector<SystemSpec> systems;
    ProviderSettings provider;
    std::size_t parallelism = 4;
    std::filesystem::path outdir = "out";

    /// Supplied in code instead of dataset.path.
    std::optional<Corpus> corpus;

    void validate() const;
    static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
    static ExperimentConfig load(const std::filesystem::path& path);
};

/// One row per (instance, strategy, system). Holds everything a report cell
/// needs; latency and cost live in RunTiming so the log replays byte-identically.
struct RunRecord {
    std::string instance_id;
    Task task = Task::verification;
    std::string dataset;
    std::size_t repetition = 0;  // 1-based
    std::size_t n_candidates = 0;  // attribution only
    std::string strategy;  // "-" for baselines
    std::string system;
    std::string prompt_digest;  // request digest; empty for baselines
    std::string raw_response;   // LLM text, or the baseline score summary
    std::optional<std::string> analysis;
    std::optional<Answer> parsed_answer;
    ParseStatus parse_status = ParseStatus::failed;
    Answer truth;
    bool correct = false;

    nlohmann::ordered_json to_json() const;
    static RunRecord from_json(const nlohmann::json& j);
};

struct RunTiming {
    std::string instance_id;
    std::string strategy;
    std::string system;
    long long latency_ms = 0;
    int attempts = 0;
    bool from_cache = false;
    nlohmann::json usage;

    nlohmann::ordered_json to_json() const;
};

struct ExperimentResult {
    std::vector<AggregateReport> reports;
    std::vector<RunRecord> records;
    std::vector<RunTiming> timings;
    std::vector<std::string> warnings;
};

/// Writes <outdir>/samples/<task>.json, responses/ (cache), records/<task>.jsonl,
/// records/<task>.timing.jsonl and reports/<task>.{md,csv,json}. On a
/// provider failure the finished records and records/<task>.resume.json are
/// written, then the error propagates; rerunning resumes from the cache.
ExperimentResult run_verification_experiment(const ExperimentConfig& config);
ExperimentResult run_attribution_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config);

struct AblationResult {
    /// Feature order, one entry per (feature, system).
    std::vector<std::pair<LinguisticFeature, AggregateReport>> rows;
    std::vector<RunRecord> records;
};

/// One attribution experiment per single-feature ablation of the LIP prompt.
/// Writes records/ablation-<feature>.jsonl and reports/ablation.{md,csv,json}.
AblationResult run_ablation(const ExperimentConfig& config);

/// Groups by (n_candidates, system, strategy, repetition) in log order and
/// aggregates over repetitions. Reports depend only on the log.
std::vector<AggregateReport> reports_from_records(const std::vector<RunRecord>& records);

std::vector<RunRecord> load_records(const std::filesystem::path& path);
void save_records(const std::vector<RunRecord>& records, const std::filesystem::path& path);

enum class ReportFormat { markdown, csv, json };

ReportFormat report_format_from_string(std::string_view name);
std::string_view extension(ReportFormat format);

/// Verification markdown: Model | Prompt | A | P | R | F1 plus the 50.00
/// null-accuracy line. Attribution markdown: one Weighted/Macro/Micro column
/// group per candidate count.
std::string render_report(const std::vector<AggregateReport>& reports, ReportFormat format);
/// Feature | Weighted F1 | Macro F1 | Micro F1 per system.
std::string render_ablation(const std::vector<std::pair<LinguisticFeature, AggregateReport>>& rows,
                            ReportFormat format);

/// Writes <dir>/<stem>.<ext> for the given format.
std::filesystem::path emit_report(const std::vector<AggregateReport>& reports, ReportFormat format,
                                  const std::filesystem::path& dir, const std::string& stem);

} // namespace authorbench
