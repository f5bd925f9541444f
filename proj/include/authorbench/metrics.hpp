#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace authorbench {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
    bool operator==(const ConfusionCounts&) const = default;
};

/// A missing prediction is a failed parse.
struct BinaryPrediction {
    std::optional<bool> predicted;
    bool truth = false;
};

/// Percentages in [0, 100], full precision.
struct BinaryReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    ConfusionCounts counts;
    std::size_t failed_parses = 0;
    bool precision_undefined = false;  // no positive predictions
    bool recall_undefined = false;     // no positive truths

    nlohmann::ordered_json to_json() const;
    bool operator==(const BinaryReport&) const = default;
};

/// Failed parses are scored as the opposite of the truth.
BinaryReport binary_metrics(std::span<const BinaryPrediction> predictions);

/// accuracy = (tp + tn) / n, precision = tp / (tp + fp), recall = tp / (tp + fn),
/// f1 = 2PR / (P + R); an empty denominator gives 0 and sets the flag.
BinaryReport binary_metrics_from_counts(const ConfusionCounts& counts, std::size_t failed_parses = 0);

struct LabelPrediction {
    std::optional<std::string> predicted;
    std::string truth;
};

struct LabelScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;

    bool operator==(const LabelScores&) const = default;
};

/// Label universe: truths plus parsed predictions. Failed parses predict a
/// reserved label that is outside the universe, so they only cost recall.
/// macro is the plain mean over the universe, weighted the support-weighted
/// mean, micro 2TP / (2TP + FP + FN) over pooled one-vs-rest counts, which
/// for single-label input equals accuracy.
struct MultiClassReport {
    double weighted_f1 = 0.0;
    double macro_f1 = 0.0;
    double micro_f1 = 0.0;
    double accuracy = 0.0;
    std::map<std::string, LabelScores> per_label;
    std::size_t predictions = 0;
    std::size_t failed_parses = 0;

    nlohmann::ordered_json to_json() const;
    bool operator==(const MultiClassReport&) const = default;
};

MultiClassReport multiclass_f1(std::span<const LabelPrediction> predictions);

using AnyReport = std::variant<BinaryReport, MultiClassReport>;

struct ExperimentDescriptor {
    std::string task;
    std::string model;
    std::string strategy;
    std::string dataset;
    std::optional<std::size_t> n_candidates;

    nlohmann::ordered_json to_json() const;
    static ExperimentDescriptor from_json(const nlohmann::json& j);
    bool operator==(const ExperimentDescriptor&) const = default;
};

struct AggregateReport {
    ExperimentDescriptor descriptor;
    std::vector<AnyReport> repetitions;
    /// Field-wise mean of the repetitions; counts and failed parses are summed,
    /// per-label scores are omitted.
    AnyReport mean;

    bool is_binary() const { return std::holds_alternative<BinaryReport>(mean); }
    const BinaryReport& binary() const { return std::get<BinaryReport>(mean); }
    const MultiClassReport& multiclass() const { return std::get<MultiClassReport>(mean); }

    nlohmann::ordered_json to_json() const;
};

AggregateReport aggregate(std::span<const AnyReport> reports, ExperimentDescriptor descriptor = {});

/// Two decimals, half-up.
std::string format_percent(double value);

} // namespace authorbench
