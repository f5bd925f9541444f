#include "authorbench/metrics.hpp"

#include "authorbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace authorbench {

namespace {

double pct(std::size_t num, std::size_t den) {
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

nlohmann::ordered_json counts_json(const ConfusionCounts& c) {
    return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}

} // namespace

BinaryReport binary_metrics_from_counts(const ConfusionCounts& c, std::size_t failed_parses) {
    if (c.total() == 0) throw MetricsError("binary_metrics: no predictions");
    BinaryReport r;
    r.counts = c;
    r.failed_parses = failed_parses;
    r.accuracy = pct(c.tp + c.tn, c.total());
    r.precision_undefined = c.tp + c.fp == 0;
    r.recall_undefined = c.tp + c.fn == 0;
    r.precision = r.precision_undefined ? 0.0 : pct(c.tp, c.tp + c.fp);
    r.recall = r.recall_undefined ? 0.0 : pct(c.tp, c.tp + c.fn);
    r.f1 = harmonic(r.precision, r.recall);
    return r;
}

BinaryReport binary_metrics(std::span<const BinaryPrediction> predictions) {
    if (predictions.empty()) throw MetricsError("binary_metrics: no predictions");
    ConfusionCounts c;
    std::size_t failed = 0;
    for (const auto& p : predictions) {
        bool predicted = p.predicted ? *p.predicted : !p.truth;
        if (!p.predicted) ++failed;
        if (predicted && p.truth) ++c.tp;
        else if (predicted) ++c.fp;
        else if (p.truth) ++c.fn;
        else ++c.tn;
    }
    return binary_metrics_from_counts(c, failed);
}

MultiClassReport multiclass_f1(std::span<const LabelPrediction> predictions) {
    if (predictions.empty()) throw MetricsError("multiclass_f1: no predictions");
    struct Tally {
        std::size_t tp = 0, fp = 0, fn = 0;
    };
    std::map<std::string, Tally> tally;
    std::map<std::string, std::size_t> support;
    std::size_t correct = 0, failed = 0;
    for (const auto& p : predictions) {
        ++support[p.truth];
        tally[p.truth];
        if (!p.predicted) {
            ++failed;
            ++tally[p.truth].fn;
            continue;
        }
        if (*p.predicted == p.truth) {
            ++correct;
            ++tally[p.truth].tp;
        } else {
            ++tally[*p.predicted].fp;
            ++tally[p.truth].fn;
        }
    }

    MultiClassReport r;
    r.predictions = predictions.size();
    r.failed_parses = failed;
    r.accuracy = pct(correct, predictions.size());

    std::size_t tp = 0, fp = 0, fn = 0;
    double macro_sum = 0.0, weighted_sum = 0.0;
    for (const auto& [label, t] : tally) {
        LabelScores s;
        s.support = support.count(label) ? support.at(label) : 0;
        s.precision = t.tp + t.fp ? pct(t.tp, t.tp + t.fp) : 0.0;
        s.recall = t.tp + t.fn ? pct(t.tp, t.tp + t.fn) : 0.0;
        s.f1 = harmonic(s.precision, s.recall);
        macro_sum += s.f1;
        weighted_sum += static_cast<double>(s.support) * s.f1;
        tp += t.tp;
        fp += t.fp;
        fn += t.fn;
        r.per_label.emplace(label, s);
    }
    fp += failed;  // the reserved label's false positives
    r.macro_f1 = macro_sum / static_cast<double>(tally.size());
    r.weighted_f1 = weighted_sum / static_cast<double>(predictions.size());
    r.micro_f1 = pct(2 * tp, 2 * tp + fp + fn);
    return r;
}

nlohmann::ordered_json BinaryReport::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = "binary";
    j["accuracy"] = accuracy;
    j["precision"] = precision;
    j["recall"] = recall;
    j["f1"] = f1;
    j["counts"] = counts_json(counts);
    j["failed_parses"] = failed_parses;
    j["precision_undefined"] = precision_undefined;
    j["recall_undefined"] = recall_undefined;
    return j;
}

nlohmann::ordered_json MultiClassReport::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = "multiclass";
    j["weighted_f1"] = weighted_f1;
    j["macro_f1"] = macro_f1;
    j["micro_f1"] = micro_f1;
    j["accuracy"] = accuracy;
    j["predictions"] = predictions;
    j["failed_parses"] = failed_parses;
    nlohmann::ordered_json labels = nlohmann::ordered_json::object();
    for (const auto& [label, s] : per_label)
        labels[label] = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"support", s.support}};
    j["per_label"] = std::move(labels);
    return j;
}

nlohmann::ordered_json ExperimentDescriptor::to_json() const {
    nlohmann::ordered_json j;
    j["task"] = task;
    j["model"] = model;
    j["strategy"] = strategy;
    j["dataset"] = dataset;
    if (n_candidates) j["n_candidates"] = *n_candidates;
    return j;
}

ExperimentDescriptor ExperimentDescriptor::from_json(const nlohmann::json& j) {
    ExperimentDescriptor d;
    d.task = j.value("task", "");
    d.model = j.value("model", "");
    d.strategy = j.value("strategy", "");
    d.dataset = j.value("dataset", "");
    if (j.contains("n_candidates")) d.n_candidates = j.at("n_candidates").get<std::size_t>();
    return d;
}

nlohmann::ordered_json AggregateReport::to_json() const {
    nlohmann::ordered_json j;
    j["descriptor"] = descriptor.to_json();
    auto dump = [](const AnyReport& r) { return std::visit([](const auto& x) { return x.to_json(); }, r); };
    j["mean"] = dump(mean);
    nlohmann::ordered_json reps = nlohmann::ordered_json::array();
    for (const auto& r : repetitions) reps.push_back(dump(r));
    j["repetitions"] = std::move(reps);
    return j;
}

AggregateReport aggregate(std::span<const AnyReport> reports, ExperimentDescriptor descriptor) {
    if (reports.empty()) throw MetricsError("aggregate: no reports");
    const std::size_t kind = reports.front().index();
    for (const auto& r : reports)
        if (r.index() != kind) throw MetricsError("aggregate: mixed binary and multiclass reports");

    AggregateReport out;
    out.descriptor = std::move(descriptor);
    out.repetitions.assign(reports.begin(), reports.end());
    const double n = static_cast<double>(reports.size());

    if (kind == 0) {
        BinaryReport m;
        for (const auto& any : reports) {
            const auto& r = std::get<BinaryReport>(any);
            m.accuracy += r.accuracy;
            m.precision += r.precision;
            m.recall += r.recall;
            m.f1 += r.f1;
            m.counts.tp += r.counts.tp;
            m.counts.fp += r.counts.fp;
            m.counts.fn += r.counts.fn;
            m.counts.tn += r.counts.tn;
            m.failed_parses += r.failed_parses;
            m.precision_undefined = m.precision_undefined || r.precision_undefined;
            m.recall_undefined = m.recall_undefined || r.recall_undefined;
        }
        m.accuracy /= n;
        m.precision /= n;
        m.recall /= n;
        m.f1 /= n;
        out.mean = m;
    } else {
        MultiClassReport m;
        for (const auto& any : reports) {
            const auto& r = std::get<MultiClassReport>(any);
            m.weighted_f1 += r.weighted_f1;
            m.macro_f1 += r.macro_f1;
            m.micro_f1 += r.micro_f1;
            m.accuracy += r.accuracy;
            m.predictions += r.predictions;
            m.failed_parses += r.failed_parses;
        }
        m.weighted_f1 /= n;
        m.macro_f1 /= n;
        m.micro_f1 /= n;
        m.accuracy /= n;
        out.mean = m;
    }
    if (reports.size() == 1) out.mean = reports.front();
    return out;
}

std::string format_percent(double value) {
    // The nudge keeps values such as 66.665 (stored as 66.66499...) rounding up.
    double scaled = std::floor(value * 100.0 + 0.5 + 1e-9 * std::max(1.0, std::abs(value)));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", scaled / 100.0);
    return buf;
}

} // namespace authorbench
