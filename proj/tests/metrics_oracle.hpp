#pragma once

// Naive recount of the metric definitions, written without the library's
// helpers, for equivalence checks.

#include "authorbench/metrics.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace testsupport {

struct NaiveBinary {
    double accuracy, precision, recall, f1;
    std::size_t tp, fp, fn, tn;
};

inline NaiveBinary naive_binary(const std::vector<authorbench::BinaryPrediction>& preds) {
    auto guess = [](const authorbench::BinaryPrediction& p) {
        return p.predicted.has_value() ? *p.predicted : !p.truth;
    };
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (const auto& p : preds) tp += guess(p) && p.truth;
    for (const auto& p : preds) fp += guess(p) && !p.truth;
    for (const auto& p : preds) fn += !guess(p) && p.truth;
    for (const auto& p : preds) tn += !guess(p) && !p.truth;
    NaiveBinary r{};
    r.tp = tp;
    r.fp = fp;
    r.fn = fn;
    r.tn = tn;
    const double n = static_cast<double>(preds.size());
    r.accuracy = 100.0 * static_cast<double>(tp + tn) / n;
    r.precision = tp + fp == 0 ? 0.0 : 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp);
    r.recall = tp + fn == 0 ? 0.0 : 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn);
    r.f1 = r.precision + r.recall == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

struct NaiveMulti {
    double micro, macro, weighted, accuracy;
};

inline NaiveMulti naive_multiclass(const std::vector<authorbench::LabelPrediction>& preds) {
    std::set<std::string> universe;
    for (const auto& p : preds) {
        universe.insert(p.truth);
        if (p.predicted) universe.insert(*p.predicted);
    }
    double macro = 0.0, weighted = 0.0;
    std::size_t all_tp = 0, all_fp = 0, all_fn = 0, correct = 0;
    for (const auto& label : universe) {
        std::size_t tp = 0, fp = 0, fn = 0, support = 0;
        for (const auto& p : preds) {
            const bool said = p.predicted && *p.predicted == label;
            const bool is = p.truth == label;
            tp += said && is;
            fp += said && !is;
            fn += !said && is;
            support += is;
        }
        const double prec = tp + fp == 0 ? 0.0 : 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp);
        const double rec = tp + fn == 0 ? 0.0 : 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn);
        const double f1 = prec + rec == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
        macro += f1;
        weighted += static_cast<double>(support) * f1;
        all_tp += tp;
        all_fp += fp;
        all_fn += fn;
    }
    // a failed parse is a positive prediction of a label outside the universe
    for (const auto& p : preds) all_fp += !p.predicted;
    for (const auto& p : preds) correct += p.predicted && *p.predicted == p.truth;
    const double n = static_cast<double>(preds.size());
    return NaiveMulti{100.0 * static_cast<double>(2 * all_tp) / static_cast<double>(2 * all_tp + all_fp + all_fn),
                      macro / static_cast<double>(universe.size()), weighted / n,
                      100.0 * static_cast<double>(correct) / n};
}

} // namespace testsupport
