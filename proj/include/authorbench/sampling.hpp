#pragma once

#include "authorbench/corpus.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace authorbench {

enum class Task { verification, attribution };

std::string_view to_string(Task task);
Task task_from_string(std::string_view name);

struct SamplePlan {
    Task task = Task::verification;
    std::size_t n_pairs = 30;       // verification only; must be even
    std::size_t n_candidates = 10;  // attribution only; also the query count
    std::size_t repetitions = 3;
    std::uint64_t seed = 0;
    std::string corpus_name;

    void validate() const;
    nlohmann::ordered_json to_json() const;
    static SamplePlan from_json(const nlohmann::json& j);
};

struct VerificationInstance {
    std::string instance_id;
    Document text_a;
    Document text_b;
    bool same_author = false;
};

struct Candidate {
    std::string author_id;
    Document document;
};

struct AttributionInstance {
    std::string instance_id;
    Document query;
    std::vector<Candidate> candidates;  // presentation order
    std::string true_author;

    std::vector<std::string> candidate_ids() const;
};

template <typename Instance>
struct SampleSet {
    SamplePlan plan;
    std::vector<std::vector<Instance>> repetitions;
    std::vector<std::string> warnings;
};

using VerificationSample = SampleSet<VerificationInstance>;
using AttributionSample = SampleSet<AttributionInstance>;

/// "<corpus>-<task>-r<rep>-<ordinal>", rep and ordinal 1-based, ordinal
/// zero-padded to three digits so lexical order is presentation order.
std::string make_instance_id(std::string_view corpus, Task task, std::size_t rep, std::size_t ordinal);

/// Each repetition draws from SplitMix64::for_stream(seed, rep). Authors are
/// shuffled; the first n/2 authors with two or more documents each give a
/// positive pair, the next n distinct authors give n/2 negative pairs, and
/// the pairs are shuffled into presentation order.
VerificationSample sample_verification(const Corpus& corpus, const SamplePlan& plan);

/// Each repetition picks n_candidates authors with two or more documents.
/// Every picked author contributes one query (so queries have pairwise
/// distinct authors) and one example document for each instance it appears in
/// as a candidate. When an author lacks enough spare documents, its example
/// documents are reused across instances and a warning is recorded; an
/// author's own query is never shown as a candidate example.
AttributionSample sample_attribution(const Corpus& corpus, const SamplePlan& plan);

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;

    bool ok() const { return violations.empty(); }
};

ValidationReport validate_sample(const VerificationSample& sample, const Corpus& corpus);
ValidationReport validate_sample(const AttributionSample& sample, const Corpus& corpus);

nlohmann::ordered_json to_json(const VerificationSample& sample);
nlohmann::ordered_json to_json(const AttributionSample& sample);
std::string serialize_sample(const VerificationSample& sample);
std::string serialize_sample(const AttributionSample& sample);
VerificationSample parse_verification_sample(std::string_view contents);
AttributionSample parse_attribution_sample(std::string_view contents);
Task sample_task(std::string_view contents);

} // namespace authorbench
