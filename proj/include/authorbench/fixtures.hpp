#pragma once

#include "authorbench/corpus.hpp"
#include "authorbench/llm_client.hpp"
#include "authorbench/mock_script.hpp"
#include "authorbench/sampling.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace authorbench {

/// Misspelling habits handed to synthetic authors, one per author in order.
const std::vector<std::string>& synthetic_misspellings();

/// Authors "author_01", ... each get 16 core content words used in every
/// document, 6 optional words of which each document uses 3, one modal verb,
/// one misspelling, and a punctuation habit. Content words are unique to an
/// author; the only words shared across authors are "the", "and", and
/// possibly the modal or misspelling. Documents are four sentences of six
/// words. Deterministic under `seed`.
Corpus build_synthetic_corpus(std::size_t n_authors, std::size_t docs_per_author, std::uint64_t seed);

/// Type-level Jaccard overlap of tokenize() vocabularies.
double vocabulary_overlap(std::string_view a, std::string_view b);

/// Scripted JSON reply carrying `answer`.
std::string scripted_reply(const Answer& answer, std::string_view analysis = "Scripted response.");

/// One "instance:<id>" rule per id answering its truth. Every id in
/// `instance_ids` must have an entry in `truths`.
MockScript oracle_mock(const std::map<std::string, Answer>& truths, std::span<const std::string> instance_ids);
MockScript oracle_mock(const VerificationSample& sample);
MockScript oracle_mock(const AttributionSample& sample);

/// Every request gets the same well-formed reply with `answer`.
MockScript adversarial_mock(const Answer& answer);
/// Every request gets `text`, which contains no JSON object.
MockScript malformed_mock(std::string text = "I am unable to decide which author wrote this.");

} // namespace authorbench
