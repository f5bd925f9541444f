#pragma once

#include "authorbench/prompts.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace authorbench {

/// Word lists behind the detectors, loaded from data/lexicons:
///
///   VERSION                 one line, compared by profile_distance
///   modals.txt              closed modal class
///   modal_contractions.txt  "can't:can" lines
///   particles.txt           phrasal-verb particles
///   phrasal_verb_bases.txt  inflected verb forms that head phrasal verbs
///   frequency_top5000.txt   most frequent words; anything else is rare
///   dictionary.txt          known spellings
///   british_variants.txt    accepted non-American spellings
///   number_words.txt        spelled-out quantities
///   prefixes.txt, suffixes.txt  tracked affixes
///   humor_markers.txt       laughter tokens and emoticons
///   sarcasm_markers.txt     ironic set phrases ("yeah right", "/s")
struct LexiconSet {
    std::string version;
    std::unordered_set<std::string> modals;
    std::unordered_map<std::string, std::string> modal_contractions;
    std::unordered_set<std::string> particles;
    std::unordered_set<std::string> phrasal_verbs;
    std::unordered_set<std::string> frequent;
    std::unordered_set<std::string> dictionary;
    std::unordered_set<std::string> british_variants;
    std::unordered_set<std::string> number_words;
    std::vector<std::string> prefixes;  // longest first
    std::vector<std::string> suffixes;  // longest first
    std::unordered_set<std::string> humor_markers;
    std::vector<std::vector<std::string>> sarcasm_phrases;

    /// Dictionary words bucketed by byte length, for edit-distance search.
    std::vector<std::vector<std::string>> dictionary_by_length;

    static LexiconSet load(const std::filesystem::path& dir);
    static const LexiconSet& builtin();

    bool known_spelling(const std::string& lower) const;
};

/// Marks tracked by the punctuation histogram.
const std::vector<std::string>& tracked_punctuation();

struct FeatureProfile {
    std::string lexicon_version;
    std::size_t token_count = 0;
    std::size_t char_count = 0;  // code points

    std::size_t modal_verb_count = 0;
    double modal_verb_rate = 0.0;  // per token
    std::size_t phrasal_verb_count = 0;
    std::map<std::string, std::size_t> punctuation_counts;
    std::map<std::string, double> punctuation_histogram;  // per 1000 chars
    std::size_t rare_word_count = 0;
    double rare_word_rate = 0.0;  // per checked word
    std::map<std::string, std::size_t> affix_counts;  // "un-", "-ness"
    std::size_t quantity_token_count = 0;
    std::size_t typo_count = 0;
    std::size_t misspelling_count = 0;
    std::size_t humor_marker_count = 0;
    std::size_t sarcasm_marker_count = 0;

    std::vector<std::string> misspellings;  // the flagged tokens, in order

    nlohmann::ordered_json to_json() const;
    bool operator==(const FeatureProfile&) const = default;
};

/// Optimal string alignment distance (Levenshtein plus adjacent transposition).
std::size_t osa_distance(std::string_view a, std::string_view b);

/// Detectors:
///  - tokens: whitespace split; edge punctuation stripped (a trailing '%'
///    after a digit is kept). Alphabetic tokens are ASCII letters only.
///    Capitalized tokens that do not start a sentence are treated as names
///    and skipped by the rare-word and spelling checks.
///  - modal verbs: closed class plus negative contractions
///  - phrasal verbs: a listed verb form followed within two tokens by a
///    particle, not crossing clause punctuation
///  - rare words: checked words outside the frequency list
///  - affixes: longest tracked prefix/suffix whose stem is a dictionary word
///  - quantities: numerals, percents, ordinals, and number words
///  - misspellings: checked words not in the dictionary (or British list)
///    within OSA distance 2 of a dictionary word
///  - typos: letter runs of three or more, doubled words, space before or
///    none after , ; : ! ?, doubled , ; or "..", adjacent-letter transpositions
///    of dictionary words, and runs of two or more spaces. Transpositions are
///    also counted as misspellings.
///  - humor: laughter tokens and emoticons. Sarcasm: "?!"/"!?" runs, one- or
///    two-word scare quotes, and listed ironic phrases. Both are surface
///    markers with low recall.
FeatureProfile extract_profile(std::string_view text, const LexiconSet& lexicons = LexiconSet::builtin());

struct ProfileWeights {
    double modal_verbs = 1.0;
    double phrasal_verbs = 1.0;
    double punctuation = 1.0;
    double rare_words = 1.0;
    double affixes = 1.0;
    double quantities = 1.0;
    double typographical_errors = 1.0;
    double misspellings = 1.0;
    double humor = 0.0;
    double sarcasm = 0.0;
};

/// Weighted L1 over per-token rates (per-character for punctuation marks).
double profile_distance(const FeatureProfile& p, const FeatureProfile& q, const ProfileWeights& weights = {});

enum class ClaimKind { none, difference, similarity };
enum class CrosscheckVerdict { consistent, inconsistent, no_claim, unverifiable };

std::string_view to_string(ClaimKind kind);
std::string_view to_string(CrosscheckVerdict verdict);

struct CrosscheckEntry {
    LinguisticFeature feature{};
    std::string evidence;  // the sentence that mentions the feature
    ClaimKind claim = ClaimKind::none;
    bool checkable = true;
    double measure_a = 0.0;
    double measure_b = 0.0;
    bool measured_difference = false;
    CrosscheckVerdict verdict = CrosscheckVerdict::no_claim;
};

struct CrosscheckReport {
    std::vector<CrosscheckEntry> entries;  // feature order

    nlohmann::ordered_json to_json() const;
};

/// Features named in `analysis_text`, the claim each mention makes, and
/// whether the measured profiles agree. Humor and sarcasm are unverifiable.
CrosscheckReport explanation_crosscheck(std::string_view analysis_text, const FeatureProfile& profile_a,
                                        const FeatureProfile& profile_b);

/// Relative gap at or above which two rates count as different.
inline constexpr double kMeasuredDifferenceRatio = 0.25;

} // namespace authorbench
