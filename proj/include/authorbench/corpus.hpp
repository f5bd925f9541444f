#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace authorbench {

struct Document {
    std::string doc_id;
    std::string author_id;
    std::string text;
    std::map<std::string, std::string> meta;

    bool operator==(const Document&) const = default;
};

struct Corpus {
    std::string name;
    std::vector<Document> documents;

    /// Author IDs in order of first appearance.
    std::vector<std::string> authors() const;

    /// Documents grouped by author, groups in order of first appearance.
    std::vector<std::pair<std::string, std::vector<const Document*>>> by_author() const;

    const Document* find(std::string_view doc_id) const;

    bool operator==(const Corpus&) const = default;
};

enum class CorpusFormat { jsonl, directory };

CorpusFormat corpus_format_from_string(std::string_view name);

/// JSONL: one {doc_id?, author_id, text, meta?} object per line.
/// Directory: <root>/<author_id>/<doc>.txt, visited in sorted order.
/// Missing doc_ids become "d" + 16 hex digits of sha256(author_id \x1f ordinal).
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format, std::string name = {});

Corpus parse_corpus_jsonl(std::string_view contents, std::string name);
std::string serialize_corpus(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

nlohmann::ordered_json document_to_json(const Document& doc);
Document document_from_json(const nlohmann::json& j);

/// Drops later exact duplicates of normalized text, then authors left with
/// fewer than `min_texts_per_author` documents. Input order is preserved.
Corpus dedup_and_filter(const Corpus& corpus, std::size_t min_texts_per_author);

class LanguageClassifier {
public:
    virtual ~LanguageClassifier() = default;
    virtual bool supports(std::string_view language) const = 0;
    /// Language code for `text`, or "und" when undetermined.
    virtual std::string classify(std::string_view text) const = 0;
};

/// English detector by function-word coverage. Texts with at least
/// `min_tokens` whitespace tokens are English when at least `min_coverage` of
/// their tokens are function words; shorter texts are English when at least
/// `min_ascii_share` of their non-space characters are ASCII letters or
/// punctuation.
class FunctionWordClassifier : public LanguageClassifier {
public:
    struct Thresholds {
        double min_coverage = 0.10;
        std::size_t min_tokens = 5;
        double min_ascii_share = 0.80;
    };

    FunctionWordClassifier() = default;
    explicit FunctionWordClassifier(Thresholds thresholds) : thresholds_(thresholds) {}

    bool supports(std::string_view language) const override;
    std::string classify(std::string_view text) const override;

    /// Fraction of whitespace tokens (edge punctuation stripped, lowercased)
    /// that are English function words.
    static double coverage(std::string_view text);
    static const std::vector<std::string_view>& function_words();

private:
    Thresholds thresholds_;
};

Corpus filter_language(const Corpus& corpus, std::string_view target,
                       const LanguageClassifier& classifier);
Corpus filter_language(const Corpus& corpus, std::string_view target);

struct CorpusStats {
    std::size_t author_count = 0;
    std::size_t document_count = 0;
    double mean_tokens_per_document = 0.0;
    /// documents-per-author -> number of authors
    std::map<std::size_t, std::size_t> docs_per_author;

    nlohmann::ordered_json to_json() const;
};

CorpusStats corpus_stats(const Corpus& corpus);

} // namespace authorbench
