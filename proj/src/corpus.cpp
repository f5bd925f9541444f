#include "authorbench/corpus.hpp"

#include "authorbench/error.hpp"
#include "authorbench/text.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace authorbench {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::string> Corpus::authors() const {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& doc : documents) {
        if (seen.insert(doc.author_id).second) out.push_back(doc.author_id);
    }
    return out;
}

std::vector<std::pair<std::string, std::vector<const Document*>>> Corpus::by_author() const {
    std::vector<std::pair<std::string, std::vector<const Document*>>> groups;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& doc : documents) {
        auto [it, inserted] = index.try_emplace(doc.author_id, groups.size());
        if (inserted) groups.emplace_back(doc.author_id, std::vector<const Document*>{});
        groups[it->second].second.push_back(&doc);
    }
    return groups;
}

const Document* Corpus::find(std::string_view doc_id) const {
    for (const auto& doc : documents) {
        if (doc.doc_id == doc_id) return &doc;
    }
    return nullptr;
}

CorpusFormat corpus_format_from_string(std::string_view name) {
    if (name == "jsonl") return CorpusFormat::jsonl;
    if (name == "directory" || name == "dir") return CorpusFormat::directory;
    throw CorpusError("unknown corpus format '" + std::string(name) + "'");
}

ordered_json document_to_json(const Document& doc) {
    ordered_json j;
    j["doc_id"] = doc.doc_id;
    j["author_id"] = doc.author_id;
    j["text"] = doc.text;
    ordered_json meta = ordered_json::object();
    for (const auto& [k, v] : doc.meta) meta[k] = v;
    j["meta"] = std::move(meta);
    return j;
}

namespace {

std::string scalar_to_string(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer()) return std::to_string(value.get<long long>());
    return value.dump();
}

std::string derived_doc_id(std::string_view author_id, std::size_t ordinal) {
    std::string key(author_id);
    key.push_back('\x1f');
    key += std::to_string(ordinal);
    return "d" + sha256_hex(key).substr(0, 16);
}

void check_unique_ids(const Corpus& corpus) {
    std::unordered_set<std::string> ids;
    for (const auto& doc : corpus.documents) {
        if (!ids.insert(doc.doc_id).second) {
            throw CorpusError("duplicate doc_id '" + doc.doc_id + "'");
        }
    }
}

} // namespace

Document document_from_json(const json& j) {
    if (!j.is_object()) throw CorpusError("document record is not a JSON object");
    Document doc;
    const auto author = j.find("author_id");
    if (author == j.end() || author->is_null()) throw CorpusError("record missing author_id");
    doc.author_id = scalar_to_string(*author);
    if (trim(doc.author_id).empty()) throw CorpusError("record has empty author_id");
    const auto text = j.find("text");
    if (text == j.end() || !text->is_string()) throw CorpusError("record missing text");
    doc.text = text->get<std::string>();
    if (trim(doc.text).empty()) throw CorpusError("record has empty text");
    if (const auto id = j.find("doc_id"); id != j.end() && !id->is_null()) {
        doc.doc_id = scalar_to_string(*id);
    }
    if (const auto meta = j.find("meta"); meta != j.end() && meta->is_object()) {
        for (const auto& [k, v] : meta->items()) doc.meta[k] = scalar_to_string(v);
    }
    return doc;
}

Corpus parse_corpus_jsonl(std::string_view contents, std::string name) {
    Corpus corpus;
    corpus.name = std::move(name);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= contents.size()) {
        const std::size_t eol = std::min(contents.find('\n', pos), contents.size());
        std::string_view line = contents.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty()) continue;
        try {
            Document doc = document_from_json(json::parse(line));
            if (doc.doc_id.empty()) doc.doc_id = derived_doc_id(doc.author_id, corpus.documents.size());
            corpus.documents.push_back(std::move(doc));
        } catch (const json::exception& e) {
            throw CorpusError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
        } catch (const CorpusError& e) {
            throw CorpusError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (corpus.documents.empty()) throw CorpusError("empty corpus");
    check_unique_ids(corpus);
    return corpus;
}

namespace {

Corpus load_directory(const std::filesystem::path& root, std::string name) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw CorpusError("not a directory: " + root.string());
    std::vector<fs::path> author_dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) author_dirs.push_back(entry.path());
    }
    std::sort(author_dirs.begin(), author_dirs.end());

    Corpus corpus;
    corpus.name = std::move(name);
    for (const auto& dir : author_dirs) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".txt") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        const std::string author = dir.filename().string();
        for (const auto& file : files) {
            Document doc;
            doc.author_id = author;
            doc.doc_id = author + "/" + file.stem().string();
            try {
                doc.text = read_file(file);
            } catch (const Error& e) {
                throw CorpusError(e.what());
            }
            if (trim(doc.text).empty()) throw CorpusError(file.string() + ": empty text");
            doc.meta["source"] = file.filename().string();
            corpus.documents.push_back(std::move(doc));
        }
    }
    if (corpus.documents.empty()) throw CorpusError("empty corpus");
    return corpus;
}

} // namespace

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format, std::string name) {
    if (!std::filesystem::exists(path)) throw CorpusError("no such path: " + path.string());
    if (name.empty()) name = path.stem().string();
    if (format == CorpusFormat::directory) return load_directory(path, std::move(name));
    std::string contents;
    try {
        contents = read_file(path);
    } catch (const Error& e) {
        throw CorpusError(e.what());
    }
    return parse_corpus_jsonl(contents, std::move(name));
}

std::string serialize_corpus(const Corpus& corpus) {
    std::string out;
    for (const auto& doc : corpus.documents) {
        out += document_to_json(doc).dump(-1, ' ', false, ordered_json::error_handler_t::replace);
        out.push_back('\n');
    }
    return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    write_file(path, serialize_corpus(corpus));
}

Corpus dedup_and_filter(const Corpus& corpus, std::size_t min_texts_per_author) {
    if (min_texts_per_author < 1) throw CorpusError("min_texts_per_author must be >= 1");
    Corpus unique;
    unique.name = corpus.name;
    std::unordered_set<std::string> seen;
    std::unordered_map<std::string, std::size_t> per_author;
    for (const auto& doc : corpus.documents) {
        if (!seen.insert(normalize_for_dedup(doc.text)).second) continue;
        ++per_author[doc.author_id];
        unique.documents.push_back(doc);
    }
    Corpus out;
    out.name = corpus.name;
    for (auto& doc : unique.documents) {
        if (per_author[doc.author_id] >= min_texts_per_author) out.documents.push_back(std::move(doc));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Language identification

namespace {

// 150 English function words: determiners, pronouns, prepositions,
// conjunctions, auxiliaries and modals, and a few function adverbs.
constexpr std::string_view kFunctionWords[] = {
    "a", "an", "the", "this", "that", "these", "those", "my", "your", "his",
    "her", "its", "our", "their", "some", "any", "no", "every", "each", "all",
    "both", "either", "neither", "much", "many", "more", "most", "few", "less", "such",
    "what", "which", "whose",
    "i", "me", "you", "he", "him", "she", "it", "we", "us", "they",
    "them", "myself", "yourself", "himself", "herself", "itself", "ourselves", "themselves", "who", "whom",
    "mine", "yours", "hers", "ours", "theirs", "someone", "something", "anyone", "anything", "nothing",
    "everyone", "everything",
    "of", "in", "to", "for", "with", "on", "at", "from", "by", "about",
    "as", "into", "like", "through", "after", "over", "between", "out", "against", "during",
    "without", "before", "under", "around", "among", "up", "down", "off", "above", "below",
    "near", "since", "until", "within", "toward", "across", "behind", "beyond",
    "and", "but", "or", "nor", "so", "yet", "because", "although", "though", "while",
    "if", "unless", "whether", "than", "when", "where",
    "is", "am", "are", "was", "were", "be", "been", "being", "have", "has",
    "had", "do", "does", "did", "can", "could", "may", "might", "must", "shall",
    "should", "will", "would",
    "not", "there", "here", "then", "also", "very", "how", "why",
};
static_assert(std::size(kFunctionWords) == 150);

bool is_ascii_punct(unsigned char c) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
}

bool is_ascii_letter(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

std::string_view strip_ascii_punct(std::string_view token) {
    while (!token.empty() && is_ascii_punct(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
    while (!token.empty() && is_ascii_punct(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
    return token;
}

const std::unordered_set<std::string_view>& function_word_set() {
    static const std::unordered_set<std::string_view> set(std::begin(kFunctionWords),
                                                          std::end(kFunctionWords));
    return set;
}

} // namespace

const std::vector<std::string_view>& FunctionWordClassifier::function_words() {
    static const std::vector<std::string_view> words(std::begin(kFunctionWords), std::end(kFunctionWords));
    return words;
}

bool FunctionWordClassifier::supports(std::string_view language) const { return language == "en"; }

double FunctionWordClassifier::coverage(std::string_view text) {
    const auto tokens = split_whitespace(text);
    if (tokens.empty()) return 0.0;
    const auto& words = function_word_set();
    std::size_t hits = 0;
    for (auto token : tokens) {
        const std::string lowered = to_lower_ascii(strip_ascii_punct(token));
        if (words.count(lowered) != 0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

std::string FunctionWordClassifier::classify(std::string_view text) const {
    const auto tokens = split_whitespace(text);
    if (tokens.size() >= thresholds_.min_tokens) {
        return coverage(text) >= thresholds_.min_coverage ? "en" : "und";
    }
    // Short texts carry too few tokens for coverage; fall back to script.
    // Multi-byte UTF-8 sequences count once per byte, which only lowers the share.
    std::size_t total = 0;
    std::size_t ascii = 0;
    for (auto token : tokens) {
        for (unsigned char c : token) {
            ++total;
            if (is_ascii_letter(c) || is_ascii_punct(c)) ++ascii;
        }
    }
    if (total == 0) return "und";
    const double share = static_cast<double>(ascii) / static_cast<double>(total);
    return share >= thresholds_.min_ascii_share ? "en" : "und";
}

Corpus filter_language(const Corpus& corpus, std::string_view target,
                       const LanguageClassifier& classifier) {
    if (!classifier.supports(target)) {
        throw CorpusError("language '" + std::string(target) + "' not supported by classifier");
    }
    Corpus out;
    out.name = corpus.name;
    for (const auto& doc : corpus.documents) {
        if (classifier.classify(doc.text) == target) out.documents.push_back(doc);
    }
    return out;
}

Corpus filter_language(const Corpus& corpus, std::string_view target) {
    static const FunctionWordClassifier classifier;
    return filter_language(corpus, target, classifier);
}

// ---------------------------------------------------------------------------

CorpusStats corpus_stats(const Corpus& corpus) {
    CorpusStats stats;
    stats.document_count = corpus.documents.size();
    if (corpus.documents.empty()) return stats;
    std::size_t tokens = 0;
    for (const auto& doc : corpus.documents) tokens += split_whitespace(doc.text).size();
    stats.mean_tokens_per_document = static_cast<double>(tokens) / static_cast<double>(stats.document_count);
    const auto groups = corpus.by_author();
    stats.author_count = groups.size();
    for (const auto& [author, docs] : groups) ++stats.docs_per_author[docs.size()];
    return stats;
}

ordered_json CorpusStats::to_json() const {
    ordered_json j;
    j["author_count"] = author_count;
    j["document_count"] = document_count;
    j["mean_tokens_per_document"] = mean_tokens_per_document;
    ordered_json hist = ordered_json::object();
    for (const auto& [docs, authors] : docs_per_author) hist[std::to_string(docs)] = authors;
    j["docs_per_author"] = std::move(hist);
    return j;
}

} // namespace authorbench
