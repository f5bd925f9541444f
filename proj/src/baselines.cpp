#include "authorbench/baselines.hpp"

#include "authorbench/error.hpp"
#include "authorbench/rng.hpp"
#include "authorbench/text.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <set>
#include <unordered_map>

namespace authorbench {

TfIdfModel fit_tfidf(std::span<const std::string> texts) {
    std::map<std::string, std::size_t> df;
    bool any_terms = false;
    for (const auto& text : texts) {
        const auto tokens = tokenize(text);
        any_terms = any_terms || !tokens.empty();
        for (const auto& term : std::set<std::string>(tokens.begin(), tokens.end())) ++df[term];
    }
    if (!any_terms) throw Error("fit_tfidf: no terms in any input text");
    TfIdfModel model;
    model.fitted_on = texts.size();
    const double n = static_cast<double>(texts.size());
    model.idf.reserve(df.size());
    for (const auto& [term, count] : df) {
        model.vocabulary.emplace(term, model.idf.size());
        model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    return model;
}

DocVector TfIdfModel::transform(std::string_view text) const {
    std::map<std::size_t, double> counts;
    for (const auto& term : tokenize(text)) {
        if (auto it = vocabulary.find(term); it != vocabulary.end()) counts[it->second] += 1.0;
    }
    DocVector v;
    double sq = 0.0;
    for (const auto& [index, count] : counts) {
        const double w = count * idf[index];
        v.weights.emplace_back(index, w);
        sq += w * w;
    }
    if (sq > 0.0) {
        const double norm = std::sqrt(sq);
        sq = 0.0;
        for (auto& [index, w] : v.weights) {
            w /= norm;
            sq += w * w;
        }
        v.norm = std::sqrt(sq);
    }
    return v;
}

double cosine(const DocVector& a, const DocVector& b) {
    if (a.norm == 0.0 || b.norm == 0.0) return 0.0;
    double dot = 0.0;
    auto ia = a.weights.begin();
    auto ib = b.weights.begin();
    while (ia != a.weights.end() && ib != b.weights.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            dot += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    return dot / (a.norm * b.norm);
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ProviderError(ProviderError::Kind::invalid, "embedding dimension mismatch: " +
                                                              std::to_string(a.size()) + " vs " +
                                                              std::to_string(b.size()));
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

VerifyResult tfidf_verify(std::string_view text_a, std::string_view text_b, double threshold) {
    const std::string texts[] = {std::string(text_a), std::string(text_b)};
    VerifyResult out;
    TfIdfModel model;
    try {
        model = fit_tfidf(texts);
    } catch (const Error&) {
        out.no_signal = true;
        return out;
    }
    const DocVector a = model.transform(texts[0]);
    const DocVector b = model.transform(texts[1]);
    out.no_signal = a.norm == 0.0 || b.norm == 0.0;
    out.similarity = cosine(a, b);
    out.same_author = out.similarity >= threshold;
    return out;
}

namespace {

AttributionResult argmax(std::vector<std::pair<std::string, double>> scores) {
    AttributionResult out;
    double best = -std::numeric_limits<double>::infinity();
    bool all_zero = true;
    for (const auto& [author, score] : scores) {
        if (score != 0.0) all_zero = false;
        if (score > best) {
            best = score;
            out.predicted = author;
        }
    }
    out.no_signal = all_zero;
    out.scores = std::move(scores);
    return out;
}

} // namespace

AttributionResult tfidf_attribute(const AttributionInstance& instance) {
    if (instance.candidates.empty()) throw Error(instance.instance_id + ": no candidates");
    std::vector<std::string> texts;
    texts.reserve(instance.candidates.size() + 1);
    texts.push_back(instance.query.text);
    for (const auto& c : instance.candidates) texts.push_back(c.document.text);

    std::vector<std::pair<std::string, double>> scores;
    TfIdfModel model;
    try {
        model = fit_tfidf(texts);
    } catch (const Error&) {
        for (const auto& c : instance.candidates) scores.emplace_back(c.author_id, 0.0);
        return argmax(std::move(scores));
    }
    const DocVector query = model.transform(texts[0]);
    for (std::size_t i = 0; i < instance.candidates.size(); ++i) {
        scores.emplace_back(instance.candidates[i].author_id, cosine(query, model.transform(texts[i + 1])));
    }
    return argmax(std::move(scores));
}

// ---------------------------------------------------------------------------
// Embedding pathway

std::vector<double> MockEmbeddingProvider::embed(std::string_view text) {
    std::vector<double> v(dimension_, 1.0);
    if (mode_ == Mode::constant) return v;
    const std::string digest = sha256_hex(text);
    SplitMix64 rng(std::strtoull(digest.substr(0, 16).c_str(), nullptr, 16));
    for (auto& x : v) {
        const double u = 2.0 * rng.uniform_real() - 1.0;
        x = mode_ == Mode::hashed ? u : 1.0 + 0.3 * u;
    }
    return v;
}

std::string MockEmbeddingProvider::name() const {
    switch (mode_) {
    case Mode::hashed: return "mock:hashed";
    case Mode::high_similarity: return "mock:high_similarity";
    case Mode::constant: return "mock:constant";
    }
    return "mock";
}

MockEmbeddingProvider::Mode MockEmbeddingProvider::mode_from_string(std::string_view name) {
    if (name == "hashed") return Mode::hashed;
    if (name == "high_similarity") return Mode::high_similarity;
    if (name == "constant") return Mode::constant;
    throw ConfigError("unknown mock embedding mode '" + std::string(name) + "'");
}

CachedEmbeddingProvider::CachedEmbeddingProvider(std::shared_ptr<EmbeddingProvider> upstream,
                                                 std::filesystem::path dir, std::string model_key)
    : upstream_(std::move(upstream)), dir_(std::move(dir)), model_key_(std::move(model_key)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create embedding cache " + dir_.string());
}

std::string CachedEmbeddingProvider::name() const {
    return upstream_ ? "cached:" + upstream_->name() : "replay:" + model_key_;
}

std::vector<double> CachedEmbeddingProvider::embed(std::string_view text) {
    std::string key_material = model_key_;
    key_material.push_back('\x1f');
    key_material += text;
    const std::string key = sha256_hex(key_material);
    const auto path = dir_ / (key + ".json");
    {
        std::lock_guard lock(mutex_);
        if (auto it = memory_.find(key); it != memory_.end()) return it->second;
        if (std::filesystem::exists(path)) {
            auto v = nlohmann::json::parse(read_file(path)).at("vector").get<std::vector<double>>();
            memory_.emplace(key, v);
            return v;
        }
    }
    if (!upstream_) {
        throw ProviderError(ProviderError::Kind::cache_miss, "embedding replay cache miss (" + key + ")");
    }
    auto v = upstream_->embed(text);
    nlohmann::ordered_json j;
    j["model"] = model_key_;
    j["vector"] = v;
    std::lock_guard lock(mutex_);
    write_file(dir_ / (key + ".json.tmp"), j.dump() + "\n");
    std::filesystem::rename(dir_ / (key + ".json.tmp"), path);
    memory_.emplace(key, v);
    return v;
}

VerifyResult embedding_verify(std::string_view text_a, std::string_view text_b, EmbeddingProvider& provider,
                              double threshold) {
    const auto a = provider.embed(text_a);
    const auto b = provider.embed(text_b);
    VerifyResult out;
    out.similarity = cosine(a, b);
    out.same_author = out.similarity >= threshold;
    return out;
}

AttributionResult embedding_attribute(const AttributionInstance& instance, EmbeddingProvider& provider) {
    if (instance.candidates.empty()) throw Error(instance.instance_id + ": no candidates");
    const auto query = provider.embed(instance.query.text);
    std::vector<std::pair<std::string, double>> scores;
    for (const auto& c : instance.candidates) {
        scores.emplace_back(c.author_id, cosine(query, provider.embed(c.document.text)));
    }
    return argmax(std::move(scores));
}

} // namespace authorbench
