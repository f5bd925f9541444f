#pragma once

#include "authorbench/sampling.hpp"

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace authorbench {

/// Sparse, L2-normalized. `weights` is sorted by term index; `norm` is the
/// Euclidean norm of `weights` (1, or 0 for a document with no known terms).
struct DocVector {
    std::vector<std::pair<std::size_t, double>> weights;
    double norm = 0.0;
};

struct TfIdfModel {
    std::map<std::string, std::size_t> vocabulary;  // indices are dense in sorted-term order
    std::vector<double> idf;
    std::size_t fitted_on = 0;

    /// Raw term counts times idf, then L2 normalization. Unknown terms are ignored.
    DocVector transform(std::string_view text) const;
};

/// idf(t) = ln((1 + N) / (1 + df(t))) + 1 over tokenize() terms.
TfIdfModel fit_tfidf(std::span<const std::string> texts);

/// dot / (|a| |b|); 0 when either norm is 0.
double cosine(const DocVector& a, const DocVector& b);
double cosine(std::span<const double> a, std::span<const double> b);

struct VerifyResult {
    bool same_author = false;
    double similarity = 0.0;
    bool no_signal = false;  // a zero vector was involved
};

struct AttributionResult {
    std::string predicted;
    std::vector<std::pair<std::string, double>> scores;  // candidate order
    bool no_signal = false;                               // every score was 0
};

/// Fits on the two texts alone; similarity >= threshold means same author.
VerifyResult tfidf_verify(std::string_view text_a, std::string_view text_b, double threshold = 0.5);

/// Fits on the query plus the candidate examples; argmax cosine, ties to the
/// earliest candidate.
AttributionResult tfidf_attribute(const AttributionInstance& instance);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<double> embed(std::string_view text) = 0;
    virtual std::string name() const = 0;
};

/// Deterministic vectors derived from SHA-256 of the text.
///  - hashed: components uniform in [-1, 1), unrelated texts near-orthogonal
///  - high_similarity: 1 + 0.3 * u per component, so any two texts have
///    cosine well above 0.9
///  - constant: every text maps to the all-ones vector
class MockEmbeddingProvider : public EmbeddingProvider {
public:
    enum class Mode { hashed, high_similarity, constant };

    explicit MockEmbeddingProvider(Mode mode = Mode::hashed, std::size_t dimension = 64)
        : mode_(mode), dimension_(dimension) {}

    std::vector<double> embed(std::string_view text) override;
    std::string name() const override;

    static Mode mode_from_string(std::string_view name);

private:
    Mode mode_;
    std::size_t dimension_;
};

/// POSTs {"model", "input"} to <endpoint>/embeddings.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    struct Settings {
        std::string endpoint = "https://api.openai.com/v1";
        std::string model;
        std::string api_key_env = "LLM_API_KEY";
        std::chrono::seconds timeout{120};
    };

    explicit HttpEmbeddingProvider(Settings settings);

    std::vector<double> embed(std::string_view text) override;
    std::string name() const override { return "http:" + settings_.model; }

private:
    Settings settings_;
    std::string api_key_;
};

/// Content-addressed vector store in front of an optional upstream provider.
/// Without upstream it is a replay provider: misses throw.
class CachedEmbeddingProvider : public EmbeddingProvider {
public:
    /// `model_key` namespaces the store so vectors from different encoders never mix.
    CachedEmbeddingProvider(std::shared_ptr<EmbeddingProvider> upstream, std::filesystem::path dir,
                            std::string model_key);

    std::vector<double> embed(std::string_view text) override;
    std::string name() const override;

private:
    std::shared_ptr<EmbeddingProvider> upstream_;
    std::filesystem::path dir_;
    std::string model_key_;
    std::mutex mutex_;
    std::map<std::string, std::vector<double>> memory_;
};

VerifyResult embedding_verify(std::string_view text_a, std::string_view text_b, EmbeddingProvider& provider,
                              double threshold = 0.5);
AttributionResult embedding_attribute(const AttributionInstance& instance, EmbeddingProvider& provider);

} // namespace authorbench
