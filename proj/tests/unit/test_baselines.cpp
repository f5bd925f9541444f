#include <doctest.h>

#include "authorbench/baselines.hpp"
#include "authorbench/error.hpp"
#include "authorbench/fixtures.hpp"
#include "authorbench/rng.hpp"
#include "authorbench/sampling.hpp"
#include "test_support.hpp"

#include <cmath>
#include <map>

using namespace authorbench;

namespace {

/// Hands back fixed vectors keyed by text.
class TableEmbedding : public EmbeddingProvider {
public:
    explicit TableEmbedding(std::map<std::string, std::vector<double>> table) : table_(std::move(table)) {}
    std::vector<double> embed(std::string_view text) override {
        ++calls;
        return table_.at(std::string(text));
    }
    std::string name() const override { return "table"; }
    std::size_t calls = 0;

private:
    std::map<std::string, std::vector<double>> table_;
};

AttributionInstance instance_of(const std::string& query, const std::vector<std::string>& examples) {
    AttributionInstance inst;
    inst.instance_id = "toy";
    inst.query = {"q", "c1", query, {}};
    inst.true_author = "c1";
    for (std::size_t i = 0; i < examples.size(); ++i) {
        auto id = "c" + std::to_string(i + 1);
        inst.candidates.push_back({id, {"e" + std::to_string(i + 1), id, examples[i], {}}});
    }
    return inst;
}

double dense_cosine_oracle(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return na == 0 || nb == 0 ? 0.0 : dot / std::sqrt(na * nb);
}

} // namespace

TEST_CASE("idf values") {
    std::vector<std::string> texts{"shared alpha", "shared beta"};
    auto m = fit_tfidf(texts);
    CHECK(m.fitted_on == 2);
    REQUIRE(m.vocabulary.size() == 3);
    CHECK(m.idf[m.vocabulary.at("shared")] == doctest::Approx(1.0));
    CHECK(m.idf[m.vocabulary.at("alpha")] == doctest::Approx(std::log(1.5) + 1.0));
    CHECK(m.idf[m.vocabulary.at("alpha")] == doctest::Approx(1.405).epsilon(0.001));
    // dense sorted indices
    std::size_t expect = 0;
    for (const auto& [term, idx] : m.vocabulary) CHECK(idx == expect++);
    CHECK_THROWS(fit_tfidf(std::vector<std::string>{}));
    CHECK_THROWS(fit_tfidf(std::vector<std::string>{"", "  !! "}));
}

TEST_CASE("cosine examples") {
    std::vector<double> a{1, 1}, b{1, 0}, z{0, 0};
    CHECK(cosine(std::span<const double>(a), std::span<const double>(b)) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(cosine(std::span<const double>(a), std::span<const double>(a)) == doctest::Approx(1.0));
    CHECK(cosine(std::span<const double>(a), std::span<const double>(z)) == 0.0);
    std::vector<double> c{0, 0, 1}, d{1, 1, 0};
    CHECK(cosine(std::span<const double>(c), std::span<const double>(d)) == 0.0);
    CHECK_THROWS(cosine(std::span<const double>(a), std::span<const double>(c)));

    std::vector<std::string> texts{"alpha beta", "alpha"};
    auto m = fit_tfidf(texts);
    auto va = m.transform("alpha beta");
    CHECK(va.norm == doctest::Approx(1.0));
    CHECK(cosine(va, va) == doctest::Approx(1.0));
    CHECK(cosine(m.transform("alpha"), m.transform("beta")) == 0.0);
    auto oov = m.transform("gamma delta");
    CHECK(oov.norm == 0.0);
    CHECK(oov.weights.empty());
    CHECK(cosine(oov, va) == 0.0);
}

TEST_CASE("cosine symmetry and scale invariance against a dense oracle") {
    SplitMix64 rng(5);
    for (int i = 0; i < 500; ++i) {
        const auto n = 1 + rng.uniform(8);
        std::vector<double> a(n), b(n);
        for (auto& x : a) x = rng.uniform_real();
        for (auto& x : b) x = rng.uniform_real();
        auto ab = cosine(std::span<const double>(a), std::span<const double>(b));
        auto ba = cosine(std::span<const double>(b), std::span<const double>(a));
        CHECK(ab == ba);
        CHECK(ab == doctest::Approx(dense_cosine_oracle(a, b)));
        auto scaled = a;
        const double c = 0.1 + rng.uniform_real() * 10;
        for (auto& x : scaled) x *= c;
        CHECK(cosine(std::span<const double>(scaled), std::span<const double>(b)) == doctest::Approx(ab));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0 + 1e-12);
    }
}

TEST_CASE("tfidf verification") {
    auto same = tfidf_verify("the cat sat", "the cat sat");
    CHECK(same.same_author);
    CHECK(same.similarity == doctest::Approx(1.0));
    auto diff = tfidf_verify("apples pears", "trains buses");
    CHECK_FALSE(diff.same_author);
    CHECK(diff.similarity == 0.0);
    auto s1 = tfidf_verify("one two three", "two three four");
    auto s2 = tfidf_verify("two three four", "one two three");
    CHECK(s1.similarity == s2.similarity);
    CHECK(s1.same_author == s2.same_author);
    // the boundary counts as same author
    CHECK(tfidf_verify("one two three", "two three four", s1.similarity).same_author);
    auto empty = tfidf_verify("!!!", "words here");
    CHECK(empty.no_signal);
    CHECK_FALSE(empty.same_author);
}

TEST_CASE("tfidf attribution") {
    auto inst = instance_of("red green blue", {"cars trucks", "red green blue", "boats planes"});
    auto r = tfidf_attribute(inst);
    CHECK(r.predicted == "c2");
    CHECK_FALSE(r.no_signal);
    REQUIRE(r.scores.size() == 3);
    CHECK(r.scores[0].first == "c1");

    auto none = tfidf_attribute(instance_of("red green", {"cars trucks", "boats planes", "bikes"}));
    CHECK(none.predicted == "c1");
    CHECK(none.no_signal);
    for (const auto& [id, s] : none.scores) CHECK(s == 0.0);
}

TEST_CASE("self attribution") {
    auto corpus = build_synthetic_corpus(12, 3, 4);
    SamplePlan plan;
    plan.task = Task::attribution;
    plan.n_candidates = 10;
    plan.seed = 8;
    plan.corpus_name = "synthetic";
    auto s = sample_attribution(corpus, plan);
    for (auto inst : s.repetitions[0]) {
        const auto pick = inst.candidates.size() / 2;
        inst.query.text = inst.candidates[pick].document.text;
        CHECK(tfidf_attribute(inst).predicted == inst.candidates[pick].author_id);
    }
}

TEST_CASE("hand-computed cosines 0.2, 0.9, 0.4 pick candidate two") {
    // 5-term space, unit query along e1.
    const double c1 = 0.2, c2 = 0.9, c3 = 0.4;
    std::map<std::string, std::vector<double>> table{
        {"query", {1, 0, 0, 0, 0}},
        {"one", {c1, std::sqrt(1 - c1 * c1), 0, 0, 0}},
        {"two", {c2, 0, std::sqrt(1 - c2 * c2), 0, 0}},
        {"three", {c3, 0, 0, std::sqrt(1 - c3 * c3), 0}},
    };
    TableEmbedding provider(table);
    auto r = embedding_attribute(instance_of("query", {"one", "two", "three"}), provider);
    CHECK(r.predicted == "c2");
    REQUIRE(r.scores.size() == 3);
    CHECK(r.scores[0].second == doctest::Approx(0.2));
    CHECK(r.scores[1].second == doctest::Approx(0.9));
    CHECK(r.scores[2].second == doctest::Approx(0.4));
}

TEST_CASE("embedding verification") {
    TableEmbedding same({{"a", {1, 2, 3}}, {"b", {1, 2, 3}}});
    auto r = embedding_verify("a", "b", same);
    CHECK(r.same_author);
    CHECK(r.similarity == doctest::Approx(1.0));
    TableEmbedding orth({{"a", {1, 0}}, {"b", {0, 1}}});
    CHECK_FALSE(embedding_verify("a", "b", orth).same_author);
    TableEmbedding mismatch({{"a", {1, 0}}, {"b", {0, 1, 0}}});
    CHECK_THROWS_AS(embedding_verify("a", "b", mismatch), ProviderError);
}

TEST_CASE("mock embedding modes") {
    MockEmbeddingProvider hashed(MockEmbeddingProvider::Mode::hashed);
    auto a = hashed.embed("first text");
    CHECK(a.size() == 64);
    CHECK(a == hashed.embed("first text"));
    CHECK(std::abs(cosine(std::span<const double>(a), std::span<const double>(hashed.embed("other")))) < 0.5);

    MockEmbeddingProvider high(MockEmbeddingProvider::Mode::high_similarity);
    SplitMix64 rng(1);
    for (int i = 0; i < 50; ++i) {
        auto x = high.embed("text " + std::to_string(rng.next()));
        auto y = high.embed("text " + std::to_string(rng.next()));
        CHECK(cosine(std::span<const double>(x), std::span<const double>(y)) > 0.9);
    }
    MockEmbeddingProvider constant(MockEmbeddingProvider::Mode::constant, 8);
    CHECK(constant.embed("x") == std::vector<double>(8, 1.0));
    CHECK(MockEmbeddingProvider::mode_from_string("high_similarity") == MockEmbeddingProvider::Mode::high_similarity);
    CHECK_THROWS(MockEmbeddingProvider::mode_from_string("bogus"));
}

TEST_CASE("embedding cache and replay") {
    testsupport::TempDir dir("emb");
    auto upstream = std::make_shared<TableEmbedding>(std::map<std::string, std::vector<double>>{{"a", {0.5, 0.25}}});
    {
        CachedEmbeddingProvider cached(upstream, dir.path(), "table");
        CHECK(cached.embed("a") == std::vector<double>{0.5, 0.25});
        CHECK(cached.embed("a") == std::vector<double>{0.5, 0.25});
        CHECK(upstream->calls == 1);
    }
    CachedEmbeddingProvider replay(nullptr, dir.path(), "table");
    CHECK(replay.embed("a") == std::vector<double>{0.5, 0.25});
    CHECK_THROWS_AS(replay.embed("b"), ProviderError);
    CachedEmbeddingProvider other_model(nullptr, dir.path(), "other");
    CHECK_THROWS_AS(other_model.embed("a"), ProviderError);
}

TEST_CASE("tfidf scores are deterministic") {
    auto inst = instance_of("alpha beta gamma alpha", {"alpha delta", "beta gamma", "gamma gamma alpha"});
    auto a = tfidf_attribute(inst);
    auto b = tfidf_attribute(inst);
    CHECK(a.scores == b.scores);
}
