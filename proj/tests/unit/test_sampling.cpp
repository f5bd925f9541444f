#include <doctest.h>

#include "authorbench/error.hpp"
#include "authorbench/fixtures.hpp"
#include "authorbench/sampling.hpp"

#include <algorithm>
#include <set>

using namespace authorbench;

namespace {

SamplePlan verification_plan(std::size_t pairs, std::uint64_t seed) {
    SamplePlan p;
    p.task = Task::verification;
    p.n_pairs = pairs;
    p.repetitions = 3;
    p.seed = seed;
    p.corpus_name = "synthetic";
    return p;
}

SamplePlan attribution_plan(std::size_t n, std::uint64_t seed) {
    SamplePlan p;
    p.task = Task::attribution;
    p.n_candidates = n;
    p.repetitions = 3;
    p.seed = seed;
    p.corpus_name = "synthetic";
    return p;
}

bool has_violation(const ValidationReport& r, const std::string& needle) {
    for (const auto& v : r.violations)
        if (v.find(needle) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_CASE("instance ids") {
    CHECK(make_instance_id("blog", Task::verification, 2, 7) == "blog-verification-r2-007");
    CHECK(make_instance_id("email", Task::attribution, 1, 12) == "email-attribution-r1-012");
}

TEST_CASE("thirty pairs over three repetitions") {
    auto corpus = build_synthetic_corpus(50, 3, 7);
    auto s = sample_verification(corpus, verification_plan(30, 1));
    REQUIRE(s.repetitions.size() == 3);
    for (const auto& rep : s.repetitions) {
        REQUIRE(rep.size() == 30);
        std::size_t pos = 0;
        std::set<std::string> docs;
        for (const auto& inst : rep) {
            pos += inst.same_author;
            docs.insert(inst.text_a.doc_id);
            docs.insert(inst.text_b.doc_id);
        }
        CHECK(pos == 15);
        CHECK(docs.size() == 60);
    }
    CHECK(validate_sample(s, corpus).ok());
}

TEST_CASE("verification errors name the binding constraint") {
    auto one_author = build_synthetic_corpus(2, 3, 1);
    one_author.documents.erase(std::remove_if(one_author.documents.begin(), one_author.documents.end(),
                                              [](const Document& d) { return d.author_id != "author_01"; }),
                               one_author.documents.end());
    CHECK_THROWS_AS(sample_verification(one_author, verification_plan(2, 0)), SamplingError);

    auto small = build_synthetic_corpus(20, 2, 1);
    CHECK_THROWS_WITH_AS(sample_verification(small, verification_plan(30, 0)),
                         doctest::Contains("insufficient corpus"), SamplingError);
    CHECK_THROWS_AS(sample_verification(small, verification_plan(3, 0)), SamplingError);
    CHECK_THROWS_AS(sample_verification(small, attribution_plan(3, 0)), SamplingError);
}

TEST_CASE("same seed gives byte-identical samples, different seeds differ") {
    auto corpus = build_synthetic_corpus(50, 3, 7);
    auto a = serialize_sample(sample_verification(corpus, verification_plan(30, 5)));
    auto b = serialize_sample(sample_verification(corpus, verification_plan(30, 5)));
    auto c = serialize_sample(sample_verification(corpus, verification_plan(30, 6)));
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("repetitions are distinct draws") {
    auto corpus = build_synthetic_corpus(50, 3, 7);
    auto s = sample_verification(corpus, verification_plan(30, 5));
    CHECK(s.repetitions[0][0].text_a.doc_id != s.repetitions[1][0].text_a.doc_id);
}

TEST_CASE("attribution instances") {
    auto corpus = build_synthetic_corpus(30, 3, 7);
    auto s = sample_attribution(corpus, attribution_plan(10, 2));
    REQUIRE(s.repetitions.size() == 3);
    for (const auto& rep : s.repetitions) {
        std::set<std::string> query_authors;
        for (const auto& inst : rep) {
            CHECK(inst.candidates.size() == 10);
            std::size_t hits = 0;
            std::set<std::string> keys;
            for (const auto& c : inst.candidates) {
                hits += c.author_id == inst.query.author_id;
                keys.insert(c.author_id);
                CHECK(c.document.author_id == c.author_id);
                CHECK(c.document.doc_id != inst.query.doc_id);
            }
            CHECK(hits == 1);
            CHECK(keys.size() == 10);
            CHECK(inst.true_author == inst.query.author_id);
            query_authors.insert(inst.query.author_id);
        }
        CHECK(query_authors.size() == rep.size());
    }
    CHECK(validate_sample(s, corpus).ok());
}

TEST_CASE("attribution shortfall") {
    auto corpus = build_synthetic_corpus(12, 3, 7);
    CHECK_THROWS_WITH_AS(sample_attribution(corpus, attribution_plan(20, 0)), doctest::Contains("have 12"),
                         SamplingError);
}

TEST_CASE("validate_sample flags corruption") {
    auto corpus = build_synthetic_corpus(50, 3, 7);
    auto v = sample_verification(corpus, verification_plan(30, 3));
    v.repetitions[0][0].same_author = !v.repetitions[0][0].same_author;
    auto report = validate_sample(v, corpus);
    CHECK(report.violations.size() == 1);
    CHECK(has_violation(report, "label mismatch"));

    auto a = sample_attribution(corpus, attribution_plan(10, 3));
    auto& inst = a.repetitions[0][0];
    std::size_t first = 0, second = 0;
    bool found = false;
    for (std::size_t i = 0; i < inst.candidates.size() && !found; ++i)
        for (std::size_t j = i + 1; j < inst.candidates.size() && !found; ++j)
            if (inst.candidates[i].author_id != inst.true_author && inst.candidates[j].author_id != inst.true_author) {
                first = i;
                second = j;
                found = true;
            }
    REQUIRE(found);
    inst.candidates[second] = inst.candidates[first];
    auto ar = validate_sample(a, corpus);
    CHECK(ar.violations.size() == 1);
    CHECK(has_violation(ar, "duplicate candidate author"));
}

TEST_CASE("sample files round trip") {
    auto corpus = build_synthetic_corpus(30, 3, 7);
    auto v = sample_verification(corpus, verification_plan(10, 4));
    auto vs = serialize_sample(v);
    CHECK(sample_task(vs) == Task::verification);
    CHECK(serialize_sample(parse_verification_sample(vs)) == vs);
    auto a = sample_attribution(corpus, attribution_plan(10, 4));
    auto as = serialize_sample(a);
    CHECK(sample_task(as) == Task::attribution);
    CHECK(serialize_sample(parse_attribution_sample(as)) == as);
    CHECK_THROWS_AS(parse_attribution_sample(vs), SamplingError);
    CHECK_THROWS_AS(parse_verification_sample("{not json"), SamplingError);
}

TEST_CASE("plan validation") {
    auto p = verification_plan(30, 0);
    p.repetitions = 0;
    CHECK_THROWS_AS(p.validate(), SamplingError);
    auto j = verification_plan(30, 9).to_json();
    auto back = SamplePlan::from_json(j);
    CHECK(back.seed == 9);
    CHECK(back.n_pairs == 30);
    CHECK(back.task == Task::verification);
}

TEST_CASE("sampling properties over many seeds") {
    auto corpus = build_synthetic_corpus(50, 3, 7);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto v = sample_verification(corpus, verification_plan(30, seed));
        auto r = validate_sample(v, corpus);
        REQUIRE_MESSAGE(r.ok(), "seed " << seed);
        auto a = sample_attribution(corpus, attribution_plan(10, seed));
        REQUIRE_MESSAGE(validate_sample(a, corpus).ok(), "seed " << seed);
    }
}
