#include <doctest.h>

#include "authorbench/error.hpp"
#include "authorbench/linguistic_features.hpp"
#include "authorbench/rng.hpp"
#include "authorbench/text.hpp"
#include "test_support.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <sstream>

using namespace authorbench;
using testsupport::fixture_dir;

namespace {

/// Memoized recursive restatement of optimal string alignment distance.
std::size_t osa_oracle(const std::string& a, const std::string& b) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    std::function<std::size_t(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == 0) return j;
        if (j == 0) return i;
        auto key = std::make_pair(i, j);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        std::size_t best = std::min({d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1])});
        if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) best = std::min(best, d(i - 2, j - 2) + 1);
        memo[key] = best;
        return best;
    };
    return d(a.size(), b.size());
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(line);
    return out;
}

std::map<std::string, std::size_t> countable(const FeatureProfile& p) {
    std::map<std::string, std::size_t> out{
        {"tokens", p.token_count},
        {"modals", p.modal_verb_count},
        {"phrasal", p.phrasal_verb_count},
        {"rare", p.rare_word_count},
        {"quantities", p.quantity_token_count},
        {"typos", p.typo_count},
        {"misspellings", p.misspelling_count},
        {"humor", p.humor_marker_count},
        {"sarcasm", p.sarcasm_marker_count},
    };
    for (const auto& [mark, n] : p.punctuation_counts) out["punct " + mark] = n;
    for (const auto& [affix, n] : p.affix_counts) out["affix " + affix] = n;
    return out;
}

} // namespace

TEST_CASE("spot examples") {
    auto p = extract_profile("You should go; it might rain.");
    CHECK(p.modal_verb_count == 2);
    CHECK(p.token_count == 6);
    CHECK(p.modal_verb_rate == doctest::Approx(2.0 / 6.0));

    auto q = extract_profile("I got 3 apples, about 20% off");
    CHECK(q.quantity_token_count == 2);

    auto m = extract_profile("I will recieve it");
    CHECK(m.misspelling_count == 1);
    CHECK(m.misspellings == std::vector<std::string>{"recieve"});
    CHECK(osa_distance("recieve", "receive") == 1);
}

TEST_CASE("detector details") {
    CHECK(extract_profile("She couldn't come and won't call.").modal_verb_count == 2);
    CHECK(extract_profile("He gave up on it and picked it up later.").phrasal_verb_count == 2);
    CHECK(extract_profile("twenty people and the 3rd one").quantity_token_count == 3);
    CHECK(extract_profile("The colour of the centre is grey.").misspelling_count == 0);
    CHECK(extract_profile("lol that was great haha :)").humor_marker_count >= 3);
    CHECK(extract_profile("Oh great, another \"meeting\" ?! Yeah right.").sarcasm_marker_count >= 3);
    auto typo = extract_profile("This is sooo  good , really really nice..");
    CHECK(typo.typo_count >= 4);
    auto affix = extract_profile("The unhappy kindness of strangers.");
    CHECK(affix.affix_counts.at("un-") == 1);
    CHECK(affix.affix_counts.at("-ness") == 1);
    // names are not misspellings
    CHECK(extract_profile("We met Jonh at noon.").misspelling_count == 0);
}

TEST_CASE("twenty sentence fixture") {
    const auto expected = nlohmann::json::parse(read_file(fixture_dir() / "features/expected.json"));
    const auto text = read_file(fixture_dir() / "features/sentences.txt");
    const auto lines = lines_of(text);
    REQUIRE(lines.size() == 20);
    const auto& per = expected.at("sentences");
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto p = extract_profile(lines[i]);
        CHECK_MESSAGE(p.modal_verb_count == per[i].at("modals").get<std::size_t>(), lines[i]);
        CHECK_MESSAGE(p.quantity_token_count == per[i].at("quantities").get<std::size_t>(), lines[i]);
        CHECK_MESSAGE(p.misspelling_count == per[i].at("misspellings").get<std::size_t>(), lines[i]);
    }
    auto whole = extract_profile(text);
    CHECK(whole.modal_verb_count == expected.at("totals").at("modals").get<std::size_t>());
    CHECK(whole.quantity_token_count == expected.at("totals").at("quantities").get<std::size_t>());
    CHECK(whole.misspelling_count == expected.at("totals").at("misspellings").get<std::size_t>());
    CHECK(whole.misspellings == expected.at("misspelled").get<std::vector<std::string>>());
    for (const auto& [mark, n] : expected.at("punctuation").items()) {
        CHECK_MESSAGE(whole.punctuation_counts.at(mark) == n.get<std::size_t>(), mark);
        CHECK(whole.punctuation_histogram.at(mark) ==
              doctest::Approx(1000.0 * n.get<double>() / static_cast<double>(whole.char_count)));
    }
    CHECK(whole.punctuation_counts.size() == tracked_punctuation().size());
}

TEST_CASE("empty text") {
    auto p = extract_profile("");
    for (const auto& [name, n] : countable(p)) CHECK_MESSAGE(n == 0, name);
    CHECK(p.modal_verb_rate == 0.0);
    CHECK(p.rare_word_rate == 0.0);
    CHECK(p.char_count == 0);
    CHECK(extract_profile("   ").token_count == 0);
}

TEST_CASE("deterministic") {
    const auto text = read_file(fixture_dir() / "features/sentences.txt");
    CHECK(extract_profile(text) == extract_profile(text));
    CHECK(extract_profile(text).to_json().dump() == extract_profile(text).to_json().dump());
}

TEST_CASE("concatenation never lowers counts") {
    const std::vector<std::string> pieces{
        "You should go", "it might rain.", "I got 3 apples,", "about 20% off", "recieve", "lol", "?!",
        "\"great\"", "gave up", "unhappy", "kindness", "sooo", "the the", "Thier", "twenty", "yeah right",
        "(aside)", "well...", "can't", "wierd", ";", "colour", "Hello", "x"};
    SplitMix64 rng(31);
    for (int i = 0; i < 400; ++i) {
        auto build = [&] {
            std::string s;
            const auto n = 1 + rng.uniform(6);
            for (std::uint64_t k = 0; k < n; ++k) {
                if (!s.empty()) s += ' ';
                s += pieces[rng.uniform(pieces.size())];
            }
            return s;
        };
        const auto s = build();
        const auto t = build();
        auto ps = countable(extract_profile(s));
        auto pst = countable(extract_profile(s + " " + t));
        for (const auto& [name, n] : ps) CHECK_MESSAGE(pst[name] >= n, name << " | " << s << " | " << t);
    }
}

TEST_CASE("osa distance agrees with a recursive oracle") {
    CHECK(osa_distance("", "") == 0);
    CHECK(osa_distance("abc", "") == 3);
    CHECK(osa_distance("ca", "abc") == 3);
    CHECK(osa_distance("teh", "the") == 1);
    SplitMix64 rng(12);
    for (int i = 0; i < 2000; ++i) {
        auto word = [&] {
            std::string w;
            const auto n = rng.uniform(7);
            for (std::uint64_t k = 0; k < n; ++k) w += static_cast<char>('a' + rng.uniform(4));
            return w;
        };
        auto a = word(), b = word();
        REQUIRE_MESSAGE(osa_distance(a, b) == osa_oracle(a, b), a << " / " << b);
    }
}

TEST_CASE("misspellings are within distance two of a dictionary word") {
    const auto& lex = LexiconSet::builtin();
    auto p = extract_profile("I definately beleive the goverment will recieve it untill tommorow.");
    CHECK(p.misspelling_count == 6);
    for (const auto& w : p.misspellings) {
        const auto lower = to_lower_ascii(w);
        CHECK_FALSE(lex.known_spelling(lower));
        bool near = false;
        for (const auto& d : lex.dictionary) {
            const auto gap = d.size() > lower.size() ? d.size() - lower.size() : lower.size() - d.size();
            if (gap <= 2 && osa_oracle(lower, d) <= 2) {
                near = true;
                break;
            }
        }
        CHECK_MESSAGE(near, w);
    }
}

TEST_CASE("profile distance") {
    auto p = extract_profile("You should go; it might rain, or it could snow.");
    auto q = extract_profile("I got 3 apples, about 20% off! Recieve them?");
    CHECK(profile_distance(p, p) == 0.0);
    CHECK(profile_distance(p, q) == doctest::Approx(profile_distance(q, p)));
    CHECK(profile_distance(p, q) > 0.0);

    FeatureProfile a, b;
    a.lexicon_version = b.lexicon_version = LexiconSet::builtin().version;
    a.token_count = b.token_count = 10;
    a.modal_verb_rate = 0.2;
    b.modal_verb_rate = 0.3;
    CHECK(profile_distance(a, b) == doctest::Approx(0.1));
    ProfileWeights w;
    w.modal_verbs = 2.0;
    CHECK(profile_distance(a, b, w) == doctest::Approx(0.2));

    // humor is ignored by default
    auto h = a;
    h.humor_marker_count = 5;
    CHECK(profile_distance(a, h) == 0.0);

    auto other = b;
    other.lexicon_version = "other-version";
    CHECK_THROWS_AS(profile_distance(a, other), LexiconError);
}

TEST_CASE("random profiles give symmetric distances") {
    SplitMix64 rng(8);
    const std::vector<std::string> words{"should", "3", "recieve", "lol", "gave", "up", "unhappy", ",", "!", "the",
                                         "cat", "twenty", "might", "sooo"};
    auto text = [&] {
        std::string s;
        for (int k = 0; k < 12; ++k) s += words[rng.uniform(words.size())] + " ";
        return s;
    };
    for (int i = 0; i < 100; ++i) {
        auto p = extract_profile(text());
        auto q = extract_profile(text());
        CHECK(profile_distance(p, q) == doctest::Approx(profile_distance(q, p)));
        CHECK(profile_distance(p, q) >= 0.0);
    }
}

TEST_CASE("crosscheck") {
    auto a = extract_profile("I will recieve it. The goverment is wierd.");
    auto b = extract_profile("I will receive it. The government is weird.");
    REQUIRE(a.misspelling_count == 3);
    REQUIRE(b.misspelling_count == 0);

    auto r = explanation_crosscheck("Text 1 contains several misspellings that text 2 lacks.", a, b);
    REQUIRE(r.entries.size() == 1);
    CHECK(r.entries[0].feature == LinguisticFeature::misspellings);
    CHECK(r.entries[0].claim == ClaimKind::difference);
    CHECK(r.entries[0].verdict == CrosscheckVerdict::consistent);

    auto sim = explanation_crosscheck("Both texts share similar misspellings.", a, b);
    REQUIRE(sim.entries.size() == 1);
    CHECK(sim.entries[0].claim == ClaimKind::similarity);
    CHECK(sim.entries[0].verdict == CrosscheckVerdict::inconsistent);

    CHECK(explanation_crosscheck("The tone is warm and the topic differs.", a, b).entries.empty());

    auto humor = explanation_crosscheck("The humor in text 1 is dry.", a, b);
    REQUIRE(humor.entries.size() == 1);
    CHECK(humor.entries[0].feature == LinguisticFeature::humor);
    CHECK_FALSE(humor.entries[0].checkable);
    CHECK(humor.entries[0].verdict == CrosscheckVerdict::unverifiable);
    CHECK(to_string(CrosscheckVerdict::unverifiable) == "not machine-checkable");
    CHECK(humor.to_json().dump().find("not machine-checkable") != std::string::npos);
}

TEST_CASE("missing lexicon") {
    testsupport::TempDir dir("lex");
    CHECK_THROWS_AS(LexiconSet::load(dir.path()), LexiconError);
    CHECK_THROWS_AS(LexiconSet::load(dir / "nope"), LexiconError);
}

TEST_CASE("builtin lexicons are populated") {
    const auto& lex = LexiconSet::builtin();
    CHECK(lex.modals.size() == 9);
    CHECK(lex.dictionary.size() > 40000);
    CHECK(lex.frequent.size() == 5000);
    CHECK_FALSE(lex.version.empty());
    CHECK(lex.known_spelling("colour"));
    CHECK_FALSE(lex.known_spelling("recieve"));
}
