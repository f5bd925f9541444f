#include <doctest.h>

#include "authorbench/error.hpp"
#include "authorbench/prompts.hpp"
#include "authorbench/text.hpp"
#include "test_support.hpp"

#include <nlohmann/json.hpp>

#include <set>

using namespace authorbench;
using testsupport::fixture_dir;

namespace {

Document doc_from(const nlohmann::json& j) {
    return Document{j.at("doc_id"), j.at("author_id"), j.at("text"), {}};
}

struct Golden {
    VerificationInstance verification;
    AttributionInstance attribution;
};

Golden golden_instances() {
    auto j = nlohmann::json::parse(read_file(fixture_dir() / "prompts/instances.json"));
    Golden g;
    const auto& v = j.at("verification");
    g.verification = {v.at("instance_id"), doc_from(v.at("text_a")), doc_from(v.at("text_b")), v.at("same_author")};
    const auto& a = j.at("attribution");
    g.attribution.instance_id = a.at("instance_id");
    g.attribution.query = doc_from(a.at("query"));
    g.attribution.true_author = a.at("true_author");
    for (const auto& c : a.at("candidates")) g.attribution.candidates.push_back({c.at("author_id"), doc_from(c.at("document"))});
    return g;
}

std::string golden(const std::string& rel) { return read_file(fixture_dir() / "prompts" / rel); }

} // namespace

TEST_CASE("feature list") {
    auto f = feature_list();
    REQUIRE(f.size() == 10);
    CHECK(f.front() == "phrasal verbs");
    CHECK(f.back() == "misspellings");
    CHECK(join_feature_names({"a"}) == "a");
    CHECK(join_feature_names({"a", "b"}) == "a and b");
    CHECK(join_feature_names({"a", "b", "c"}) == "a, b, and c");
}

TEST_CASE("strategy names parse back") {
    for (const auto& s : PromptStrategy::guidance_levels()) CHECK(PromptStrategy::parse(s.name()) == s);
    for (auto f : all_features()) {
        auto s = PromptStrategy::ablation(f);
        CHECK(s.kind() == StrategyKind::feature_ablation);
        CHECK(s.feature() == f);
        CHECK(PromptStrategy::parse(s.name()) == s);
    }
    CHECK_THROWS_AS(PromptStrategy::parse("few_shot"), ConfigError);
    CHECK_THROWS_AS(PromptStrategy::parse("ablation:tone"), ConfigError);
}

TEST_CASE("verification goldens") {
    auto g = golden_instances();
    for (const auto& s : PromptStrategy::guidance_levels()) {
        auto p = render_verification(g.verification, s);
        CHECK(p.system_text == golden("verification/system.txt"));
        CHECK_MESSAGE(p.user_text == golden("verification/" + s.name() + ".txt"), s.name());
        CHECK(p.instance_id == g.verification.instance_id);
        CHECK(p.task == Task::verification);
    }
}

TEST_CASE("attribution goldens") {
    auto g = golden_instances();
    for (const auto& s : PromptStrategy::guidance_levels()) {
        auto p = render_attribution(g.attribution, s);
        CHECK(p.system_text == golden("attribution/system.txt"));
        CHECK_MESSAGE(p.user_text == golden("attribution/" + s.name() + ".txt"), s.name());
    }
    for (auto f : all_features()) {
        auto p = render_attribution(g.attribution, PromptStrategy::ablation(f));
        CHECK_MESSAGE(p.user_text == golden("attribution/ablation_" + std::string(slug(f)) + ".txt"), slug(f));
    }
}

TEST_CASE("lip mentions every feature and the topic clause") {
    auto g = golden_instances();
    auto p = render_verification(g.verification, PromptStrategy::lip());
    for (const auto& name : feature_list()) CHECK(p.user_text.find(name) != std::string::npos);
    CHECK(p.user_text.find("disregarding the differences in topic and content") != std::string::npos);
    auto a = render_attribution(g.attribution, PromptStrategy::lip());
    CHECK(a.user_text.find("Focus on linguistic features such as phrasal verbs, ") != std::string::npos);
}

TEST_CASE("no guidance is just the task and the texts") {
    auto g = golden_instances();
    auto p = render_verification(g.verification, PromptStrategy::no_guidance());
    CHECK(p.user_text == "Verify if two input texts were written by the same author. Input text 1: " +
                             g.verification.text_a.text + ", text 2: " + g.verification.text_b.text);
}

TEST_CASE("misspellings ablation names only misspellings") {
    auto g = golden_instances();
    auto p = render_verification(g.verification, PromptStrategy::ablation(LinguisticFeature::misspellings));
    CHECK(p.user_text.find("misspellings") != std::string::npos);
    for (const auto& name : feature_list())
        if (name != "misspellings") CHECK_MESSAGE(p.user_text.find(name) == std::string::npos, name);
}

TEST_CASE("ablations are pairwise distinct and differ only in the feature clause") {
    auto g = golden_instances();
    std::set<std::string> seen;
    const std::string lip = strategy_text(Task::attribution, PromptStrategy::lip());
    const std::string all = join_feature_names(feature_list());
    const auto at = lip.find(all);
    REQUIRE(at != std::string::npos);
    for (auto f : all_features()) {
        auto p = render_attribution(g.attribution, PromptStrategy::ablation(f));
        CHECK(seen.insert(p.user_text).second);
        auto text = strategy_text(Task::attribution, PromptStrategy::ablation(f));
        CHECK(text == lip.substr(0, at) + std::string(display_name(f)) + lip.substr(at + all.size()));
    }
    CHECK(seen.size() == 10);
}

TEST_CASE("candidate json keeps candidate order") {
    auto g = golden_instances();
    auto cj = candidate_json(g.attribution);
    CHECK(cj == R"({"a1":"The report is due on Friday.","a2":"Honestly I loved the old harbour town.","a3":"Rain again, so we stayed in."})");
    std::swap(g.attribution.candidates[0], g.attribution.candidates[2]);
    CHECK(candidate_json(g.attribution).rfind(R"({"a3":)", 0) == 0);
}

TEST_CASE("ten candidates give ten keys") {
    AttributionInstance inst;
    inst.instance_id = "x";
    inst.query = {"q", "k3", "query text", {}};
    inst.true_author = "k3";
    for (int i = 0; i < 10; ++i) {
        auto id = "k" + std::to_string(i);
        inst.candidates.push_back({id, {"d" + std::to_string(i), id, "text " + std::to_string(i), {}}});
    }
    auto j = nlohmann::json::parse(candidate_json(inst));
    CHECK(j.size() == 10);
    for (int i = 0; i < 10; ++i) CHECK(j.contains("k" + std::to_string(i)));
}

TEST_CASE("rendering is pure and preserves inputs") {
    VerificationInstance inst{"i", {"a", "x", "Tricky {text_2} and {prompt} \"quoted\" \xE2\x80\x94 caf\xC3\xA9", {}},
                              {"b", "y", "Second text\nwith a newline.", {}}, false};
    auto p1 = render_verification(inst, PromptStrategy::grammar());
    auto p2 = render_verification(inst, PromptStrategy::grammar());
    CHECK(p1.user_text == p2.user_text);
    CHECK(p1.user_text.find(inst.text_a.text) != std::string::npos);
    CHECK(p1.user_text.find(inst.text_b.text) != std::string::npos);
}

TEST_CASE("render errors") {
    VerificationInstance empty{"i", {"a", "x", "  ", {}}, {"b", "y", "text", {}}, false};
    CHECK_THROWS_AS(render_verification(empty, PromptStrategy::lip()), PromptError);
    AttributionInstance none;
    none.query = {"q", "a", "query", {}};
    CHECK_THROWS_AS(render_attribution(none, PromptStrategy::lip()), PromptError);
    auto g = golden_instances();
    RenderOptions tight;
    tight.max_chars = 50;
    CHECK_THROWS_AS(render_verification(g.verification, PromptStrategy::lip(), TemplateSet::builtin(), tight),
                    PromptError);
}

TEST_CASE("fill_template does not rescan substitutions") {
    CHECK(fill_template("{a} and {b}", {{"a", "{b}"}, {"b", "x"}}) == "{b} and x");
}
