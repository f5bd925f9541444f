#include <doctest.h>

#include "authorbench/error.hpp"
#include "authorbench/llm_client.hpp"
#include "authorbench/rng.hpp"
#include "test_support.hpp"

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>

using namespace authorbench;
using nlohmann::json;

namespace {

ChatRequest base_request() {
    ChatRequest r;
    r.model_name = "gpt-test";
    r.system_text = "Respond with a JSON object.";
    r.user_text = "Input text 1: a, text 2: b";
    r.instance_id = "blog-verification-r1-001";
    return r;
}

RetryPolicy no_sleep_policy(std::vector<std::chrono::milliseconds>* waits = nullptr) {
    RetryPolicy p;
    p.sleep = [waits](std::chrono::milliseconds d) {
        if (waits) waits->push_back(d);
    };
    return p;
}

/// Throws a scripted sequence of errors before answering.
class FlakyProvider : public Provider {
public:
    FlakyProvider(std::vector<ProviderError::Kind> failures, std::string reply)
        : failures_(std::move(failures)), reply_(std::move(reply)) {}

    ProviderReply send(const ChatRequest&) override {
        const auto n = calls++;
        if (n < failures_.size()) throw ProviderError(failures_[n], "scripted failure", 429);
        return ProviderReply{reply_, json::object()};
    }
    std::string name() const override { return "flaky"; }

    std::size_t calls = 0;

private:
    std::vector<ProviderError::Kind> failures_;
    std::string reply_;
};

/// Serves /v1/chat/completions on a loopback port.
class LocalServer {
public:
    explicit LocalServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
        server_.Post("/v1/chat/completions", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LocalServer() {
        server_.stop();
        thread_.join();
    }
    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

std::string completion_body(const std::string& content) {
    return json{{"model", "gpt-test"},
                {"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}},
                                          {"finish_reason", "stop"}}})},
                {"usage", {{"prompt_tokens", 10}, {"completion_tokens", 5}}}}
        .dump();
}

} // namespace

TEST_CASE("digest stability and sensitivity") {
    auto r = base_request();
    CHECK(request_digest(r) == request_digest(base_request()));
    CHECK(request_digest(r).size() == 64);
    auto t = r;
    t.temperature = 0.7;
    CHECK(request_digest(t) != request_digest(r));
    auto u = r;
    u.user_text.back() = 'c';
    CHECK(request_digest(u) != request_digest(r));
    auto m = r;
    m.model_name = "gpt-other";
    CHECK(request_digest(m) != request_digest(r));
    auto s = r;
    s.system_text += " ";
    CHECK(request_digest(s) != request_digest(r));
    auto p = r;
    p.top_p = 0.9;
    CHECK(request_digest(p) != request_digest(r));
    auto k = r;
    k.max_output_tokens = 512;
    CHECK(request_digest(k) != request_digest(r));
    auto i = r;
    i.instance_id = "other";
    CHECK(request_digest(i) == request_digest(r));
    // moving text between fields must not collide
    auto a = r, b = r;
    a.system_text = "ab";
    a.user_text = "c";
    b.system_text = "a";
    b.user_text = "bc";
    CHECK(request_digest(a) != request_digest(b));
}

TEST_CASE("request validation") {
    auto r = base_request();
    r.temperature = -0.1;
    CHECK_THROWS_AS(r.validate(), ConfigError);
    r = base_request();
    r.top_p = 0.0;
    CHECK_THROWS_AS(r.validate(), ConfigError);
    r.top_p = 1.5;
    CHECK_THROWS_AS(r.validate(), ConfigError);
    CHECK_NOTHROW(base_request().validate());
}

TEST_CASE("second identical request is served from cache") {
    MockScript script;
    script.default_response = R"({"analysis":"x","answer":true})";
    MockProvider provider(script);
    ResponseCache cache;
    auto first = complete(base_request(), provider, cache, no_sleep_policy(), parse_verification_answer);
    CHECK(provider.calls() == 1);
    CHECK_FALSE(first.from_cache);
    CHECK(first.attempts == 1);
    auto second = complete(base_request(), provider, cache, no_sleep_policy(), parse_verification_answer);
    CHECK(provider.calls() == 1);
    CHECK(second.from_cache);
    CHECK(second.raw_text == first.raw_text);
    CHECK(std::get<bool>(*second.parsed_answer) == true);
}

TEST_CASE("disk cache survives reopening") {
    testsupport::TempDir dir("cache");
    MockScript script;
    script.default_response = "hello";
    MockProvider provider(script);
    {
        ResponseCache cache(dir.path());
        complete(base_request(), provider, cache, no_sleep_policy());
    }
    CHECK(std::filesystem::exists(dir / (request_digest(base_request()) + ".json")));
    ResponseCache reopened(dir.path());
    ReplayProvider replay;
    auto r = complete(base_request(), replay, reopened, no_sleep_policy());
    CHECK(r.from_cache);
    CHECK(r.raw_text == "hello");
    auto other = base_request();
    other.user_text += "!";
    try {
        complete(other, replay, reopened, no_sleep_policy());
        FAIL("expected a cache miss");
    } catch (const ProviderError& e) {
        CHECK(e.kind() == ProviderError::Kind::cache_miss);
    }
}

TEST_CASE("transient failures are retried with backoff") {
    FlakyProvider provider({ProviderError::Kind::transient, ProviderError::Kind::transient},
                           R"({"analysis":"a","answer":false})");
    ResponseCache cache;
    std::vector<std::chrono::milliseconds> waits;
    auto r = complete(base_request(), provider, cache, no_sleep_policy(&waits), parse_verification_answer);
    CHECK(r.attempts == 3);
    CHECK(provider.calls == 3);
    REQUIRE(waits.size() == 2);
    CHECK(waits[0] < std::chrono::milliseconds(1000));
    CHECK(waits[1] < std::chrono::milliseconds(4000));
    CHECK(r.parse_status == ParseStatus::ok);
}

TEST_CASE("retry budget is bounded") {
    FlakyProvider provider(std::vector<ProviderError::Kind>(10, ProviderError::Kind::transient), "never");
    ResponseCache cache;
    try {
        complete(base_request(), provider, cache, no_sleep_policy());
        FAIL("expected exhaustion");
    } catch (const ProviderError& e) {
        CHECK(e.kind() == ProviderError::Kind::exhausted);
    }
    CHECK(provider.calls == 4);
    CHECK(cache.size() == 0);
}

TEST_CASE("auth failures are not retried") {
    FlakyProvider provider({ProviderError::Kind::auth}, "never");
    ResponseCache cache;
    CHECK_THROWS_AS(complete(base_request(), provider, cache, no_sleep_policy()), ProviderError);
    CHECK(provider.calls == 1);
}

TEST_CASE("refusals are recorded once and parse as failed") {
    FlakyProvider provider({ProviderError::Kind::refusal}, "unused");
    ResponseCache cache;
    auto r = complete(base_request(), provider, cache, no_sleep_policy(), parse_verification_answer);
    CHECK(r.refused);
    CHECK(r.parse_status == ParseStatus::failed);
    CHECK_FALSE(r.parsed_answer.has_value());
    CHECK(provider.calls == 1);
    auto again = complete_with_reminder(base_request(), provider, cache, no_sleep_policy(), parse_verification_answer);
    CHECK(again.refused);
    CHECK(provider.calls == 1);
}

TEST_CASE("full jitter delay bounds") {
    RetryPolicy p;
    CHECK(p.delay(1, 0.0) == std::chrono::milliseconds(0));
    CHECK(p.delay(1, 0.5) == std::chrono::milliseconds(500));
    CHECK(p.delay(2, 0.5) == std::chrono::milliseconds(2000));
    CHECK(p.delay(3, 0.999) < std::chrono::milliseconds(16000));
}

TEST_CASE("reminder retry on a failed parse") {
    MockScript script;
    script.rules.push_back({"digest:*", "not json"});
    MockProvider provider(script);
    ResponseCache cache;
    auto r = complete_with_reminder(base_request(), provider, cache, no_sleep_policy(), parse_verification_answer);
    CHECK(provider.calls() == 2);
    CHECK(r.parse_status == ParseStatus::failed);
    CHECK(r.provider_meta.value("reminder_retry", false));
}

TEST_CASE("http provider: 429 twice then 200") {
    std::atomic<int> hits{0};
    std::string auth_header;
    json seen_body;
    LocalServer server([&](const httplib::Request& req, httplib::Response& res) {
        const int n = ++hits;
        auth_header = req.get_header_value("Authorization");
        seen_body = json::parse(req.body);
        if (n <= 2) {
            res.status = 429;
            res.set_content(R"({"error":{"message":"slow down"}})", "application/json");
            return;
        }
        res.set_content(completion_body(R"({"analysis":"same idiolect","answer":true})"), "application/json");
    });
    ::setenv("AUTHORBENCH_TEST_KEY", "sk-test", 1);
    OpenAiCompatibleProvider provider({server.endpoint(), "AUTHORBENCH_TEST_KEY", std::chrono::seconds(10)});
    ResponseCache cache;
    auto r = complete(base_request(), provider, cache, no_sleep_policy(), parse_verification_answer);
    CHECK(r.attempts == 3);
    CHECK(hits == 3);
    CHECK(auth_header == "Bearer sk-test");
    CHECK(seen_body.at("temperature") == 0.0);
    CHECK(seen_body.at("top_p") == 1.0);
    CHECK(seen_body.at("messages").size() == 2);
    CHECK(r.parse_status == ParseStatus::ok);
    CHECK(std::get<bool>(*r.parsed_answer));
    CHECK(r.provider_meta.at("usage").at("prompt_tokens") == 10);
}

TEST_CASE("http provider: 401 is an auth failure") {
    std::atomic<int> hits{0};
    LocalServer server([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 401;
    });
    ::setenv("AUTHORBENCH_TEST_KEY", "bad", 1);
    OpenAiCompatibleProvider provider({server.endpoint(), "AUTHORBENCH_TEST_KEY", std::chrono::seconds(10)});
    ResponseCache cache;
    try {
        complete(base_request(), provider, cache, no_sleep_policy());
        FAIL("expected auth error");
    } catch (const ProviderError& e) {
        CHECK(e.kind() == ProviderError::Kind::auth);
    }
    CHECK(hits == 1);
}

TEST_CASE("missing credential fails before any network call") {
    ::unsetenv("AUTHORBENCH_TEST_ABSENT");
    CHECK_THROWS_AS(OpenAiCompatibleProvider({"http://127.0.0.1:1/v1", "AUTHORBENCH_TEST_ABSENT"}), ConfigError);
}

TEST_CASE("verification parser examples") {
    auto ok = parse_verification_answer(R"({"analysis":"same idiolect","answer":true})");
    CHECK(ok.status == ParseStatus::ok);
    CHECK(std::get<bool>(*ok.answer) == true);
    CHECK(*ok.analysis == "same idiolect");

    auto rec = parse_verification_answer(R"(Sure! {"analysis":"...","answer":"False"})");
    CHECK(rec.status == ParseStatus::recovered);
    CHECK(std::get<bool>(*rec.answer) == false);

    CHECK(parse_verification_answer("the texts differ").status == ParseStatus::failed);
    CHECK(parse_verification_answer(R"({"analysis":"x"})").status == ParseStatus::failed);
    CHECK(parse_verification_answer(R"({"analysis":"x","answer":"maybe"})").status == ParseStatus::failed);

    auto py = parse_verification_answer("```json\n{\"analysis\": \"x\", \"answer\": True}\n```");
    CHECK(py.status == ParseStatus::recovered);
    CHECK(std::get<bool>(*py.answer));

    auto lower = parse_verification_answer(R"({"analysis":"x","answer":"true"})");
    CHECK(lower.status == ParseStatus::recovered);
    CHECK(std::get<bool>(*lower.answer));
}

TEST_CASE("attribution parser examples") {
    std::vector<std::string> ids{"a01", "a07", "a12"};
    auto ok = parse_attribution_answer(R"({"analysis":"...","answer":"a07"})", ids);
    CHECK(ok.status == ParseStatus::ok);
    CHECK(std::get<std::string>(*ok.answer) == "a07");

    auto folded = parse_attribution_answer(R"({"analysis":"...","answer":"A07"})", {"a07"});
    CHECK(folded.status == ParseStatus::recovered);
    CHECK(std::get<std::string>(*folded.answer) == "a07");

    auto trimmed = parse_attribution_answer(R"({"analysis":"...","answer":" a12 "})", ids);
    CHECK(trimmed.status == ParseStatus::recovered);
    CHECK(std::get<std::string>(*trimmed.answer) == "a12");

    auto exact = parse_attribution_answer(R"({"analysis":"...","answer":"A07"})", {"a07", "A07"});
    CHECK(exact.status == ParseStatus::ok);
    CHECK(std::get<std::string>(*exact.answer) == "A07");

    auto out = parse_attribution_answer(R"({"analysis":"...","answer":"a99"})", ids);
    CHECK(out.status == ParseStatus::failed);
    CHECK_FALSE(out.answer.has_value());
}

TEST_CASE("parsers are total") {
    const std::string alphabet = "{}[]\":,\\ aT1nulfse\n\x80\xff";
    SplitMix64 rng(77);
    for (int i = 0; i < 3000; ++i) {
        std::string s;
        const auto len = rng.uniform(40);
        for (std::uint64_t k = 0; k < len; ++k) s += alphabet[rng.uniform(alphabet.size())];
        ParsedAnswer v, a;
        CHECK_NOTHROW(v = parse_verification_answer(s));
        CHECK_NOTHROW(a = parse_attribution_answer(s, {"a1", "a2"}));
        if (v.status == ParseStatus::failed) CHECK_FALSE(v.answer.has_value());
        if (v.status == ParseStatus::ok) CHECK((v.analysis && v.answer));
        if (a.status == ParseStatus::failed) CHECK_FALSE(a.answer.has_value());
    }
}

namespace {

json random_value(SplitMix64& rng, int depth);

std::string random_string(SplitMix64& rng) {
    static const std::string chars = "abcXYZ {}[]\"\\:,\n\t\xC3\xA9";
    std::string s;
    const auto len = rng.uniform(8);
    for (std::uint64_t i = 0; i < len; ++i) s += chars[rng.uniform(chars.size())];
    // keep UTF-8 valid: drop a dangling lead byte
    if (!s.empty() && static_cast<unsigned char>(s.back()) == 0xC3) s.pop_back();
    std::string clean;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (static_cast<unsigned char>(s[i]) == 0xC3) {
            if (i + 1 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0xA9) {
                clean += "\xC3\xA9";
                ++i;
            }
        } else if (static_cast<unsigned char>(s[i]) != 0xA9) {
            clean += s[i];
        }
    }
    return clean;
}

json random_object(SplitMix64& rng, int depth) {
    json o = json::object();
    const auto n = rng.uniform(4);
    for (std::uint64_t i = 0; i < n; ++i) o[random_string(rng)] = random_value(rng, depth + 1);
    return o;
}

json random_value(SplitMix64& rng, int depth) {
    switch (depth > 2 ? rng.uniform(4) : rng.uniform(6)) {
        case 0: return rng.uniform(2) == 1;
        case 1: return static_cast<std::int64_t>(rng.uniform(1000)) - 500;
        case 2: return random_string(rng);
        case 3: return nullptr;
        case 4: return random_object(rng, depth);
        default: {
            json a = json::array();
            const auto n = rng.uniform(3);
            for (std::uint64_t i = 0; i < n; ++i) a.push_back(random_value(rng, depth + 1));
            return a;
        }
    }
}

} // namespace

TEST_CASE("extraction recovers an embedded object exactly") {
    SplitMix64 rng(2024);
    const std::string filler = "Here is my answer: }] \"quoted\" text\n```json\n";
    for (int i = 0; i < 1000; ++i) {
        json j = random_object(rng, 0);
        std::string prefix = filler.substr(0, rng.uniform(filler.size() + 1));
        std::string suffix = filler.substr(0, rng.uniform(filler.size() + 1));
        auto got = extract_json_object(prefix + j.dump() + suffix);
        REQUIRE_MESSAGE(got.has_value(), prefix << j.dump() << suffix);
        CHECK(got->value == j);
    }
}
