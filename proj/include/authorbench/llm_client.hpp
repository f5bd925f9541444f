#pragma once

#include "authorbench/mock_script.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace authorbench {

struct ChatRequest {
    std::string model_name;
    std::string system_text;
    std::string user_text;
    double temperature = 0.0;
    double top_p = 1.0;
    std::optional<int> max_output_tokens;
    /// Routing tag for scripted providers and logs; not part of the digest.
    std::string instance_id;

    void validate() const;
};

/// SHA-256 over a length-prefixed encoding of model, system, user,
/// temperature, top_p and max_output_tokens. Reals are encoded in shortest
/// round-trip form, so the digest is platform independent.
std::string request_digest(const ChatRequest& request);

enum class ParseStatus { ok, recovered, failed };

std::string_view to_string(ParseStatus status);
ParseStatus parse_status_from_string(std::string_view name);

/// Verification answers are booleans, attribution answers author IDs.
using Answer = std::variant<bool, std::string>;

std::string answer_to_string(const Answer& answer);

struct ParsedAnswer {
    std::optional<std::string> analysis;
    std::optional<Answer> answer;
    ParseStatus status = ParseStatus::failed;
    std::string error;
};

struct ModelResponse {
    std::string raw_text;
    std::optional<std::string> parsed_analysis;
    std::optional<Answer> parsed_answer;
    ParseStatus parse_status = ParseStatus::failed;
    std::chrono::milliseconds latency{0};
    nlohmann::json provider_meta = nlohmann::json::object();
    std::string digest;
    int attempts = 0;
    bool from_cache = false;
    bool refused = false;
};

struct ProviderReply {
    std::string text;
    nlohmann::json meta = nlohmann::json::object();
};

/// Chat-completion transport. Implementations throw ProviderError; only
/// Kind::transient is retried by complete().
class Provider {
public:
    virtual ~Provider() = default;
    virtual ProviderReply send(const ChatRequest& request) = 0;
    virtual std::string name() const = 0;
};

/// POSTs to <endpoint>/chat/completions with a bearer credential read from
/// the environment when the provider is constructed.
class OpenAiCompatibleProvider : public Provider {
public:
    struct Settings {
        std::string endpoint = "https://api.openai.com/v1";
        std::string api_key_env = "LLM_API_KEY";
        std::chrono::seconds timeout{120};
    };

    explicit OpenAiCompatibleProvider(Settings settings);

    ProviderReply send(const ChatRequest& request) override;
    std::string name() const override { return "openai-compatible"; }

private:
    Settings settings_;
    std::string api_key_;
};

/// Answers from a MockScript; thread safe.
class MockProvider : public Provider {
public:
    explicit MockProvider(MockScript script) : script_(std::move(script)) {}

    ProviderReply send(const ChatRequest& request) override;
    std::string name() const override { return "mock"; }

    std::size_t calls() const noexcept { return calls_.load(); }

private:
    MockScript script_;
    std::atomic<std::size_t> calls_{0};
};

/// Cache-only: every send() is a miss.
class ReplayProvider : public Provider {
public:
    ProviderReply send(const ChatRequest& request) override;
    std::string name() const override { return "replay"; }
};

/// Content-addressed response store, one <digest>.json file per entry when
/// backed by a directory. Readers run concurrently; writers are serialized
/// and publish by rename.
class ResponseCache {
public:
    struct Entry {
        std::string raw_text;
        nlohmann::json provider_meta = nlohmann::json::object();
    };

    ResponseCache() = default;  // in-memory only
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<Entry> lookup(const std::string& digest) const;
    void store(const std::string& digest, const std::string& model_name, const Entry& entry);
    std::size_t size() const;

private:
    std::optional<std::filesystem::path> dir_;
    mutable std::shared_mutex mutex_;
    mutable std::map<std::string, Entry> memory_;
};

struct RetryPolicy {
    int max_attempts = 4;
    std::chrono::milliseconds base_delay{1000};
    double factor = 4.0;
    /// Injected for tests; defaults to std::this_thread::sleep_for.
    std::function<void(std::chrono::milliseconds)> sleep;

    /// Full jitter: uniform in [0, base * factor^(failures - 1)).
    std::chrono::milliseconds delay(int failures, double unit_draw) const;
};

using AnswerParser = std::function<ParsedAnswer(std::string_view)>;

/// Cache hit: no provider call. Miss: send with retry on transient errors,
/// then store. Refusals are stored and returned as failed parses.
ModelResponse complete(const ChatRequest& request, Provider& provider, ResponseCache& cache,
                       const RetryPolicy& policy, const AnswerParser& parser = {});

inline constexpr std::string_view kJsonReminder = "Respond with only the JSON object.";

/// complete(), and on a failed parse one more request with kJsonReminder
/// appended to the user text on a new line.
ModelResponse complete_with_reminder(const ChatRequest& request, Provider& provider, ResponseCache& cache,
                                     const RetryPolicy& policy, const AnswerParser& parser);

struct ExtractedObject {
    nlohmann::json value;
    bool exact = false;     // the trimmed text was the object itself
    bool repaired = false;  // Python literals (True/False/None) were rewritten
};

/// First parseable balanced {...} in `raw`, string escapes respected.
std::optional<ExtractedObject> extract_json_object(std::string_view raw);

ParsedAnswer parse_verification_answer(std::string_view raw_text);
ParsedAnswer parse_attribution_answer(std::string_view raw_text, const std::vector<std::string>& valid_ids);

} // namespace authorbench
