#include "authorbench/llm_client.hpp"

#include "authorbench/error.hpp"
#include "authorbench/rng.hpp"
#include "authorbench/text.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <mutex>
#include <thread>

namespace authorbench {

using nlohmann::json;

void ChatRequest::validate() const {
    if (model_name.empty()) throw ConfigError("chat request without model name");
    if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must be in (0, 1]");
    if (max_output_tokens && *max_output_tokens <= 0) throw ConfigError("max_output_tokens must be positive");
}

namespace {

std::string shortest(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, result.ptr);
}

void append_field(std::string& out, std::string_view name, std::string_view value) {
    out += name;
    out.push_back(':');
    out += std::to_string(value.size());
    out.push_back(':');
    out += value;
    out.push_back('\n');
}

} // namespace

std::string request_digest(const ChatRequest& request) {
    std::string canonical = "authorbench-chat-v1\n";
    append_field(canonical, "model", request.model_name);
    append_field(canonical, "system", request.system_text);
    append_field(canonical, "user", request.user_text);
    append_field(canonical, "temperature", shortest(request.temperature));
    append_field(canonical, "top_p", shortest(request.top_p));
    append_field(canonical, "max_output_tokens",
                 request.max_output_tokens ? std::to_string(*request.max_output_tokens) : std::string());
    return sha256_hex(canonical);
}

std::string_view to_string(ParseStatus status) {
    switch (status) {
    case ParseStatus::ok: return "ok";
    case ParseStatus::recovered: return "recovered";
    case ParseStatus::failed: return "failed";
    }
    return "failed";
}

ParseStatus parse_status_from_string(std::string_view name) {
    if (name == "ok") return ParseStatus::ok;
    if (name == "recovered") return ParseStatus::recovered;
    return ParseStatus::failed;
}

std::string answer_to_string(const Answer& answer) {
    if (const bool* b = std::get_if<bool>(&answer)) return *b ? "true" : "false";
    return std::get<std::string>(answer);
}

// ---------------------------------------------------------------------------
// Providers

ProviderReply MockProvider::send(const ChatRequest& request) {
    ++calls_;
    const std::string* response = script_.match(request.instance_id, request_digest(request));
    if (response == nullptr) {
        throw ProviderError(ProviderError::Kind::invalid,
                            "mock script has no response for " + request.instance_id);
    }
    ProviderReply reply;
    reply.text = *response;
    reply.meta["provider"] = "mock";
    return reply;
}

ProviderReply ReplayProvider::send(const ChatRequest& request) {
    throw ProviderError(ProviderError::Kind::cache_miss,
                        "replay cache miss for " + request.instance_id + " (" + request_digest(request) + ")");
}

// ---------------------------------------------------------------------------
// Cache

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(*dir_, ec);
    if (ec) throw ConfigError("cannot create cache directory " + dir_->string() + ": " + ec.message());
}

std::optional<ResponseCache::Entry> ResponseCache::lookup(const std::string& digest) const {
    {
        std::shared_lock lock(mutex_);
        if (auto it = memory_.find(digest); it != memory_.end()) return it->second;
    }
    if (!dir_) return std::nullopt;
    const auto path = *dir_ / (digest + ".json");
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    Entry entry;
    try {
        const json j = json::parse(read_file(path));
        entry.raw_text = j.at("raw_text").get<std::string>();
        if (j.contains("provider_meta")) entry.provider_meta = j.at("provider_meta");
    } catch (const std::exception&) {
        return std::nullopt;  // torn or foreign file: treat as a miss
    }
    std::unique_lock lock(mutex_);
    return memory_.try_emplace(digest, std::move(entry)).first->second;
}

void ResponseCache::store(const std::string& digest, const std::string& model_name, const Entry& entry) {
    std::unique_lock lock(mutex_);
    if (dir_) {
        nlohmann::ordered_json j;
        j["digest"] = digest;
        j["model_name"] = model_name;
        j["raw_text"] = entry.raw_text;
        j["provider_meta"] = entry.provider_meta;
        const auto final_path = *dir_ / (digest + ".json");
        const auto tmp_path = *dir_ / (digest + ".json.tmp");
        write_file(tmp_path, j.dump(2, ' ', false, json::error_handler_t::replace) + "\n");
        std::filesystem::rename(tmp_path, final_path);
    }
    memory_.insert_or_assign(digest, entry);
}

std::size_t ResponseCache::size() const {
    std::shared_lock lock(mutex_);
    if (!dir_) return memory_.size();
    std::size_t n = 0;
    for (const auto& e : std::filesystem::directory_iterator(*dir_)) {
        if (e.path().extension() == ".json") ++n;
    }
    return n;
}

// ---------------------------------------------------------------------------
// Dispatch

std::chrono::milliseconds RetryPolicy::delay(int failures, double unit_draw) const {
    const double cap = static_cast<double>(base_delay.count()) * std::pow(factor, failures - 1);
    return std::chrono::milliseconds(static_cast<long long>(cap * unit_draw));
}

ModelResponse complete(const ChatRequest& request, Provider& provider, ResponseCache& cache,
                       const RetryPolicy& policy, const AnswerParser& parser) {
    request.validate();
    ModelResponse response;
    response.digest = request_digest(request);
    const auto started = std::chrono::steady_clock::now();

    if (auto hit = cache.lookup(response.digest)) {
        response.raw_text = std::move(hit->raw_text);
        response.provider_meta = std::move(hit->provider_meta);
        response.from_cache = true;
    } else {
        // Jitter draws come from the digest so a rerun backs off identically.
        SplitMix64 jitter(std::strtoull(response.digest.substr(0, 16).c_str(), nullptr, 16));
        const int max_attempts = std::max(1, policy.max_attempts);
        ResponseCache::Entry entry;
        for (int attempt = 1;; ++attempt) {
            response.attempts = attempt;
            try {
                ProviderReply reply = provider.send(request);
                entry.raw_text = std::move(reply.text);
                entry.provider_meta = std::move(reply.meta);
                break;
            } catch (const ProviderError& e) {
                if (e.kind() == ProviderError::Kind::refusal) {
                    entry.raw_text.clear();
                    entry.provider_meta = json{{"refusal", e.what()}, {"http_status", e.http_status()}};
                    break;
                }
                if (e.kind() != ProviderError::Kind::transient) throw;
                if (attempt >= max_attempts) {
                    throw ProviderError(ProviderError::Kind::exhausted,
                                        "retries exhausted after " + std::to_string(attempt) +
                                            " attempts for " + request.instance_id + ": " + e.what(),
                                        e.http_status());
                }
                const auto wait = policy.delay(attempt, jitter.uniform_real());
                if (policy.sleep) {
                    policy.sleep(wait);
                } else {
                    std::this_thread::sleep_for(wait);
                }
            }
        }
        entry.provider_meta["attempts"] = response.attempts;
        cache.store(response.digest, request.model_name, entry);
        response.raw_text = std::move(entry.raw_text);
        response.provider_meta = std::move(entry.provider_meta);
    }
    response.refused = response.provider_meta.contains("refusal");
    response.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);

    if (parser && !response.refused) {
        ParsedAnswer parsed = parser(response.raw_text);
        response.parsed_analysis = std::move(parsed.analysis);
        response.parse_status = parsed.status;
        if (parsed.status != ParseStatus::failed) response.parsed_answer = std::move(parsed.answer);
    }
    return response;
}

ModelResponse complete_with_reminder(const ChatRequest& request, Provider& provider, ResponseCache& cache,
                                     const RetryPolicy& policy, const AnswerParser& parser) {
    ModelResponse first = complete(request, provider, cache, policy, parser);
    if (first.parse_status != ParseStatus::failed || first.refused || !parser) return first;
    ChatRequest again = request;
    again.user_text += "\n";
    again.user_text += kJsonReminder;
    ModelResponse second = complete(again, provider, cache, policy, parser);
    second.provider_meta["reminder_retry"] = true;
    second.provider_meta["first_raw_text"] = first.raw_text;
    second.attempts += first.attempts;
    second.latency += first.latency;
    second.from_cache = second.from_cache && first.from_cache;
    return second;
}

// ---------------------------------------------------------------------------
// Answer parsing

namespace {

// End offset (one past '}') of the balanced object starting at `open`.
std::optional<std::size_t> balanced_end(std::string_view text, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::nullopt;
}

bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Rewrites bare True/False/None (outside strings) to JSON literals.
std::optional<std::string> repair_python_literals(std::string_view text) {
    static constexpr std::pair<std::string_view, std::string_view> kLiterals[] = {
        {"True", "true"}, {"False", "false"}, {"None", "null"}};
    std::string out;
    bool changed = false;
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            out.push_back(c);
            if (c == '\\' && i + 1 < text.size()) {
                out.push_back(text[++i]);
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
            out.push_back(c);
            continue;
        }
        bool replaced = false;
        if (i == 0 || !is_ident_char(text[i - 1])) {
            for (const auto& [from, to] : kLiterals) {
                if (text.substr(i, from.size()) == from &&
                    (i + from.size() == text.size() || !is_ident_char(text[i + from.size()]))) {
                    out += to;
                    i += from.size() - 1;
                    replaced = changed = true;
                    break;
                }
            }
        }
        if (!replaced) out.push_back(c);
    }
    if (!changed) return std::nullopt;
    return out;
}

std::optional<json> parse_object(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    return j;
}

const json* find_key(const json& obj, std::string_view key, bool& recovered) {
    if (auto it = obj.find(std::string(key)); it != obj.end()) return &*it;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (to_lower_ascii(trim(it.key())) == key) {
            recovered = true;
            return &*it;
        }
    }
    return nullptr;
}

// Shared front half of both parsers: object, analysis, and the answer node.
struct ObjectFields {
    ParsedAnswer parsed;
    const json* answer = nullptr;
    bool recovered = false;
    json object;
};

std::optional<ObjectFields> read_fields(std::string_view raw, ParsedAnswer& failure) {
    auto extracted = extract_json_object(raw);
    if (!extracted) {
        failure.error = "no JSON object found";
        return std::nullopt;
    }
    ObjectFields fields;
    fields.object = std::move(extracted->value);
    fields.recovered = !extracted->exact || extracted->repaired;
    if (const json* analysis = find_key(fields.object, "analysis", fields.recovered)) {
        if (analysis->is_string()) {
            fields.parsed.analysis = analysis->get<std::string>();
        } else {
            fields.parsed.analysis = analysis->dump();
            fields.recovered = true;
        }
    } else {
        fields.recovered = true;
    }
    fields.answer = find_key(fields.object, "answer", fields.recovered);
    if (fields.answer == nullptr) {
        failure.analysis = fields.parsed.analysis;
        failure.error = "answer key missing";
        return std::nullopt;
    }
    return fields;
}

} // namespace

std::optional<ExtractedObject> extract_json_object(std::string_view raw) {
    try {
        const std::string whole = trim(raw);
        if (auto j = parse_object(whole)) return ExtractedObject{std::move(*j), true, false};
        constexpr int kMaxStarts = 64;
        int starts = 0;
        for (std::size_t open = raw.find('{'); open != std::string_view::npos && starts < kMaxStarts;
             open = raw.find('{', open + 1), ++starts) {
            const auto end = balanced_end(raw, open);
            if (!end) continue;
            const std::string_view candidate = raw.substr(open, *end - open);
            if (auto j = parse_object(candidate)) return ExtractedObject{std::move(*j), false, false};
            if (auto repaired = repair_python_literals(candidate)) {
                if (auto j = parse_object(*repaired)) return ExtractedObject{std::move(*j), false, true};
            }
        }
        if (auto repaired = repair_python_literals(whole)) {
            if (auto j = parse_object(*repaired)) return ExtractedObject{std::move(*j), true, true};
        }
    } catch (const std::exception&) {
        // fall through: parsers are total
    }
    return std::nullopt;
}

ParsedAnswer parse_verification_answer(std::string_view raw_text) {
    ParsedAnswer failure;
    try {
        auto fields = read_fields(raw_text, failure);
        if (!fields) return failure;
        ParsedAnswer out = std::move(fields->parsed);
        const json& answer = *fields->answer;
        if (answer.is_boolean()) {
            out.answer = answer.get<bool>();
        } else if (answer.is_string()) {
            const std::string value = to_lower_ascii(trim(answer.get<std::string>()));
            if (value == "true") {
                out.answer = true;
            } else if (value == "false") {
                out.answer = false;
            } else {
                out.error = "answer '" + answer.get<std::string>() + "' is not a boolean";
                out.status = ParseStatus::failed;
                return out;
            }
            fields->recovered = true;
        } else {
            out.error = "answer is not a boolean";
            out.status = ParseStatus::failed;
            return out;
        }
        out.status = fields->recovered ? ParseStatus::recovered : ParseStatus::ok;
        return out;
    } catch (const std::exception& e) {
        failure.error = e.what();
        failure.answer.reset();
        failure.status = ParseStatus::failed;
        return failure;
    }
}

ParsedAnswer parse_attribution_answer(std::string_view raw_text, const std::vector<std::string>& valid_ids) {
    ParsedAnswer failure;
    try {
        if (valid_ids.empty()) {
            failure.error = "no valid author IDs";
            return failure;
        }
        auto fields = read_fields(raw_text, failure);
        if (!fields) return failure;
        ParsedAnswer out = std::move(fields->parsed);
        const json& answer = *fields->answer;
        std::string value;
        if (answer.is_string()) {
            value = answer.get<std::string>();
        } else if (answer.is_number_integer()) {
            value = std::to_string(answer.get<long long>());
            fields->recovered = true;
        } else {
            out.error = "answer is not an author ID";
            return out;
        }
        const std::string trimmed = trim(value);
        if (trimmed != value) fields->recovered = true;

        const std::string* exact = nullptr;
        const std::string* folded = nullptr;
        std::size_t folded_hits = 0;
        const std::string lowered = to_lower_ascii(trimmed);
        for (const auto& id : valid_ids) {
            if (id == trimmed) exact = &id;
            if (to_lower_ascii(id) == lowered) {
                folded = &id;
                ++folded_hits;
            }
        }
        if (exact != nullptr) {
            out.answer = *exact;
        } else if (folded_hits == 1) {
            out.answer = *folded;
            fields->recovered = true;
        } else {
            out.error = folded_hits > 1 ? "answer '" + trimmed + "' matches several IDs by case"
                                        : "answer '" + trimmed + "' is not a candidate";
            return out;
        }
        out.status = fields->recovered ? ParseStatus::recovered : ParseStatus::ok;
        return out;
    } catch (const std::exception& e) {
        failure.error = e.what();
        failure.answer.reset();
        failure.status = ParseStatus::failed;
        return failure;
    }
}

} // namespace authorbench
