#include "authorbench/baselines.hpp"
#include "authorbench/error.hpp"
#include "authorbench/llm_client.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>

namespace authorbench {

using nlohmann::json;

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path without trailing slash
};

Endpoint split_endpoint(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw ConfigError("endpoint must include a scheme: " + url);
    const auto slash = url.find('/', scheme + 3);
    Endpoint e;
    e.origin = url.substr(0, slash);
    e.prefix = slash == std::string::npos ? std::string() : url.substr(slash);
    while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
    return e;
}

std::string read_credential(const std::string& env_name) {
    const char* value = std::getenv(env_name.c_str());
    if (value == nullptr || *value == '\0') {
        throw ConfigError("credential environment variable " + env_name + " is not set");
    }
    return value;
}

bool is_transient(int status) { return status == 408 || status == 409 || status == 429 || status >= 500; }

json post_json(const std::string& endpoint, const std::string& path, const std::string& api_key,
               std::chrono::seconds timeout, const json& body) {
    const Endpoint e = split_endpoint(endpoint);
    httplib::Client client(e.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    const httplib::Headers headers = {{"Authorization", "Bearer " + api_key}};
    auto result = client.Post(e.prefix + path, headers, body.dump(), "application/json");
    if (!result) {
        throw ProviderError(ProviderError::Kind::transient,
                            "transport error: " + httplib::to_string(result.error()));
    }
    const int status = result->status;
    if (status == 401 || status == 403) {
        throw ProviderError(ProviderError::Kind::auth, "authentication failed (HTTP " + std::to_string(status) + ")",
                            status);
    }
    if (is_transient(status)) {
        throw ProviderError(ProviderError::Kind::transient, "HTTP " + std::to_string(status), status);
    }
    json payload = json::parse(result->body, nullptr, false);
    if (status != 200) {
        const std::string code = payload.is_object() && payload.contains("error") && payload["error"].is_object()
                                     ? payload["error"].value("code", std::string())
                                     : std::string();
        if (code == "content_filter" || code == "content_policy_violation") {
            throw ProviderError(ProviderError::Kind::refusal, "request refused: " + code, status);
        }
        throw ProviderError(ProviderError::Kind::invalid,
                            "HTTP " + std::to_string(status) + ": " + result->body.substr(0, 200), status);
    }
    if (payload.is_discarded()) throw ProviderError(ProviderError::Kind::invalid, "non-JSON response body", status);
    return payload;
}

} // namespace

OpenAiCompatibleProvider::OpenAiCompatibleProvider(Settings settings)
    : settings_(std::move(settings)), api_key_(read_credential(settings_.api_key_env)) {
    split_endpoint(settings_.endpoint);
}

ProviderReply OpenAiCompatibleProvider::send(const ChatRequest& request) {
    json body;
    body["model"] = request.model_name;
    body["messages"] = json::array({
        {{"role", "system"}, {"content", request.system_text}},
        {{"role", "user"}, {"content", request.user_text}},
    });
    body["temperature"] = request.temperature;
    body["top_p"] = request.top_p;
    if (request.max_output_tokens) body["max_tokens"] = *request.max_output_tokens;

    const json payload = post_json(settings_.endpoint, "/chat/completions", api_key_, settings_.timeout, body);
    try {
        const json& choice = payload.at("choices").at(0);
        const json& message = choice.at("message");
        const std::string finish = choice.value("finish_reason", std::string());
        if (finish == "content_filter" || (message.contains("refusal") && message["refusal"].is_string())) {
            throw ProviderError(ProviderError::Kind::refusal,
                                message.contains("refusal") && message["refusal"].is_string()
                                    ? message["refusal"].get<std::string>()
                                    : "content filtered",
                                200);
        }
        ProviderReply reply;
        reply.text = message.at("content").is_string() ? message.at("content").get<std::string>() : std::string();
        reply.meta["provider"] = name();
        reply.meta["finish_reason"] = finish;
        if (payload.contains("model")) reply.meta["model"] = payload["model"];
        if (payload.contains("usage")) reply.meta["usage"] = payload["usage"];
        return reply;
    } catch (const json::exception& e) {
        throw ProviderError(ProviderError::Kind::invalid, std::string("unexpected completion shape: ") + e.what(), 200);
    }
}

HttpEmbeddingProvider::HttpEmbeddingProvider(Settings settings)
    : settings_(std::move(settings)), api_key_(read_credential(settings_.api_key_env)) {
    split_endpoint(settings_.endpoint);
    if (settings_.model.empty()) throw ConfigError("embedding provider needs a model name");
}

std::vector<double> HttpEmbeddingProvider::embed(std::string_view text) {
    json body;
    body["model"] = settings_.model;
    body["input"] = std::string(text);
    const json payload = post_json(settings_.endpoint, "/embeddings", api_key_, settings_.timeout, body);
    try {
        return payload.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ProviderError(ProviderError::Kind::invalid, std::string("unexpected embedding shape: ") + e.what(), 200);
    }
}

} // namespace authorbench
