#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace authorbench {

/// `*` matches any run of characters (including none), `?` one character.
bool glob_match(std::string_view pattern, std::string_view text);

/// Scripted provider behaviour. Rules are tried in order and the first match
/// wins. A pattern is "digest:<glob>" (matched against the request digest),
/// "instance:<glob>" or a bare glob (both matched against the instance id).
struct MockScript {
    struct Rule {
        std::string pattern;
        std::string response;
    };

    std::vector<Rule> rules;
    std::optional<std::string> default_response;

    const std::string* match(std::string_view instance_id, std::string_view digest) const;

    nlohmann::ordered_json to_json() const;
    static MockScript from_json(const nlohmann::json& j);
    static MockScript load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

} // namespace authorbench
