#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace authorbench {

/// Unicode NFC. Invalid UTF-8 sequences are replaced with U+FFFD.
std::string normalize_nfc(std::string_view text);

/// NFC, outer whitespace trimmed, inner whitespace runs collapsed to one
/// ASCII space. Case and punctuation are preserved.
std::string normalize_for_dedup(std::string_view text);

/// Trims Unicode whitespace from both ends.
std::string trim(std::string_view text);

/// Lowercased maximal runs of Unicode letters/digits. Shared by the TF-IDF
/// baseline and the explanation term counter.
std::vector<std::string> tokenize(std::string_view text);

std::vector<std::string_view> split_whitespace(std::string_view text);

std::string to_lower_ascii(std::string_view text);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Root of templates/ and lexicons/. AUTHORBENCH_DATA_DIR overrides the
/// compiled-in location.
std::filesystem::path data_dir();

} // namespace authorbench
