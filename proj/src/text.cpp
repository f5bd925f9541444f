#include "authorbench/text.hpp"

#include "authorbench/error.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace authorbench {

namespace {

// Decodes the code point at `i`, advancing `i`. Returns -1 on malformed input
// (ICU has already advanced past the bad byte).
UChar32 next_code_point(std::string_view text, std::size_t& i) {
    auto offset = static_cast<int32_t>(i);
    UChar32 c = 0;
    U8_NEXT(reinterpret_cast<const uint8_t*>(text.data()), offset,
            static_cast<int32_t>(text.size()), c);
    i = static_cast<std::size_t>(offset);
    return c;
}

void append_code_point(std::string& out, UChar32 c) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(buf, len, U8_MAX_LENGTH, c, error);
    if (!error) out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
}

bool is_space(UChar32 c) { return c >= 0 && u_isUWhiteSpace(c); }

} // namespace

std::string normalize_nfc(std::string_view text) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
    const auto source = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    const icu::UnicodeString normalized = nfc->normalize(source, status);
    if (U_FAILURE(status)) throw Error("NFC normalization failed");
    std::string out;
    normalized.toUTF8String(out);
    return out;
}

std::string trim(std::string_view text) {
    std::size_t begin = text.size();
    std::size_t end = 0;
    for (std::size_t i = 0; i < text.size();) {
        const std::size_t start = i;
        const UChar32 c = next_code_point(text, i);
        if (!is_space(c)) {
            if (begin == text.size()) begin = start;
            end = i;
        }
    }
    if (begin >= end) return {};
    return std::string(text.substr(begin, end - begin));
}

std::string normalize_for_dedup(std::string_view text) {
    const std::string nfc = normalize_nfc(text);
    std::string out;
    out.reserve(nfc.size());
    bool pending_space = false;
    for (std::size_t i = 0; i < nfc.size();) {
        const std::size_t start = i;
        const UChar32 c = next_code_point(nfc, i);
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.append(nfc, start, i - start);
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (std::size_t i = 0; i < text.size();) {
        const UChar32 c = next_code_point(text, i);
        if (c >= 0 && u_isalnum(c)) {
            append_code_point(current, u_tolower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t token_start = std::string_view::npos;
    for (std::size_t i = 0; i < text.size();) {
        const std::size_t start = i;
        const UChar32 c = next_code_point(text, i);
        if (is_space(c)) {
            if (token_start != std::string_view::npos) {
                out.push_back(text.substr(token_start, start - token_start));
                token_start = std::string_view::npos;
            }
        } else if (token_start == std::string_view::npos) {
            token_start = start;
        }
    }
    if (token_start != std::string_view::npos) out.push_back(text.substr(token_start));
    return out;
}

std::string to_lower_ascii(std::string_view text) {
    std::string out(text);
    for (char& ch : out) {
        if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0x0F]);
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("short write to " + path.string());
}

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("AUTHORBENCH_DATA_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return AUTHORBENCH_DEFAULT_DATA_DIR;
}

} // namespace authorbench
