#include "authorbench/linguistic_features.hpp"

#include "authorbench/error.hpp"
#include "authorbench/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <sstream>

namespace authorbench {

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path))
        throw LexiconError("missing lexicon " + path.filename().string() + " in " + path.parent_path().string());
    std::istringstream in(read_file(path));
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        out.push_back(std::move(t));
    }
    return out;
}

std::unordered_set<std::string> read_set(const std::filesystem::path& path, bool lower = true) {
    std::unordered_set<std::string> out;
    for (auto& l : read_lines(path)) out.insert(lower ? to_lower_ascii(l) : l);
    return out;
}

std::vector<std::string> longest_first(std::vector<std::string> v) {
    for (auto& s : v) s = to_lower_ascii(s);
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() > b.size() : a < b;
    });
    return v;
}

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ascii_punct(char c) {
    auto u = static_cast<unsigned char>(c);
    return u < 0x80 && std::ispunct(u);
}

// Multi-byte punctuation stripped from token edges and folded in the histogram.
constexpr std::array<std::string_view, 8> kWidePunct = {"‘", "’", "“", "”",
                                                        "…", "—", "–", "«"};

std::string_view fold_wide(std::string_view mark) {
    if (mark == "‘" || mark == "’") return "'";
    if (mark == "“" || mark == "”" || mark == "«") return "\"";
    if (mark == "…") return "…";
    if (mark == "—") return "—";
    if (mark == "–") return "-";
    return mark;
}

std::size_t wide_prefix(std::string_view s) {
    for (auto w : kWidePunct)
        if (s.starts_with(w)) return w.size();
    return 0;
}

std::size_t wide_suffix(std::string_view s) {
    for (auto w : kWidePunct)
        if (s.ends_with(w)) return w.size();
    return 0;
}

struct Token {
    std::string_view raw;
    std::string word;   // edge punctuation removed
    std::string lower;  // ASCII-lowercased, curly apostrophes folded
    bool alpha = false;
    bool sentence_initial = false;
    bool capitalized = false;
    bool break_after = false;  // raw ends with clause punctuation

    bool checked() const { return alpha && !(capitalized && !sentence_initial); }
};

std::string strip_edges(std::string_view raw) {
    std::string_view s = raw;
    for (;;) {
        if (!s.empty() && is_ascii_punct(s.front())) {
            s.remove_prefix(1);
        } else if (auto n = wide_prefix(s)) {
            s.remove_prefix(n);
        } else {
            break;
        }
    }
    for (;;) {
        if (s.size() >= 2 && s.back() == '%' && is_digit(s[s.size() - 2])) break;
        if (!s.empty() && is_ascii_punct(s.back())) {
            s.remove_suffix(1);
        } else if (auto n = wide_suffix(s)) {
            s.remove_suffix(n);
        } else {
            break;
        }
    }
    return std::string(s);
}

bool ends_sentence(std::string_view raw) {
    while (!raw.empty()) {
        char c = raw.back();
        if (c == '"' || c == '\'' || c == ')' || c == ']') {
            raw.remove_suffix(1);
        } else if (auto n = wide_suffix(raw); n && !raw.ends_with("…")) {
            raw.remove_suffix(n);
        } else {
            break;
        }
    }
    return raw.ends_with('.') || raw.ends_with('!') || raw.ends_with('?') || raw.ends_with("…");
}

bool ends_clause(std::string_view raw) {
    if (raw.empty()) return false;
    char c = raw.back();
    return c == ',' || c == ';' || c == ':' || c == '.' || c == '!' || c == '?' || c == ')' ||
           raw.ends_with("—") || raw.ends_with("…");
}

std::string fold_apostrophes(std::string s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.compare(i, 3, "’") == 0) {
            out += '\'';
            i += 2;
        } else {
            out += s[i];
        }
    }
    return out;
}

std::vector<Token> feature_tokens(std::string_view text) {
    std::vector<Token> out;
    bool next_initial = true;
    for (auto raw : split_whitespace(text)) {
        Token t;
        t.raw = raw;
        t.word = strip_edges(raw);
        t.lower = to_lower_ascii(fold_apostrophes(t.word));
        t.alpha = !t.word.empty() && std::all_of(t.word.begin(), t.word.end(), is_ascii_alpha);
        t.capitalized = !t.word.empty() && t.word[0] >= 'A' && t.word[0] <= 'Z';
        t.sentence_initial = next_initial;
        t.break_after = ends_clause(raw);
        // Pure punctuation tokens ("--", "...") do not consume sentence starts.
        if (!t.word.empty()) next_initial = ends_sentence(raw);
        else if (ends_sentence(raw)) next_initial = true;
        out.push_back(std::move(t));
    }
    return out;
}

std::size_t code_points(std::string_view s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

// True when OSA distance <= limit.
bool osa_within(std::string_view a, std::string_view b, std::size_t limit) {
    std::size_t n = a.size(), m = b.size();
    if ((n > m ? n - m : m - n) > limit) return false;
    std::vector<std::size_t> prev2(m + 1), prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        std::size_t row_min = cur[0];
        for (std::size_t j = 1; j <= m; ++j) {
            std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            std::size_t v = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
            if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) v = std::min(v, prev2[j - 2] + 1);
            cur[j] = v;
            row_min = std::min(row_min, v);
        }
        // A transposition reaches back two rows, so both must exceed the limit.
        if (row_min > limit && *std::min_element(prev.begin(), prev.end()) > limit) return false;
        std::swap(prev2, prev);
        std::swap(prev, cur);
    }
    return prev[m] <= limit;
}

bool near_dictionary_word(const LexiconSet& lex, const std::string& word) {
    std::size_t lo = word.size() >= 2 ? word.size() - 2 : 0;
    std::size_t hi = std::min(word.size() + 2, lex.dictionary_by_length.size() - 1);
    for (std::size_t len = lo; len <= hi; ++len)
        for (const auto& cand : lex.dictionary_by_length[len])
            if (osa_within(word, cand, 2)) return true;
    return false;
}

bool is_transposition_of_known(const LexiconSet& lex, const std::string& word) {
    for (std::size_t i = 0; i + 1 < word.size(); ++i) {
        if (word[i] == word[i + 1]) continue;
        std::string s = word;
        std::swap(s[i], s[i + 1]);
        if (lex.known_spelling(s)) return true;
    }
    return false;
}

bool is_numeral(std::string_view w) {
    if (!w.empty() && (w.front() == '+' || w.front() == '-')) w.remove_prefix(1);
    if (w.empty() || !is_digit(w.front())) return false;
    std::size_t i = 0;
    while (i < w.size() && (is_digit(w[i]) || w[i] == ',' || w[i] == '.')) ++i;
    if (!is_digit(w[i - 1])) return false;
    std::string_view rest = w.substr(i);
    if (rest.empty() || rest == "%" || rest == "s") return true;
    std::string r = to_lower_ascii(rest);
    return r == "st" || r == "nd" || r == "rd" || r == "th" || r == "k" || r == "m";
}

bool is_number_word(const LexiconSet& lex, const std::string& lower) {
    if (lower.empty()) return false;
    if (lex.number_words.count(lower)) return true;
    if (lower.find('-') == std::string::npos) return false;
    std::istringstream parts(lower);
    std::string part;
    bool any = false;
    while (std::getline(parts, part, '-')) {
        if (!lex.number_words.count(part)) return false;
        any = true;
    }
    return any;
}

bool is_laughter(std::string_view w) {
    auto repeated = [&](std::string_view unit, std::size_t min_reps) {
        if (w.size() < unit.size() * min_reps) return false;
        std::size_t i = 0;
        while (i + unit.size() <= w.size() && w.substr(i, unit.size()) == unit) i += unit.size();
        return i == w.size() || (i + 1 == w.size() && w[i] == unit[0]);
    };
    if (repeated("ha", 2) || repeated("he", 2)) return true;
    // lolol, lololol
    if (w.size() >= 5 && w.starts_with("lol")) return repeated("lo", 2);
    return false;
}

std::size_t prefix_match(const LexiconSet& lex, const std::string& w, std::string* affix) {
    for (const auto& p : lex.prefixes) {
        if (w.size() < p.size() + 3 || !w.starts_with(p)) continue;
        if (lex.dictionary.count(w.substr(p.size()))) {
            *affix = p + "-";
            return 1;
        }
    }
    return 0;
}

std::size_t suffix_match(const LexiconSet& lex, const std::string& w, std::string* affix) {
    for (const auto& s : lex.suffixes) {
        if (w.size() < s.size() + 3 || !w.ends_with(s)) continue;
        std::string stem = w.substr(0, w.size() - s.size());
        std::vector<std::string> cands = {stem, stem + "e"};
        if (stem.back() == 'i') cands.push_back(stem.substr(0, stem.size() - 1) + "y");
        if (s == "tion" || s == "sion") {
            for (auto tail : {"t", "te", "de", "se", "d"}) cands.push_back(stem + tail);
        }
        if (s == "able" || s == "ible") cands.push_back(stem + "ate");
        for (const auto& c : cands) {
            if (lex.dictionary.count(c)) {
                *affix = "-" + s;
                return 1;
            }
        }
    }
    return 0;
}

const std::array<std::string, 14> kTracked = {".", ",", ";", ":", "!", "?", "'", "\"", "-", "(", ")", "…", "—", "/"};

std::size_t count_interrobang_runs(std::string_view text) {
    std::size_t runs = 0;
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] != '?' && text[i] != '!') {
            ++i;
            continue;
        }
        bool q = false, e = false;
        while (i < text.size() && (text[i] == '?' || text[i] == '!')) {
            (text[i] == '?' ? q : e) = true;
            ++i;
        }
        if (q && e) ++runs;
    }
    return runs;
}

bool is_scare_span(std::string_view inner) {
    std::string t = trim(inner);
    if (t.empty() || t.size() > 30) return false;
    char last = t.back();
    if (last == ',' || last == '.' || last == '!' || last == '?') return false;
    auto words = split_whitespace(t);
    return words.size() <= 2;
}

std::size_t count_scare_quotes(std::string_view text) {
    std::size_t n = 0;
    // Straight quotes pair left to right.
    std::size_t open = std::string_view::npos;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '"') continue;
        if (open == std::string_view::npos) {
            open = i;
        } else {
            if (is_scare_span(text.substr(open + 1, i - open - 1))) ++n;
            open = std::string_view::npos;
        }
    }
    const std::string_view lq = "“", rq = "”";
    for (std::size_t i = text.find(lq); i != std::string_view::npos; i = text.find(lq, i + 1)) {
        std::size_t j = text.find(rq, i + lq.size());
        if (j == std::string_view::npos) break;
        std::size_t k = text.find(lq, i + lq.size());
        if (k != std::string_view::npos && k < j) continue;
        if (is_scare_span(text.substr(i + lq.size(), j - i - lq.size()))) ++n;
    }
    return n;
}

std::size_t count_double_spaces(std::string_view text) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] != ' ') {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && text[j] == ' ') ++j;
        bool inner = i > 0 && j < text.size() && !std::isspace(static_cast<unsigned char>(text[i - 1])) &&
                     !std::isspace(static_cast<unsigned char>(text[j]));
        if (j - i >= 2 && inner) ++n;
        i = j;
    }
    return n;
}

std::size_t count_doubled_marks(std::string_view text) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < text.size();) {
        char c = text[i];
        if (c != ',' && c != ';' && c != '.') {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && text[j] == c) ++j;
        std::size_t run = j - i;
        if (c == '.' ? run == 2 : run >= 2) ++n;
        i = j;
    }
    return n;
}

std::size_t spacing_anomaly(std::string_view raw) {
    auto is_mark = [](char c) { return c == ',' || c == ';' || c == ':' || c == '!' || c == '?'; };
    // " , " or ",word": the mark floats after a space.
    if (!raw.empty() && is_mark(raw.front())) {
        bool all_marks = std::all_of(raw.begin(), raw.end(), is_mark);
        if (all_marks || (raw.size() > 1 && is_ascii_alpha(raw[1]))) return 1;
    }
    for (std::size_t i = 1; i + 1 < raw.size(); ++i)
        if ((raw[i] == ',' || raw[i] == ';') && is_ascii_alpha(raw[i - 1]) && is_ascii_alpha(raw[i + 1])) return 1;
    return 0;
}

bool has_letter_run(std::string_view w) {
    std::size_t run = 1;
    for (std::size_t i = 1; i < w.size(); ++i) {
        run = (std::tolower(static_cast<unsigned char>(w[i])) == std::tolower(static_cast<unsigned char>(w[i - 1])))
                  ? run + 1
                  : 1;
        if (run >= 3) return true;
    }
    return false;
}

double per_token(std::size_t count, std::size_t tokens) {
    return tokens ? static_cast<double>(count) / static_cast<double>(tokens) : 0.0;
}

} // namespace

LexiconSet LexiconSet::load(const std::filesystem::path& dir) {
    LexiconSet lex;
    auto version = read_lines(dir / "VERSION");
    if (version.empty()) throw LexiconError("empty lexicon VERSION in " + dir.string());
    lex.version = version.front();
    lex.modals = read_set(dir / "modals.txt");
    for (const auto& line : read_lines(dir / "modal_contractions.txt")) {
        auto colon = line.find(':');
        if (colon == std::string::npos) throw LexiconError("bad modal contraction line: " + line);
        lex.modal_contractions.emplace(to_lower_ascii(line.substr(0, colon)), to_lower_ascii(line.substr(colon + 1)));
    }
    lex.particles = read_set(dir / "particles.txt");
    lex.phrasal_verbs = read_set(dir / "phrasal_verb_bases.txt");
    lex.frequent = read_set(dir / "frequency_top5000.txt");
    lex.dictionary = read_set(dir / "dictionary.txt");
    lex.british_variants = read_set(dir / "british_variants.txt");
    lex.number_words = read_set(dir / "number_words.txt");
    lex.prefixes = longest_first(read_lines(dir / "prefixes.txt"));
    lex.suffixes = longest_first(read_lines(dir / "suffixes.txt"));
    lex.humor_markers = read_set(dir / "humor_markers.txt", false);
    for (const auto& line : read_lines(dir / "sarcasm_markers.txt")) {
        std::vector<std::string> words;
        for (auto w : split_whitespace(to_lower_ascii(line))) words.emplace_back(w);
        lex.sarcasm_phrases.push_back(std::move(words));
    }
    std::size_t longest = 0;
    for (const auto& w : lex.dictionary) longest = std::max(longest, w.size());
    lex.dictionary_by_length.resize(longest + 3);
    for (const auto& w : lex.dictionary) lex.dictionary_by_length[w.size()].push_back(w);
    for (auto& bucket : lex.dictionary_by_length) std::sort(bucket.begin(), bucket.end());
    return lex;
}

const LexiconSet& LexiconSet::builtin() {
    static const LexiconSet lex = load(data_dir() / "lexicons");
    return lex;
}

bool LexiconSet::known_spelling(const std::string& lower) const {
    return dictionary.count(lower) > 0 || british_variants.count(lower) > 0;
}

const std::vector<std::string>& tracked_punctuation() {
    static const std::vector<std::string> marks(kTracked.begin(), kTracked.end());
    return marks;
}

nlohmann::ordered_json FeatureProfile::to_json() const {
    nlohmann::ordered_json j;
    j["lexicon_version"] = lexicon_version;
    j["token_count"] = token_count;
    j["char_count"] = char_count;
    j["modal_verb_count"] = modal_verb_count;
    j["modal_verb_rate"] = modal_verb_rate;
    j["phrasal_verb_count"] = phrasal_verb_count;
    j["punctuation_counts"] = punctuation_counts;
    j["punctuation_histogram"] = punctuation_histogram;
    j["rare_word_count"] = rare_word_count;
    j["rare_word_rate"] = rare_word_rate;
    j["affix_counts"] = affix_counts;
    j["quantity_token_count"] = quantity_token_count;
    j["typo_count"] = typo_count;
    j["misspelling_count"] = misspelling_count;
    j["humor_marker_count"] = humor_marker_count;
    j["sarcasm_marker_count"] = sarcasm_marker_count;
    j["misspellings"] = misspellings;
    return j;
}

std::size_t osa_distance(std::string_view a, std::string_view b) {
    std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
    for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
            if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1])
                d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
        }
    }
    return d[n][m];
}

FeatureProfile extract_profile(std::string_view input, const LexiconSet& lex) {
    const std::string text = normalize_nfc(input);
    FeatureProfile p;
    p.lexicon_version = lex.version;
    for (const auto& m : kTracked) p.punctuation_counts[m] = 0;

    const auto tokens = feature_tokens(text);
    p.token_count = tokens.size();
    p.char_count = code_points(text);

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (is_ascii_punct(c)) {
            auto key = std::string(1, c);
            if (p.punctuation_counts.count(key)) ++p.punctuation_counts[key];
            continue;
        }
        if (auto n = wide_prefix(std::string_view(text).substr(i))) {
            auto key = std::string(fold_wide(std::string_view(text).substr(i, n)));
            if (p.punctuation_counts.count(key)) ++p.punctuation_counts[key];
            i += n - 1;
        }
    }
    for (const auto& [mark, count] : p.punctuation_counts)
        p.punctuation_histogram[mark] =
            p.char_count ? static_cast<double>(count) * 1000.0 / static_cast<double>(p.char_count) : 0.0;

    std::size_t checked = 0;
    std::vector<std::string_view> lower_seq;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& t = tokens[i];
        const std::string& w = t.lower;

        if (lex.modals.count(w) || lex.modal_contractions.count(w)) ++p.modal_verb_count;

        if (lex.phrasal_verbs.count(w)) {
            for (std::size_t j = i + 1; j <= i + 2 && j < tokens.size(); ++j) {
                if (tokens[j - 1].break_after) break;
                if (lex.particles.count(tokens[j].lower)) {
                    ++p.phrasal_verb_count;
                    break;
                }
            }
        }

        if (is_numeral(t.word) || is_number_word(lex, w)) ++p.quantity_token_count;

        // Humor: emoticons compare raw, laughter words compare lowercased.
        {
            std::string_view raw = t.raw;
            bool hit = lex.humor_markers.count(std::string(raw)) > 0;
            if (!hit) {
                std::string_view r = raw;
                while (r.size() > 2 && (r.back() == '.' || r.back() == ',' || r.back() == '!' || r.back() == '?'))
                    r.remove_suffix(1);
                hit = lex.humor_markers.count(std::string(r)) > 0;
            }
            if (!hit && !w.empty()) hit = lex.humor_markers.count(w) > 0 || is_laughter(w);
            if (hit) ++p.humor_marker_count;
        }

        // Typos that do not depend on the dictionary.
        p.typo_count += spacing_anomaly(t.raw);
        if (t.alpha && has_letter_run(t.word)) ++p.typo_count;
        if (i > 0 && t.alpha && tokens[i - 1].alpha && tokens[i - 1].lower == w &&
            tokens[i - 1].raw.size() == tokens[i - 1].word.size())
            ++p.typo_count;

        lower_seq.push_back(w);

        if (!t.checked()) continue;
        ++checked;
        if (!lex.frequent.count(w)) ++p.rare_word_count;

        std::string affix;
        if (prefix_match(lex, w, &affix)) ++p.affix_counts[affix];
        if (suffix_match(lex, w, &affix)) ++p.affix_counts[affix];

        if (w.size() >= 3 && !lex.known_spelling(w)) {
            bool transposed = is_transposition_of_known(lex, w);
            if (transposed) ++p.typo_count;
            if (transposed || near_dictionary_word(lex, w)) {
                ++p.misspelling_count;
                p.misspellings.push_back(t.word);
            }
        }
    }
    p.typo_count += count_double_spaces(text) + count_doubled_marks(text);

    p.modal_verb_rate = per_token(p.modal_verb_count, p.token_count);
    p.rare_word_rate = per_token(p.rare_word_count, checked);

    p.sarcasm_marker_count = count_interrobang_runs(text) + count_scare_quotes(text);
    for (const auto& phrase : lex.sarcasm_phrases) {
        if (phrase.size() == 1 && phrase[0].starts_with('/')) {
            for (const auto& t : tokens)
                if (to_lower_ascii(t.raw) == phrase[0]) ++p.sarcasm_marker_count;
            continue;
        }
        for (std::size_t i = 0; i + phrase.size() <= lower_seq.size(); ++i) {
            bool match = true;
            for (std::size_t k = 0; k < phrase.size() && match; ++k) match = lower_seq[i + k] == phrase[k];
            if (match) ++p.sarcasm_marker_count;
        }
    }
    return p;
}

double profile_distance(const FeatureProfile& p, const FeatureProfile& q, const ProfileWeights& w) {
    if (p.lexicon_version != q.lexicon_version)
        throw LexiconError("profiles come from different lexicon versions: " + p.lexicon_version + " vs " +
                           q.lexicon_version);
    auto gap = [&](std::size_t a, std::size_t b) {
        return std::abs(per_token(a, p.token_count) - per_token(b, q.token_count));
    };
    auto map_gap = [](const auto& a, const auto& b, auto value) {
        std::set<std::string> keys;
        for (const auto& [k, _] : a) keys.insert(k);
        for (const auto& [k, _] : b) keys.insert(k);
        double sum = 0.0;
        for (const auto& k : keys) {
            auto ia = a.find(k);
            auto ib = b.find(k);
            double va = ia == a.end() ? 0.0 : value(ia->second, true);
            double vb = ib == b.end() ? 0.0 : value(ib->second, false);
            sum += std::abs(va - vb);
        }
        return sum;
    };

    double d = 0.0;
    d += w.modal_verbs * std::abs(p.modal_verb_rate - q.modal_verb_rate);
    d += w.phrasal_verbs * gap(p.phrasal_verb_count, q.phrasal_verb_count);
    d += w.punctuation *
         map_gap(p.punctuation_histogram, q.punctuation_histogram, [](double v, bool) { return v / 1000.0; });
    d += w.rare_words * std::abs(p.rare_word_rate - q.rare_word_rate);
    d += w.affixes * map_gap(p.affix_counts, q.affix_counts, [&](std::size_t v, bool first) {
        return per_token(v, first ? p.token_count : q.token_count);
    });
    d += w.quantities * gap(p.quantity_token_count, q.quantity_token_count);
    d += w.typographical_errors * gap(p.typo_count, q.typo_count);
    d += w.misspellings * gap(p.misspelling_count, q.misspelling_count);
    d += w.humor * gap(p.humor_marker_count, q.humor_marker_count);
    d += w.sarcasm * gap(p.sarcasm_marker_count, q.sarcasm_marker_count);
    return d;
}

std::string_view to_string(ClaimKind kind) {
    switch (kind) {
    case ClaimKind::none: return "none";
    case ClaimKind::difference: return "difference";
    case ClaimKind::similarity: return "similarity";
    }
    return "none";
}

std::string_view to_string(CrosscheckVerdict verdict) {
    switch (verdict) {
    case CrosscheckVerdict::consistent: return "consistent";
    case CrosscheckVerdict::inconsistent: return "inconsistent";
    case CrosscheckVerdict::no_claim: return "no claim";
    case CrosscheckVerdict::unverifiable: return "not machine-checkable";
    }
    return "no claim";
}

nlohmann::ordered_json CrosscheckReport::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        nlohmann::ordered_json j;
        j["feature"] = slug(e.feature);
        j["evidence"] = e.evidence;
        j["claim"] = to_string(e.claim);
        j["checkable"] = e.checkable;
        if (e.checkable) {
            j["measure_a"] = e.measure_a;
            j["measure_b"] = e.measure_b;
            j["measured_difference"] = e.measured_difference;
        }
        j["verdict"] = to_string(e.verdict);
        arr.push_back(std::move(j));
    }
    return nlohmann::ordered_json{{"entries", std::move(arr)}};
}

namespace {

const std::vector<std::string_view>& mention_terms(LinguisticFeature f) {
    static const std::map<LinguisticFeature, std::vector<std::string_view>> terms = {
        {LinguisticFeature::phrasal_verbs, {"phrasal"}},
        {LinguisticFeature::modal_verbs, {"modal"}},
        {LinguisticFeature::punctuation, {"punctuat", "comma", "semicolon", "exclamation", "ellips", "question mark"}},
        {LinguisticFeature::rare_words,
         {"rare word", "rare vocabulary", "rare term", "uncommon word", "uncommon vocabulary", "unusual word"}},
        {LinguisticFeature::affixes, {"affix", "prefix", "suffix"}},
        {LinguisticFeature::quantities, {"quantit", "numeral", "numeric", "digit"}},
        {LinguisticFeature::humor, {"humor", "humour", "joke", "joking", "funny", "laugh"}},
        {LinguisticFeature::sarcasm, {"sarcas", "irony", "ironic"}},
        {LinguisticFeature::typographical_errors, {"typo"}},
        {LinguisticFeature::misspellings, {"misspell", "spelling error", "spelling mistake"}},
    };
    return terms.at(f);
}

bool mentions(std::string_view lower_sentence, std::string_view term) {
    for (std::size_t at = lower_sentence.find(term); at != std::string_view::npos;
         at = lower_sentence.find(term, at + 1)) {
        if (at == 0 || !is_ascii_alpha(lower_sentence[at - 1])) return true;
    }
    return false;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        cur += c;
        bool boundary = c == '\n' ||
                        ((c == '.' || c == '!' || c == '?') &&
                         (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]))));
        if (boundary) {
            auto t = trim(cur);
            if (!t.empty()) out.push_back(std::move(t));
            cur.clear();
        }
    }
    auto t = trim(cur);
    if (!t.empty()) out.push_back(std::move(t));
    return out;
}

ClaimKind classify_claim(std::string_view sentence) {
    static const std::unordered_set<std::string> similar = {
        "similar", "similarly", "same", "both", "consistent", "consistently", "share", "shared",
        "shares", "alike", "comparable", "common", "likewise", "identical", "matching", "match"};
    static const std::unordered_set<std::string> different = {
        "differ", "differs", "different", "difference", "differences", "differently", "whereas", "while",
        "unlike", "contrast", "contrasting", "more", "less", "fewer", "only", "absent", "lacks", "lack",
        "none", "no", "not", "but", "however", "distinct", "varies", "vary", "inconsistent"};
    std::size_t s = 0, d = 0;
    for (const auto& tok : tokenize(sentence)) {
        if (similar.count(tok)) ++s;
        if (different.count(tok)) ++d;
    }
    // A bare mention is read as citing the feature as a difference.
    return s > d ? ClaimKind::similarity : ClaimKind::difference;
}

struct Measure {
    double a = 0.0;
    double b = 0.0;
    bool differs = false;
};

bool rates_differ(double a, double b) {
    double hi = std::max(a, b);
    return hi > 0.0 && std::abs(a - b) / hi >= kMeasuredDifferenceRatio;
}

template <typename Map>
Measure map_measure(const Map& ma, const Map& mb, std::size_t ta, std::size_t tb, bool per_tok) {
    std::set<std::string> keys;
    double sa = 0.0, sb = 0.0, l1 = 0.0;
    for (const auto& [k, _] : ma) keys.insert(k);
    for (const auto& [k, _] : mb) keys.insert(k);
    for (const auto& k : keys) {
        auto ia = ma.find(k);
        auto ib = mb.find(k);
        double va = ia == ma.end() ? 0.0 : static_cast<double>(ia->second);
        double vb = ib == mb.end() ? 0.0 : static_cast<double>(ib->second);
        if (per_tok) {
            va = ta ? va / static_cast<double>(ta) : 0.0;
            vb = tb ? vb / static_cast<double>(tb) : 0.0;
        }
        sa += va;
        sb += vb;
        l1 += std::abs(va - vb);
    }
    double hi = std::max(sa, sb);
    return {sa, sb, hi > 0.0 && l1 / hi >= kMeasuredDifferenceRatio};
}

Measure measure(LinguisticFeature f, const FeatureProfile& a, const FeatureProfile& b) {
    auto counts = [&](std::size_t ca, std::size_t cb) {
        Measure m{per_token(ca, a.token_count), per_token(cb, b.token_count)};
        m.differs = rates_differ(m.a, m.b);
        return m;
    };
    switch (f) {
    case LinguisticFeature::modal_verbs: {
        Measure m{a.modal_verb_rate, b.modal_verb_rate};
        m.differs = rates_differ(m.a, m.b);
        return m;
    }
    case LinguisticFeature::rare_words: {
        Measure m{a.rare_word_rate, b.rare_word_rate};
        m.differs = rates_differ(m.a, m.b);
        return m;
    }
    case LinguisticFeature::phrasal_verbs: return counts(a.phrasal_verb_count, b.phrasal_verb_count);
    case LinguisticFeature::quantities: return counts(a.quantity_token_count, b.quantity_token_count);
    case LinguisticFeature::typographical_errors: return counts(a.typo_count, b.typo_count);
    case LinguisticFeature::misspellings: return counts(a.misspelling_count, b.misspelling_count);
    case LinguisticFeature::punctuation:
        return map_measure(a.punctuation_histogram, b.punctuation_histogram, 0, 0, false);
    case LinguisticFeature::affixes:
        return map_measure(a.affix_counts, b.affix_counts, a.token_count, b.token_count, true);
    case LinguisticFeature::humor:
    case LinguisticFeature::sarcasm: break;
    }
    return {};
}

} // namespace

CrosscheckReport explanation_crosscheck(std::string_view analysis_text, const FeatureProfile& profile_a,
                                        const FeatureProfile& profile_b) {
    CrosscheckReport report;
    const auto sentences = split_sentences(analysis_text);
    for (auto f : all_features()) {
        const std::string* hit = nullptr;
        for (const auto& s : sentences) {
            std::string lower = to_lower_ascii(s);
            for (auto term : mention_terms(f)) {
                if (mentions(lower, term)) {
                    hit = &s;
                    break;
                }
            }
            if (hit) break;
        }
        if (!hit) continue;

        CrosscheckEntry e;
        e.feature = f;
        e.evidence = *hit;
        if (f == LinguisticFeature::humor || f == LinguisticFeature::sarcasm) {
            e.checkable = false;
            e.claim = ClaimKind::none;
            e.verdict = CrosscheckVerdict::unverifiable;
        } else {
            e.claim = classify_claim(*hit);
            auto m = measure(f, profile_a, profile_b);
            e.measure_a = m.a;
            e.measure_b = m.b;
            e.measured_difference = m.differs;
            bool claims_difference = e.claim == ClaimKind::difference;
            e.verdict = claims_difference == m.differs ? CrosscheckVerdict::consistent
                                                       : CrosscheckVerdict::inconsistent;
        }
        report.entries.push_back(std::move(e));
    }
    return report;
}

} // namespace authorbench
