#include "authorbench/fixtures.hpp"

#include "authorbench/error.hpp"
#include "authorbench/rng.hpp"
#include "authorbench/text.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <set>

namespace authorbench {

namespace {

constexpr const char* kVocabulary[] = {
#include "synthetic_vocabulary.inc"
};
constexpr std::size_t kVocabularySize = std::size(kVocabulary);

constexpr std::size_t kCoreWords = 16;
constexpr std::size_t kExtraWords = 6;
constexpr std::size_t kExtraPerDoc = 3;
constexpr std::size_t kWordsPerAuthor = kCoreWords + kExtraWords;
constexpr std::size_t kSentenceLength = 6;

constexpr std::array<const char*, 9> kModals = {"can", "could", "may", "might", "must",
                                                "shall", "should", "will", "would"};

// Mid-sentence mark and sentence terminator per punctuation habit.
struct Habit {
    const char* inner;
    const char* end;
};
constexpr std::array<Habit, 6> kHabits = {{
    {",", "."},
    {";", "."},
    {",", "!"},
    {":", "."},
    {" -", "..."},
    {",", "?"},
}};

std::string capitalize(std::string w) {
    if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
    return w;
}

} // namespace

bool glob_match(std::string_view pattern, std::string_view text) {
    std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

const std::string* MockScript::match(std::string_view instance_id, std::string_view digest) const {
    for (const auto& rule : rules) {
        std::string_view pat = rule.pattern;
        bool hit;
        if (pat.starts_with("digest:")) hit = glob_match(pat.substr(7), digest);
        else if (pat.starts_with("instance:")) hit = glob_match(pat.substr(9), instance_id);
        else hit = glob_match(pat, instance_id);
        if (hit) return &rule.response;
    }
    return default_response ? &*default_response : nullptr;
}

nlohmann::ordered_json MockScript::to_json() const {
    nlohmann::ordered_json j;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rules) arr.push_back({{"pattern", r.pattern}, {"response", r.response}});
    j["rules"] = std::move(arr);
    if (default_response) j["default"] = *default_response;
    return j;
}

MockScript MockScript::from_json(const nlohmann::json& j) {
    MockScript s;
    try {
        if (j.contains("rules")) {
            for (const auto& r : j.at("rules"))
                s.rules.push_back({r.at("pattern").get<std::string>(), r.at("response").get<std::string>()});
        }
        if (j.contains("default") && !j.at("default").is_null()) s.default_response = j.at("default").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("mock script: ") + e.what());
    }
    return s;
}

MockScript MockScript::load(const std::filesystem::path& path) {
    try {
        return from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("mock script " + path.string() + ": " + e.what());
    }
}

void MockScript::save(const std::filesystem::path& path) const {
    write_file(path, to_json().dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n");
}

const std::vector<std::string>& synthetic_misspellings() {
    static const std::vector<std::string> words = {
        "recieve", "definately", "seperate", "occured", "untill", "wierd", "beleive",
        "tommorow", "goverment", "accomodate", "neccessary", "existance", "enviroment", "calender",
        "begining", "succesful", "arguement", "occassion", "truely", "becuase", "freind", "thier",
        "finaly", "basicly", "publically",
    };
    return words;
}

Corpus build_synthetic_corpus(std::size_t n_authors, std::size_t docs_per_author, std::uint64_t seed) {
    if (n_authors < 2) throw CorpusError("synthetic corpus needs at least 2 authors");
    if (docs_per_author < 2) throw CorpusError("synthetic corpus needs at least 2 documents per author");
    if (n_authors * kWordsPerAuthor > kVocabularySize)
        throw CorpusError("synthetic corpus supports at most " + std::to_string(kVocabularySize / kWordsPerAuthor) +
                          " authors");

    std::vector<std::string> pool(std::begin(kVocabulary), std::end(kVocabulary));
    SplitMix64 rng(seed);
    rng.shuffle(std::span<std::string>(pool));

    const auto& misspellings = synthetic_misspellings();
    const int width = std::max<int>(2, static_cast<int>(std::to_string(n_authors).size()));
    Corpus corpus;
    corpus.name = "synthetic";
    for (std::size_t a = 0; a < n_authors; ++a) {
        char id[32];
        std::snprintf(id, sizeof id, "author_%0*zu", width, a + 1);
        const auto first = pool.begin() + static_cast<std::ptrdiff_t>(a * kWordsPerAuthor);
        std::vector<std::string> core(first, first + kCoreWords);
        std::vector<std::string> extra(first + kCoreWords, first + kWordsPerAuthor);
        const std::string modal = kModals[a % kModals.size()];
        const std::string& typo = misspellings[a % misspellings.size()];
        const Habit habit = kHabits[a % kHabits.size()];

        for (std::size_t d = 0; d < docs_per_author; ++d) {
            SplitMix64 doc_rng = SplitMix64::for_stream(seed ^ 0x5eedULL, a * 1009 + d);
            std::vector<std::string> optional = extra;
            doc_rng.shuffle(std::span<std::string>(optional));

            std::vector<std::string> words = core;
            words.insert(words.end(), optional.begin(), optional.begin() + kExtraPerDoc);
            words.insert(words.end(), {"the", "the", "and", modal, typo});
            doc_rng.shuffle(std::span<std::string>(words));

            std::string text;
            for (std::size_t i = 0; i < words.size(); ++i) {
                std::size_t pos = i % kSentenceLength;
                if (pos == 0) {
                    if (i) text += ' ';
                    text += capitalize(words[i]);
                } else {
                    text += ' ';
                    text += words[i];
                }
                bool last = pos + 1 == kSentenceLength || i + 1 == words.size();
                if (pos == 2 && !last) text += habit.inner;
                if (last) {
                    std::size_t sentence = i / kSentenceLength;
                    text += sentence % 2 == 1 ? habit.end : ".";
                }
            }
            Document doc;
            doc.doc_id = std::string(id) + "-d" + std::to_string(d + 1);
            doc.author_id = id;
            doc.text = std::move(text);
            corpus.documents.push_back(std::move(doc));
        }
    }
    return corpus;
}

double vocabulary_overlap(std::string_view a, std::string_view b) {
    auto ta = tokenize(a), tb = tokenize(b);
    std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
    std::size_t inter = 0;
    for (const auto& w : sa) inter += sb.count(w);
    std::size_t uni = sa.size() + sb.size() - inter;
    return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
}

std::string scripted_reply(const Answer& answer, std::string_view analysis) {
    nlohmann::ordered_json j;
    j["analysis"] = analysis;
    if (const bool* b = std::get_if<bool>(&answer)) j["answer"] = *b;
    else j["answer"] = std::get<std::string>(answer);
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

MockScript oracle_mock(const std::map<std::string, Answer>& truths, std::span<const std::string> instance_ids) {
    MockScript script;
    for (const auto& id : instance_ids) {
        auto it = truths.find(id);
        if (it == truths.end()) throw ConfigError("oracle mock: no truth for instance " + id);
        script.rules.push_back({"instance:" + id, scripted_reply(it->second, "Oracle answer.")});
    }
    return script;
}

MockScript oracle_mock(const VerificationSample& sample) {
    std::map<std::string, Answer> truths;
    std::vector<std::string> ids;
    for (const auto& rep : sample.repetitions)
        for (const auto& inst : rep) {
            truths.emplace(inst.instance_id, inst.same_author);
            ids.push_back(inst.instance_id);
        }
    return oracle_mock(truths, ids);
}

MockScript oracle_mock(const AttributionSample& sample) {
    std::map<std::string, Answer> truths;
    std::vector<std::string> ids;
    for (const auto& rep : sample.repetitions)
        for (const auto& inst : rep) {
            truths.emplace(inst.instance_id, inst.true_author);
            ids.push_back(inst.instance_id);
        }
    return oracle_mock(truths, ids);
}

MockScript adversarial_mock(const Answer& answer) {
    MockScript script;
    script.default_response = scripted_reply(answer, "Constant answer.");
    return script;
}

MockScript malformed_mock(std::string text) {
    MockScript script;
    script.default_response = std::move(text);
    return script;
}

} // namespace authorbench
