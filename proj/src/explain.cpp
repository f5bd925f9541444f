#include "authorbench/explain.hpp"

#include "authorbench/error.hpp"
#include "authorbench/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace authorbench {

namespace {

constexpr const char* kStopwords[] = {
    "a", "about", "above", "after", "again", "against", "ain", "all", "also", "am", "an", "and", "any", "are",
    "aren", "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but", "by",
    "can", "could", "couldn", "did", "didn", "do", "does", "doesn", "doing", "don", "down", "during", "each",
    "either", "etc", "few", "for", "from", "further", "had", "hadn", "has", "hasn", "have", "haven", "having",
    "he", "her", "here", "hers", "herself", "him", "himself", "his", "how", "however", "i", "if", "in", "into",
    "is", "isn", "it", "its", "itself", "just", "ll", "may", "me", "might", "more", "most", "must", "mustn",
    "my", "myself", "needn", "no", "nor", "not", "now", "of", "off", "on", "once", "one", "only", "or", "other",
    "our", "ours", "ourselves", "out", "over", "own", "re", "same", "shall", "shan", "she", "should", "shouldn",
    "so", "some", "such", "than", "that", "the", "their", "theirs", "them", "themselves", "then", "there",
    "these", "they", "this", "those", "through", "thus", "to", "too", "under", "until", "up", "us", "ve",
    "very", "was", "wasn", "we", "were", "weren", "what", "when", "where", "whether", "which", "while", "who",
    "whom", "why", "will", "with", "won", "would", "wouldn", "yet", "you", "your", "yours", "yourself",
    "yourselves",
};

std::size_t glyphs(std::string_view s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

} // namespace

const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> words(std::begin(kStopwords), std::end(kStopwords));
    return words;
}

std::size_t TermFrequencyTable::count(std::string_view term) const {
    for (const auto& [t, c] : terms)
        if (t == term) return c;
    return 0;
}

std::string TermFrequencyTable::to_csv() const {
    std::string out = "term,count\n";
    for (const auto& [t, c] : terms) {
        bool quote = t.find_first_of(",\"\n") != std::string::npos;
        if (quote) {
            out += '"';
            for (char ch : t) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            out += '"';
        } else {
            out += t;
        }
        out += ',' + std::to_string(c) + '\n';
    }
    return out;
}

nlohmann::ordered_json TermFrequencyTable::to_json() const {
    nlohmann::ordered_json j;
    j["source"] = source;
    j["total_terms"] = total_terms;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& [t, c] : terms) rows.push_back({{"term", t}, {"count", c}});
    j["terms"] = std::move(rows);
    return j;
}

TermFrequencyTable aggregate_terms(std::span<const std::string> analyses, const std::set<std::string>& stopwords) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& a : analyses)
        for (auto& tok : tokenize(a))
            if (glyphs(tok) > 1 && !stopwords.count(tok)) ++counts[tok];

    TermFrequencyTable table;
    table.terms.assign(counts.begin(), counts.end());
    std::sort(table.terms.begin(), table.terms.end(), [](const auto& x, const auto& y) {
        return x.second != y.second ? x.second > y.second : x.first < y.first;
    });
    for (const auto& [_, c] : table.terms) table.total_terms += c;
    return table;
}

std::vector<WordPlacement> layout_wordcloud(const TermFrequencyTable& table, const CloudLayout& layout) {
    if (table.empty()) throw ReportError("word cloud needs at least one term");
    std::vector<WordPlacement> placed;
    const double top = static_cast<double>(table.terms.front().second);
    const double cx = layout.width / 2.0, cy = layout.height / 2.0;
    const double max_radius = std::hypot(layout.width, layout.height);

    std::size_t n = std::min(layout.max_terms, table.terms.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& [term, count] = table.terms[i];
        WordPlacement w;
        w.term = term;
        w.count = count;
        w.font_size = std::max(layout.min_font, layout.max_font * std::sqrt(static_cast<double>(count) / top));
        w.box.w = layout.glyph_width * w.font_size * static_cast<double>(glyphs(term));
        w.box.h = w.font_size;
        const double pad = layout.padding;

        for (double t = 0.0;; t += layout.spiral_step) {
            double r = layout.spiral_growth * t;
            if (r > max_radius) break;
            double x = cx + r * std::cos(t) - w.box.w / 2.0;
            double y = cy + r * std::sin(t) - w.box.h / 2.0;
            Box padded{x - pad, y - pad, w.box.w + 2 * pad, w.box.h + 2 * pad};
            if (padded.x < 0 || padded.y < 0 || padded.x + padded.w > layout.width ||
                padded.y + padded.h > layout.height)
                continue;
            bool clear = std::none_of(placed.begin(), placed.end(), [&](const WordPlacement& o) {
                return padded.overlaps(o.box);
            });
            if (clear) {
                w.box.x = x;
                w.box.y = y;
                placed.push_back(std::move(w));
                break;
            }
        }
    }
    return placed;
}

std::string render_wordcloud_svg(const TermFrequencyTable& table, const CloudLayout& layout) {
    auto placed = layout_wordcloud(table, layout);
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(layout.width) +
           "\" height=\"" + num(layout.height) + "\" viewBox=\"0 0 " + num(layout.width) + " " +
           num(layout.height) + "\">\n";
    out += "<g font-family=\"" + xml_escape(layout.font_family) +
           "\" text-anchor=\"middle\" dominant-baseline=\"central\">\n";
    for (const auto& w : placed) {
        out += "<text x=\"" + num(w.box.x + w.box.w / 2.0) + "\" y=\"" + num(w.box.y + w.box.h / 2.0) +
               "\" font-size=\"" + num(w.font_size) + "\" textLength=\"" + num(w.box.w) +
               "\" lengthAdjust=\"spacingAndGlyphs\" data-count=\"" + std::to_string(w.count) + "\">" +
               xml_escape(w.term) + "</text>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

} // namespace authorbench
