#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace authorbench {

/// Fixed English function-word list (version "stop-1").
const std::set<std::string>& default_stopwords();

struct TermFrequencyTable {
    std::vector<std::pair<std::string, std::size_t>> terms;  // count desc, then term asc
    std::size_t total_terms = 0;                             // sum of counts
    std::map<std::string, std::string> source;               // model, strategy, task, dataset

    std::size_t count(std::string_view term) const;
    bool empty() const { return terms.empty(); }

    /// "term,count" header and rows in table order.
    std::string to_csv() const;
    nlohmann::ordered_json to_json() const;
};

/// tokenize() terms minus stopwords and single characters, summed.
TermFrequencyTable aggregate_terms(std::span<const std::string> analyses,
                                   const std::set<std::string>& stopwords = default_stopwords());

struct CloudLayout {
    double width = 800.0;
    double height = 600.0;
    std::size_t max_terms = 50;
    double min_font = 10.0;
    double max_font = 64.0;
    /// Advance width of one monospace glyph in ems; textLength pins it.
    double glyph_width = 0.6;
    double padding = 2.0;
    double spiral_step = 0.15;  // radians per probe
    double spiral_growth = 1.5;  // pixels of radius per radian
    std::string font_family = "monospace";
};

struct Box {
    double x = 0.0;  // left
    double y = 0.0;  // top
    double w = 0.0;
    double h = 0.0;

    bool overlaps(const Box& o) const {
        return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
    }
};

struct WordPlacement {
    std::string term;
    std::size_t count = 0;
    double font_size = 0.0;
    Box box;
};

/// Terms in table order, font size max_font * sqrt(count / top count)
/// floored at min_font, each placed at the first point of an Archimedean
/// spiral from the centre where its box (plus padding) fits the canvas and
/// hits nothing already placed. Terms that fit nowhere are left out.
std::vector<WordPlacement> layout_wordcloud(const TermFrequencyTable& table, const CloudLayout& layout = {});

/// SVG 1.1; one <text> per placement, centred on its box, with textLength
/// equal to the box width.
std::string render_wordcloud_svg(const TermFrequencyTable& table, const CloudLayout& layout = {});

} // namespace authorbench
