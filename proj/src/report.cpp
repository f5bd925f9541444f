#include "authorbench/error.hpp"
#include "authorbench/runner.hpp"
#include "authorbench/text.hpp"

#include <algorithm>
#include <set>

namespace authorbench {

using ojson = nlohmann::ordered_json;

ReportFormat report_format_from_string(std::string_view name) {
    if (name == "markdown" || name == "md") return ReportFormat::markdown;
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    throw ConfigError("unknown report format: " + std::string(name));
}

std::string_view extension(ReportFormat format) {
    switch (format) {
    case ReportFormat::markdown: return "md";
    case ReportFormat::csv: return "csv";
    case ReportFormat::json: return "json";
    }
    return "md";
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::string md_cell(const std::string& s) {
    std::string out;
    for (char c : s) out += c == '|' ? std::string("\\|") : std::string(1, c);
    return out;
}

std::string prompt_label(const std::string& strategy) { return strategy == "-" ? "n/a" : strategy; }

template <typename T>
std::vector<T> first_seen(const std::vector<T>& items) {
    std::vector<T> out;
    for (const auto& i : items)
        if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
    return out;
}

std::string verification_markdown(const std::vector<const AggregateReport*>& reports) {
    std::string out = "# Authorship verification\n";
    std::vector<std::string> datasets;
    for (const auto* r : reports) datasets.push_back(r->descriptor.dataset);
    for (const auto& ds : first_seen(datasets)) {
        out += "\n## " + (ds.empty() ? std::string("dataset") : ds) + "\n\n";
        out += "| Model | Prompt | A | P | R | F1 |\n";
        out += "|---|---|---:|---:|---:|---:|\n";
        std::size_t reps = 0;
        for (const auto* r : reports) {
            if (r->descriptor.dataset != ds) continue;
            const auto& m = r->binary();
            reps = std::max(reps, r->repetitions.size());
            out += "| " + md_cell(r->descriptor.model) + " | " + md_cell(prompt_label(r->descriptor.strategy)) +
                   " | " + format_percent(m.accuracy) + " | " + format_percent(m.precision) + " | " +
                   format_percent(m.recall) + " | " + format_percent(m.f1) + " |\n";
        }
        out += "\nNull accuracy (constant predictor on balanced pairs): 50.00\n";
        out += "Averages over " + std::to_string(reps) + " repetition" + (reps == 1 ? "" : "s") + ".\n";
    }
    return out;
}

std::string attribution_markdown(const std::vector<const AggregateReport*>& reports) {
    std::string out = "# Authorship attribution\n";
    std::vector<std::string> datasets;
    for (const auto* r : reports) datasets.push_back(r->descriptor.dataset);
    for (const auto& ds : first_seen(datasets)) {
        std::set<std::size_t> counts;
        std::vector<std::pair<std::string, std::string>> rows;
        std::size_t reps = 0;
        for (const auto* r : reports) {
            if (r->descriptor.dataset != ds) continue;
            counts.insert(r->descriptor.n_candidates.value_or(0));
            rows.emplace_back(r->descriptor.model, r->descriptor.strategy);
            reps = std::max(reps, r->repetitions.size());
        }
        rows = first_seen(rows);
        out += "\n## " + (ds.empty() ? std::string("dataset") : ds) + "\n\n";
        out += "| Model | Prompt |";
        std::string rule = "|---|---|";
        for (auto c : counts) {
            std::string g = std::to_string(c) + " candidates: ";
            out += " " + g + "Weighted F1 | " + g + "Macro F1 | " + g + "Micro F1 |";
            rule += "---:|---:|---:|";
        }
        out += "\n" + rule + "\n";
        for (const auto& [model, strategy] : rows) {
            out += "| " + md_cell(model) + " | " + md_cell(prompt_label(strategy)) + " |";
            for (auto c : counts) {
                const AggregateReport* hit = nullptr;
                for (const auto* r : reports)
                    if (r->descriptor.dataset == ds && r->descriptor.model == model &&
                        r->descriptor.strategy == strategy && r->descriptor.n_candidates.value_or(0) == c)
                        hit = r;
                if (hit) {
                    const auto& m = hit->multiclass();
                    out += " " + format_percent(m.weighted_f1) + " | " + format_percent(m.macro_f1) + " | " +
                           format_percent(m.micro_f1) + " |";
                } else {
                    out += " - | - | - |";
                }
            }
            out += "\n";
        }
        out += "\nAverages over " + std::to_string(reps) + " repetition" + (reps == 1 ? "" : "s") + ".\n";
    }
    return out;
}

std::string reports_csv(const std::vector<AggregateReport>& reports) {
    std::string out = "task,dataset,model,prompt,n_candidates,repetitions,accuracy,precision,recall,f1,"
                      "weighted_f1,macro_f1,micro_f1,failed_parses\n";
    for (const auto& r : reports) {
        const auto& d = r.descriptor;
        out += csv_field(d.task) + "," + csv_field(d.dataset) + "," + csv_field(d.model) + "," +
               csv_field(prompt_label(d.strategy)) + "," + (d.n_candidates ? std::to_string(*d.n_candidates) : "") +
               "," + std::to_string(r.repetitions.size()) + ",";
        if (r.is_binary()) {
            const auto& m = r.binary();
            out += format_percent(m.accuracy) + "," + format_percent(m.precision) + "," + format_percent(m.recall) +
                   "," + format_percent(m.f1) + ",,,," + std::to_string(m.failed_parses) + "\n";
        } else {
            const auto& m = r.multiclass();
            out += format_percent(m.accuracy) + ",,,," + format_percent(m.weighted_f1) + "," +
                   format_percent(m.macro_f1) + "," + format_percent(m.micro_f1) + "," +
                   std::to_string(m.failed_parses) + "\n";
        }
    }
    return out;
}

// Row labels as printed in the ablation table.
std::string ablation_label(LinguisticFeature f) {
    return f == LinguisticFeature::typographical_errors ? "typos" : std::string(display_name(f));
}

std::string dump(const ojson& j) {
    return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

} // namespace

std::string render_report(const std::vector<AggregateReport>& reports, ReportFormat format) {
    if (reports.empty()) throw ReportError("no reports to emit");
    switch (format) {
    case ReportFormat::markdown: {
        std::vector<const AggregateReport*> ver, attr;
        for (const auto& r : reports) (r.is_binary() ? ver : attr).push_back(&r);
        std::string out;
        if (!ver.empty()) out += verification_markdown(ver);
        if (!ver.empty() && !attr.empty()) out += "\n";
        if (!attr.empty()) out += attribution_markdown(attr);
        return out;
    }
    case ReportFormat::csv: return reports_csv(reports);
    case ReportFormat::json: {
        ojson arr = ojson::array();
        for (const auto& r : reports) arr.push_back(r.to_json());
        return dump(ojson{{"reports", std::move(arr)}});
    }
    }
    return {};
}

std::string render_ablation(const std::vector<std::pair<LinguisticFeature, AggregateReport>>& rows,
                            ReportFormat format) {
    if (rows.empty()) throw ReportError("no ablation rows to emit");
    std::vector<std::pair<std::string, std::size_t>> groups;
    for (const auto& [f, r] : rows) groups.emplace_back(r.descriptor.model, r.descriptor.n_candidates.value_or(0));
    groups = first_seen(groups);

    switch (format) {
    case ReportFormat::markdown: {
        std::string out = "# Feature ablation\n\n";
        out += "| Model | Prompt | Weighted F1 | Macro F1 | Micro F1 |\n|---|---|---:|---:|---:|\n";
        for (const auto& [model, count] : groups) {
            for (const auto& [f, r] : rows) {
                if (r.descriptor.model != model || r.descriptor.n_candidates.value_or(0) != count) continue;
                const auto& m = r.multiclass();
                out += "| " + md_cell(model) + " | " + ablation_label(f) + " | " + format_percent(m.weighted_f1) +
                       " | " + format_percent(m.macro_f1) + " | " + format_percent(m.micro_f1) + " |\n";
            }
        }
        std::set<std::size_t> counts;
        for (const auto& g : groups) counts.insert(g.second);
        for (auto c : counts) out += "\nLIP prompt reduced to one feature, " + std::to_string(c) + " candidate authors.\n";
        return out;
    }
    case ReportFormat::csv: {
        std::string out = "feature,model,dataset,n_candidates,weighted_f1,macro_f1,micro_f1,failed_parses\n";
        for (const auto& [f, r] : rows) {
            const auto& m = r.multiclass();
            out += std::string(slug(f)) + "," + csv_field(r.descriptor.model) + "," + csv_field(r.descriptor.dataset) +
                   "," + std::to_string(r.descriptor.n_candidates.value_or(0)) + "," + format_percent(m.weighted_f1) +
                   "," + format_percent(m.macro_f1) + "," + format_percent(m.micro_f1) + "," +
                   std::to_string(m.failed_parses) + "\n";
        }
        return out;
    }
    case ReportFormat::json: {
        ojson arr = ojson::array();
        for (const auto& [f, r] : rows) arr.push_back(ojson{{"feature", slug(f)}, {"report", r.to_json()}});
        return dump(ojson{{"ablation", std::move(arr)}});
    }
    }
    return {};
}

std::filesystem::path emit_report(const std::vector<AggregateReport>& reports, ReportFormat format,
                                  const std::filesystem::path& dir, const std::string& stem) {
    std::string body = render_report(reports, format);
    auto path = dir / (stem + "." + std::string(extension(format)));
    try {
        write_file(path, body);
    } catch (const std::exception& e) {
        throw ReportError("cannot write " + path.string() + ": " + e.what());
    }
    return path;
}

} // namespace authorbench
