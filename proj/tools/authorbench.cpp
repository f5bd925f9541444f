// Command-line front end: ingest, sample, run-verify, run-attribute, ablate,
// report, explain, validate, plus synth and features helpers.
#include "authorbench/corpus.hpp"
#include "authorbench/error.hpp"
#include "authorbench/explain.hpp"
#include "authorbench/fixtures.hpp"
#include "authorbench/linguistic_features.hpp"
#include "authorbench/runner.hpp"
#include "authorbench/sampling.hpp"
#include "authorbench/text.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace authorbench;

namespace {

void print_summary(const ExperimentResult& r) {
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << render_report(r.reports, ReportFormat::markdown);
}

int run_validate_config(const std::filesystem::path& path) {
    auto config = ExperimentConfig::load(path);
    std::cout << "config ok: " << to_string(config.task) << ", " << config.systems.size() << " system(s), "
              << config.strategies.size() << " strateg" << (config.strategies.size() == 1 ? "y" : "ies") << "\n";
    return 0;
}

int run_validate_sample(const std::filesystem::path& sample, const std::filesystem::path& corpus_path,
                        const std::string& format) {
    Corpus corpus = load_corpus(corpus_path, corpus_format_from_string(format));
    std::string contents = read_file(sample);
    ValidationReport report = sample_task(contents) == Task::verification
                                  ? validate_sample(parse_verification_sample(contents), corpus)
                                  : validate_sample(parse_attribution_sample(contents), corpus);
    for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
    for (const auto& v : report.violations) std::cout << "violation: " << v << "\n";
    std::cout << (report.ok() ? "sample ok" : "sample invalid") << "\n";
    return report.ok() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Authorship verification and attribution benchmark"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Load, language-filter and deduplicate a corpus");
    std::string in_path, in_format = "jsonl", in_name, in_out, in_stats, in_lang;
    std::size_t in_min = 2;
    ingest->add_option("--input", in_path, "JSONL file or <author>/<doc>.txt directory")->required();
    ingest->add_option("--format", in_format, "jsonl or directory");
    ingest->add_option("--name", in_name, "Corpus name");
    ingest->add_option("--min-texts", in_min, "Drop authors with fewer documents");
    ingest->add_option("--language", in_lang, "Keep only this language (en)");
    ingest->add_option("--output", in_out, "Cleaned corpus JSONL")->required();
    ingest->add_option("--stats", in_stats, "Write corpus statistics JSON here");

    // sample
    auto* sample = app.add_subcommand("sample", "Draw verification pairs or attribution instances");
    std::string s_corpus, s_task = "verification", s_out, s_format = "jsonl";
    SamplePlan s_plan;
    sample->add_option("--corpus", s_corpus)->required();
    sample->add_option("--format", s_format);
    sample->add_option("--task", s_task);
    sample->add_option("--n-pairs", s_plan.n_pairs);
    sample->add_option("--n-candidates", s_plan.n_candidates);
    sample->add_option("--repetitions", s_plan.repetitions);
    sample->add_option("--seed", s_plan.seed);
    sample->add_option("--output", s_out)->required();

    std::string cfg_path;
    auto* run_verify = app.add_subcommand("run-verify", "Run a verification experiment");
    run_verify->add_option("--config", cfg_path)->required();
    auto* run_attr = app.add_subcommand("run-attribute", "Run an attribution experiment");
    run_attr->add_option("--config", cfg_path)->required();
    auto* ablate = app.add_subcommand("ablate", "Run the single-feature LIP ablation");
    ablate->add_option("--config", cfg_path)->required();

    // report
    auto* report = app.add_subcommand("report", "Recompute reports from a record log");
    std::string r_records, r_format = "markdown", r_out;
    report->add_option("--records", r_records)->required();
    report->add_option("--format", r_format, "markdown, csv or json");
    report->add_option("--output", r_out, "Write here instead of stdout");

    // explain
    auto* explain = app.add_subcommand("explain", "Term frequencies and word cloud of model analyses");
    std::string e_records, e_strategy, e_system, e_out, e_stem = "cloud";
    std::size_t e_top = 50;
    explain->add_option("--records", e_records)->required();
    explain->add_option("--strategy", e_strategy, "Only records with this strategy");
    explain->add_option("--system", e_system, "Only records from this system");
    explain->add_option("--outdir", e_out, "Writes <outdir>/clouds/<name>.{csv,json,svg}")->required();
    explain->add_option("--name", e_stem);
    explain->add_option("--top", e_top, "Terms in the cloud");

    // validate
    auto* validate = app.add_subcommand("validate", "Check a config, or a sample against its corpus");
    std::string v_config, v_sample, v_corpus, v_format = "jsonl";
    validate->add_option("--config", v_config);
    validate->add_option("--sample", v_sample);
    validate->add_option("--corpus", v_corpus);
    validate->add_option("--format", v_format);

    // synth
    auto* synth = app.add_subcommand("synth", "Write the synthetic multi-author corpus");
    std::size_t y_authors = 50, y_docs = 3;
    std::uint64_t y_seed = 7;
    std::string y_out;
    synth->add_option("--authors", y_authors);
    synth->add_option("--docs", y_docs);
    synth->add_option("--seed", y_seed);
    synth->add_option("--output", y_out)->required();

    // features
    auto* features = app.add_subcommand("features", "Print the linguistic feature profile of a text file");
    std::string f_input;
    features->add_option("--input", f_input)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            Corpus c = load_corpus(in_path, corpus_format_from_string(in_format), in_name);
            std::size_t before = c.documents.size();
            if (!in_lang.empty()) c = filter_language(c, in_lang);
            c = dedup_and_filter(c, in_min);
            save_corpus(c, in_out);
            auto stats = corpus_stats(c);
            if (!in_stats.empty()) write_file(in_stats, stats.to_json().dump(2) + "\n");
            std::cout << "kept " << c.documents.size() << " of " << before << " documents from "
                      << stats.author_count << " authors\n";
        } else if (*sample) {
            Corpus c = load_corpus(s_corpus, corpus_format_from_string(s_format));
            s_plan.task = task_from_string(s_task);
            s_plan.corpus_name = c.name;
            std::string out;
            std::vector<std::string> warnings;
            if (s_plan.task == Task::verification) {
                auto s = sample_verification(c, s_plan);
                out = serialize_sample(s);
                warnings = s.warnings;
            } else {
                auto s = sample_attribution(c, s_plan);
                out = serialize_sample(s);
                warnings = s.warnings;
            }
            for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
            write_file(s_out, out);
        } else if (*run_verify) {
            print_summary(run_verification_experiment(ExperimentConfig::load(cfg_path)));
        } else if (*run_attr) {
            print_summary(run_attribution_experiment(ExperimentConfig::load(cfg_path)));
        } else if (*ablate) {
            auto r = run_ablation(ExperimentConfig::load(cfg_path));
            std::cout << render_ablation(r.rows, ReportFormat::markdown);
        } else if (*report) {
            auto reports = reports_from_records(load_records(r_records));
            std::string body = render_report(reports, report_format_from_string(r_format));
            if (r_out.empty()) std::cout << body;
            else write_file(r_out, body);
        } else if (*explain) {
            std::vector<std::string> analyses;
            for (const auto& r : load_records(e_records)) {
                if (!e_strategy.empty() && r.strategy != e_strategy) continue;
                if (!e_system.empty() && r.system != e_system) continue;
                if (r.analysis) analyses.push_back(*r.analysis);
            }
            auto table = aggregate_terms(analyses);
            table.source["records"] = e_records;
            if (!e_strategy.empty()) table.source["strategy"] = e_strategy;
            if (!e_system.empty()) table.source["model"] = e_system;
            auto dir = std::filesystem::path(e_out) / "clouds";
            write_file(dir / (e_stem + ".csv"), table.to_csv());
            write_file(dir / (e_stem + ".json"), table.to_json().dump(2) + "\n");
            if (table.empty()) {
                std::cerr << "no analysis terms; word cloud skipped\n";
                return 1;
            }
            CloudLayout layout;
            layout.max_terms = e_top;
            write_file(dir / (e_stem + ".svg"), render_wordcloud_svg(table, layout));
            std::cout << "wrote " << table.terms.size() << " terms to " << dir.string() << "\n";
        } else if (*validate) {
            if (!v_config.empty()) return run_validate_config(v_config);
            if (!v_sample.empty() && !v_corpus.empty()) return run_validate_sample(v_sample, v_corpus, v_format);
            std::cerr << "validate needs --config, or --sample with --corpus\n";
            return 2;
        } else if (*synth) {
            save_corpus(build_synthetic_corpus(y_authors, y_docs, y_seed), y_out);
        } else if (*features) {
            std::cout << extract_profile(read_file(f_input)).to_json().dump(2) << "\n";
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
