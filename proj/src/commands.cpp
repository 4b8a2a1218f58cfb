#include "mka/commands.hpp"

#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mka/dataset.hpp"
#include "mka/evaluation.hpp"
#include "mka/io.hpp"

namespace mka::cli {

namespace {

namespace fs = std::filesystem;

nlohmann::json metrics_to_json(const evaluation::MetricSet& m) {
    nlohmann::json j{
        {"ac_comp", m.ac_comp},
        {"coverage", m.coverage},
        {"ac_eff", m.ac_eff},
    };
    j["ac_abs"] = m.ac_abs.has_value() ? nlohmann::json(*m.ac_abs) : nlohmann::json(nullptr);
    j["ac_ans"] = m.ac_ans.has_value() ? nlohmann::json(*m.ac_ans) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json counts_to_json(const ConfusionCounts& c) {
    return nlohmann::json{{"a1", c.a1}, {"a2", c.a2}, {"a3", c.a3}, {"a4", c.a4}, {"total", c.total()}};
}

nlohmann::json sweep_to_json(const std::vector<evaluation::SweepRow>& rows) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json entry{{"cutoff", row.cutoff}};
        entry["counts"] = counts_to_json(row.counts);
        entry["metrics"] = metrics_to_json(row.metrics);
        table.push_back(std::move(entry));
    }
    return table;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
}

struct LoadedRun {
    config::AppConfig config;
    std::vector<EvalItem> items;
};

// Shared head of run/baseline: config + dataset, with the documented exit
// codes on failure (loaded.first != 0 means "return that code").
std::pair<int, LoadedRun> load_run_inputs(const fs::path& config_path,
                                          const config::Overrides& overrides, std::ostream& err) {
    LoadedRun loaded;
    try {
        loaded.config = config::load_config(config_path);
        config::apply_overrides(loaded.config, overrides);
        config::validate(loaded.config);
    } catch (const backends::ConfigurationError& e) {
        err << "config error: " << e.what() << '\n';
        return {2, std::move(loaded)};
    }

    if (loaded.config.dataset_path.empty()) {
        err << "config error: dataset path is required\n";
        return {2, std::move(loaded)};
    }
    try {
        loaded.items = load_dataset_jsonl(loaded.config.dataset_path);
    } catch (const DatasetParseError& e) {
        err << "dataset error: " << e.what() << '\n';
        return {1, std::move(loaded)};
    } catch (const std::runtime_error& e) {
        err << "dataset error: " << e.what() << '\n';
        return {1, std::move(loaded)};
    }

    const auto issues = validate_dataset(loaded.items);
    if (!issues.empty()) {
        for (const auto& issue : issues) {
            err << "dataset error: item " << issue.item_id << ": " << issue.message << '\n';
        }
        return {1, std::move(loaded)};
    }
    if (loaded.items.empty()) {
        err << "dataset error: dataset holds no items\n";
        return {1, std::move(loaded)};
    }
    return {0, std::move(loaded)};
}

struct ExecutedRun {
    std::vector<pipeline::ItemResult> results;
    std::vector<pipeline::ItemResult> judged;
    evaluation::JudgeSummary judging;
};

// Inference + judging + the two JSONL audit files.
ExecutedRun execute(const config::AppConfig& config, const std::vector<EvalItem>& items,
                    std::ostream& err) {
    auto backends = config::build_backends(config);
    auto templates = config::build_templates(config);

    pipeline::RunOptions options;
    options.mode = config.mode;
    options.concurrency = config.concurrency;

    ExecutedRun run;
    run.results = pipeline::run_set(items, config.run, backends, templates, options);

    run.judging = evaluation::judge_all(run.results, config.run.judge_threshold, *backends.embedding);
    for (const auto& warning : run.judging.warnings) err << "warning: " << warning << '\n';

    const fs::path out_dir(config.output_dir);
    fs::create_directories(out_dir);
    io::write_traces_jsonl(out_dir / "traces.jsonl", run.results);
    io::write_judged_jsonl(out_dir / "judged.jsonl", run.results);

    for (const auto& result : run.results) {
        if (result.outcome.judged_correct.has_value()) run.judged.push_back(result);
    }
    return run;
}

nlohmann::json dataset_stats(const std::vector<EvalItem>& items, const ExecutedRun& run) {
    return nlohmann::json{
        {"items_total", items.size()},
        {"items_run", run.results.size()},
        {"items_judged", run.judged.size()},
        {"judging_skipped", run.judging.skipped},
    };
}

}  // namespace

int cmd_run(const fs::path& config_path, const config::Overrides& overrides, std::ostream& out,
            std::ostream& err) {
    auto [code, loaded] = load_run_inputs(config_path, overrides, err);
    if (code != 0) return code;
    const config::AppConfig& config = loaded.config;

    try {
        const ExecutedRun run = execute(config, loaded.items, err);
        if (run.judged.empty()) {
            err << "error: no result could be judged; nothing to report\n";
            return 1;
        }

        const auto grid = evaluation::default_cutoff_grid();
        const auto rows = evaluation::sweep(run.judged, grid);
        const auto curve = evaluation::accuracy_coverage_curve(run.judged, grid);
        const auto optimal = evaluation::optimal_cutoff({rows});
        const auto counts = evaluation::confusion(run.judged, config.run.cutoff);
        const auto at_cutoff = evaluation::metrics(counts);

        const fs::path out_dir(config.output_dir);
        io::write_sweep_csv(out_dir / "sweep.csv", rows);
        io::write_accuracy_coverage_csv(out_dir / "acc_vs_coverage.csv", curve);

        nlohmann::json summary{
            {"config", config::config_echo(config)},
            {"dataset", dataset_stats(loaded.items, run)},
            {"counts", counts_to_json(counts)},
            {"metrics", metrics_to_json(at_cutoff)},
            {"optimal_cutoff",
             {{"cutoff", optimal.cutoff}, {"mean_ac_eff", optimal.mean_ac_eff}}},
            {"sweep", sweep_to_json(rows)},
        };

        if (!config.baseline_summary_path.empty()) {
            std::ifstream in(config.baseline_summary_path, std::ios::binary);
            if (!in) {
                err << "error: cannot open baseline summary: " << config.baseline_summary_path << '\n';
                return 1;
            }
            nlohmann::json baseline;
            try {
                baseline = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                err << "error: baseline summary is not valid JSON: " << e.what() << '\n';
                return 1;
            }
            if (!baseline.contains("accuracy")) {
                err << "error: baseline summary has no accuracy field\n";
                return 1;
            }
            const double base_acc = baseline.at("accuracy").get<double>();
            nlohmann::json comparison{
                {"baseline_accuracy", base_acc},
                {"ac_eff", at_cutoff.ac_eff},
            };
            comparison["relative_improvement"] =
                base_acc > 0.0 ? nlohmann::json((at_cutoff.ac_eff - base_acc) / base_acc)
                               : nlohmann::json(nullptr);
            summary["baseline_comparison"] = std::move(comparison);
        }

        write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");

        out << "items: " << run.results.size() << ", judged: " << run.judged.size() << '\n';
        out << "cutoff " << io::format_double(config.run.cutoff) << ": ac_eff "
            << io::format_double(at_cutoff.ac_eff) << ", coverage "
            << io::format_double(at_cutoff.coverage) << '\n';
        out << "optimal cutoff: " << io::format_double(optimal.cutoff) << " (mean ac_eff "
            << io::format_double(optimal.mean_ac_eff) << ")\n";
        out << "wrote " << (out_dir / "summary.json").string() << '\n';
        return 0;
    } catch (const backends::ConfigurationError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const backends::BackendError& e) {
        err << "backend error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_baseline(const fs::path& config_path, const config::Overrides& overrides, std::ostream& out,
                 std::ostream& err) {
    auto [code, loaded] = load_run_inputs(config_path, overrides, err);
    if (code != 0) return code;
    config::AppConfig& config = loaded.config;
    config.mode = pipeline::RunMode::baseline;

    try {
        const ExecutedRun run = execute(config, loaded.items, err);
        if (run.judged.empty()) {
            err << "error: no result could be judged; nothing to report\n";
            return 1;
        }

        std::int64_t correct = 0;
        for (const auto& result : run.judged) {
            if (*result.outcome.judged_correct) ++correct;
        }
        const double accuracy = static_cast<double>(correct) / static_cast<double>(run.judged.size());

        const fs::path out_dir(config.output_dir);
        const nlohmann::json summary{
            {"config", config::config_echo(config)},
            {"dataset", dataset_stats(loaded.items, run)},
            {"correct", correct},
            {"accuracy", accuracy},
        };
        write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");

        out << "items: " << run.results.size() << ", judged: " << run.judged.size() << '\n';
        out << "accuracy: " << io::format_double(accuracy) << '\n';
        out << "wrote " << (out_dir / "summary.json").string() << '\n';
        return 0;
    } catch (const backends::ConfigurationError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const backends::BackendError& e) {
        err << "backend error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_report(const std::vector<fs::path>& judged_paths, const std::vector<double>& cutoffs,
               const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    if (judged_paths.empty()) {
        err << "usage error: at least one judged results file is required\n";
        return 2;
    }

    try {
        const auto grid = cutoffs.empty() ? evaluation::default_cutoff_grid() : cutoffs;
        fs::create_directories(out_dir);

        std::vector<std::vector<evaluation::SweepRow>> per_run;
        for (std::size_t i = 0; i < judged_paths.size(); ++i) {
            const auto& path = judged_paths[i];
            std::vector<pipeline::ItemResult> results;
            try {
                results = io::read_judged_jsonl(path);
            } catch (const io::JudgedParseError& e) {
                err << "parse error: " << path.string() << ": " << e.what() << '\n';
                return 1;
            }
            if (results.empty()) {
                err << "error: " << path.string() << " holds no judged results\n";
                return 1;
            }

            const auto rows = evaluation::sweep(results, grid);
            const auto curve = evaluation::accuracy_coverage_curve(results, grid);

            const std::string prefix =
                judged_paths.size() == 1 ? "" : "run" + std::to_string(i + 1) + "_";
            io::write_sweep_csv(out_dir / (prefix + "sweep.csv"), rows);
            io::write_accuracy_coverage_csv(out_dir / (prefix + "acc_vs_coverage.csv"), curve);
            out << path.string() << ": " << rows.size() << " sweep rows -> "
                << (out_dir / (prefix + "sweep.csv")).string() << '\n';
            per_run.push_back(rows);
        }

        const auto optimal = evaluation::optimal_cutoff(per_run);
        out << "optimal cutoff: " << io::format_double(optimal.cutoff) << " (mean ac_eff "
            << io::format_double(optimal.mean_ac_eff) << ")\n";
        return 0;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multilingual-consensus abstention pipeline for MCQA evaluation"};
    app.require_subcommand(1);

    std::string config_path;
    config::Overrides overrides;

    const auto add_run_options = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "JSON configuration file")->required();
        cmd->add_option("--cutoff", overrides.cutoff, "Confidence cutoff override");
        cmd->add_option("--aux-set", overrides.aux_set,
                        "Auxiliary language set preset (high, mid, low)");
        cmd->add_option("--target-lang", overrides.target_lang, "Target language code override");
        cmd->add_option("--mode", overrides.mode, "Engine mode (mka, baseline)");
        cmd->add_option("--seed", overrides.seed, "Sampling seed override");
        cmd->add_option("--sample-size", overrides.sample_size, "Evaluation sample size override");
        cmd->add_option("--cache-dir", overrides.cache_dir, "Record/replay cache directory");
        cmd->add_flag("--offline", [&](std::int64_t) { overrides.offline = true; },
                      "Serve every backend call from the cache; misses fail");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "Run the abstention pipeline over a dataset");
    add_run_options(run_cmd);

    CLI::App* baseline_cmd =
        app.add_subcommand("baseline", "Run the no-abstention single-language benchmark");
    add_run_options(baseline_cmd);

    std::vector<std::string> judged_files;
    std::vector<double> report_cutoffs;
    std::string report_out = ".";
    CLI::App* report_cmd = app.add_subcommand("report", "Re-sweep stored judged results offline");
    report_cmd->add_option("results", judged_files, "judged.jsonl file(s) from earlier runs")
        ->required();
    report_cmd->add_option("--cutoffs", report_cutoffs, "Comma-separated cutoff grid override")
        ->delimiter(',');
    report_cmd->add_option("--out", report_out, "Directory for the emitted CSV files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 2;
    }

    if (run_cmd->parsed()) return cmd_run(config_path, overrides, out, err);
    if (baseline_cmd->parsed()) return cmd_baseline(config_path, overrides, out, err);

    std::vector<fs::path> paths(judged_files.begin(), judged_files.end());
    return cmd_report(paths, report_cutoffs, report_out, out, err);
}

}  // namespace mka::cli
