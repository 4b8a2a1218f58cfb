#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "mka/config.hpp"

namespace mka::cli {

// Exit codes: 0 success, 1 runtime/backend/data failure, 2 usage or
// configuration error.

// Full pipeline run: writes traces.jsonl, judged.jsonl, sweep.csv,
// acc_vs_coverage.csv and summary.json into the configured output directory.
int cmd_run(const std::filesystem::path& config_path, const config::Overrides& overrides,
            std::ostream& out, std::ostream& err);

// Single-language benchmark without abstention; summary carries plain
// accuracy. Writes traces.jsonl, judged.jsonl and summary.json.
int cmd_baseline(const std::filesystem::path& config_path, const config::Overrides& overrides,
                 std::ostream& out, std::ostream& err);

// Offline re-sweep of stored judged results; empty cutoffs means the default
// grid. Multiple files get per-file CSVs plus a cross-run optimal cutoff.
int cmd_report(const std::vector<std::filesystem::path>& judged_paths,
               const std::vector<double>& cutoffs, const std::filesystem::path& out_dir,
               std::ostream& out, std::ostream& err);

// argv-level entry point used by the binary and by tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mka::cli
