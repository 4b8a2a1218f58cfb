#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mka/core_types.hpp"
#include "mka/evaluation.hpp"
#include "mka/pipeline.hpp"

namespace mka::io {

// Shortest round-trip decimal form of a double (std::to_chars), so the same
// value always prints the same bytes.
std::string format_double(double value);

std::string to_string(Decision decision);
Decision decision_from_string(const std::string& text);

nlohmann::json trace_to_json(const ItemTrace& trace);
nlohmann::json result_to_json(const pipeline::ItemResult& result);

// One full audit record per line: item, per-language traces, outcome.
void write_traces_jsonl(const std::filesystem::path& path,
                        const std::vector<pipeline::ItemResult>& results);

// Compact per-item records carrying exactly what a re-sweep needs. Only items
// that were actually judged are written.
void write_judged_jsonl(const std::filesystem::path& path,
                        const std::vector<pipeline::ItemResult>& results);

struct JudgedParseError : std::runtime_error {
    JudgedParseError(const std::string& message, std::size_t line)
        : std::runtime_error(message + " (line " + std::to_string(line) + ")"), line(line) {}
    std::size_t line;
};

// Inverse of write_judged_jsonl; reconstructs results with empty trace lists.
std::vector<pipeline::ItemResult> read_judged_jsonl(const std::filesystem::path& path);

// Columns: cutoff,A1,A2,A3,A4,ac_abs,ac_ans,ac_comp,coverage,ac_eff.
// Absent metrics become empty cells.
void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<evaluation::SweepRow>& rows);

std::string sweep_csv_text(const std::vector<evaluation::SweepRow>& rows);

// Columns: coverage,ac_ans.
void write_accuracy_coverage_csv(const std::filesystem::path& path,
                                 const std::vector<evaluation::CurvePoint>& points);

}  // namespace mka::io
