#include "mka/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mka::io {

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buffer, ptr);
}

std::string to_string(Decision decision) {
    return decision == Decision::Answer ? "answer" : "abstain";
}

Decision decision_from_string(const std::string& text) {
    if (text == "answer") return Decision::Answer;
    if (text == "abstain") return Decision::Abstain;
    throw std::invalid_argument("unknown decision value: " + text);
}

nlohmann::json trace_to_json(const ItemTrace& trace) {
    nlohmann::json j{
        {"language", trace.language},
        {"translated_question", trace.translated_question},
        {"translated_choices", trace.translated_choices},
        {"prompt", trace.prompt},
        {"raw_generation", trace.raw_generation},
        {"extracted_answer", trace.extracted_answer},
        {"back_translated_answer", trace.back_translated_answer},
        {"ok", trace.ok},
        {"error", trace.error},
    };
    if (trace.similarity_to_selected.has_value()) {
        j["similarity_to_selected"] = *trace.similarity_to_selected;
    } else {
        j["similarity_to_selected"] = nullptr;
    }
    return j;
}

nlohmann::json result_to_json(const pipeline::ItemResult& result) {
    nlohmann::json traces = nlohmann::json::array();
    for (const auto& trace : result.traces) traces.push_back(trace_to_json(trace));

    const ItemOutcome& o = result.outcome;
    nlohmann::json outcome{
        {"selected_index", o.selected_index},
        {"selected_answer", o.selected_answer},
        {"confidence_raw", o.confidence_raw},
        {"confidence", o.confidence},
        {"decision", to_string(o.decision)},
        {"failed", o.failed},
    };
    if (o.judged_correct.has_value()) {
        outcome["judged_correct"] = *o.judged_correct;
    } else {
        outcome["judged_correct"] = nullptr;
    }

    return nlohmann::json{
        {"id", result.item.id},
        {"question", result.item.question},
        {"choices", result.item.choices},
        {"gold_answer", result.item.gold_answer},
        {"target_language", result.item.target_language},
        {"traces", std::move(traces)},
        {"outcome", std::move(outcome)},
    };
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

}  // namespace

void write_traces_jsonl(const std::filesystem::path& path,
                        const std::vector<pipeline::ItemResult>& results) {
    auto out = open_for_write(path);
    for (const auto& result : results) out << result_to_json(result).dump() << '\n';
}

void write_judged_jsonl(const std::filesystem::path& path,
                        const std::vector<pipeline::ItemResult>& results) {
    auto out = open_for_write(path);
    for (const auto& result : results) {
        const ItemOutcome& o = result.outcome;
        if (!o.judged_correct.has_value()) continue;
        const nlohmann::json j{
            {"id", result.item.id},
            {"gold_answer", result.item.gold_answer},
            {"selected_answer", o.selected_answer},
            {"confidence_raw", o.confidence_raw},
            {"confidence", o.confidence},
            {"decision", to_string(o.decision)},
            {"judged_correct", *o.judged_correct},
            {"failed", o.failed},
        };
        out << j.dump() << '\n';
    }
}

std::vector<pipeline::ItemResult> read_judged_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open judged results file: " + path.string());

    std::vector<pipeline::ItemResult> results;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw JudgedParseError(std::string("invalid JSON: ") + e.what(), line_no);
        }

        try {
            pipeline::ItemResult result;
            result.item.id = j.at("id").get<std::string>();
            result.item.gold_answer = j.at("gold_answer").get<std::string>();
            ItemOutcome& o = result.outcome;
            o.selected_answer = j.at("selected_answer").get<std::string>();
            o.confidence_raw = j.at("confidence_raw").get<double>();
            o.confidence = j.at("confidence").get<double>();
            o.decision = decision_from_string(j.at("decision").get<std::string>());
            o.judged_correct = j.at("judged_correct").get<bool>();
            o.failed = j.value("failed", false);
            o.selected_index = o.failed ? -1 : 0;
            results.push_back(std::move(result));
        } catch (const nlohmann::json::exception& e) {
            throw JudgedParseError(std::string("bad judged record: ") + e.what(), line_no);
        } catch (const std::invalid_argument& e) {
            throw JudgedParseError(std::string("bad judged record: ") + e.what(), line_no);
        }
    }
    return results;
}

std::string sweep_csv_text(const std::vector<evaluation::SweepRow>& rows) {
    std::ostringstream out;
    out << "cutoff,A1,A2,A3,A4,ac_abs,ac_ans,ac_comp,coverage,ac_eff\n";
    for (const auto& row : rows) {
        out << format_double(row.cutoff) << ',' << row.counts.a1 << ',' << row.counts.a2 << ','
            << row.counts.a3 << ',' << row.counts.a4 << ',';
        if (row.metrics.ac_abs.has_value()) out << format_double(*row.metrics.ac_abs);
        out << ',';
        if (row.metrics.ac_ans.has_value()) out << format_double(*row.metrics.ac_ans);
        out << ',' << format_double(row.metrics.ac_comp) << ',' << format_double(row.metrics.coverage)
            << ',' << format_double(row.metrics.ac_eff) << '\n';
    }
    return out.str();
}

void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<evaluation::SweepRow>& rows) {
    auto out = open_for_write(path);
    out << sweep_csv_text(rows);
}

void write_accuracy_coverage_csv(const std::filesystem::path& path,
                                 const std::vector<evaluation::CurvePoint>& points) {
    auto out = open_for_write(path);
    out << "coverage,ac_ans\n";
    for (const auto& point : points) {
        out << format_double(point.coverage) << ',' << format_double(point.ac_ans) << '\n';
    }
}

}  // namespace mka::io
