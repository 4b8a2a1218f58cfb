#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "mka/core_types.hpp"
#include "mka/pipeline.hpp"

namespace mka::config {

// Fully resolved invocation: the run parameters plus the plumbing (paths,
// backend wiring, concurrency) that does not affect results.
struct AppConfig {
    RunConfig run;
    pipeline::RunMode mode = pipeline::RunMode::mka;
    std::string dataset_path;
    std::string output_dir = "out";
    std::string cache_dir;  // empty = uncached
    bool offline = false;
    int concurrency = 1;
    nlohmann::json translation_backend;  // raw block; interpreted by build_backends
    nlohmann::json chat_backend;
    nlohmann::json embedding_backend;
    std::map<std::string, std::string> prompt_templates;  // "default" or language code -> text
    std::string baseline_summary_path;  // optional accuracy comparison input
};

// Auxiliary-language presets grouped by resource level (FLORES-200 codes).
std::map<std::string, LanguageSet> builtin_language_sets();

// Published per-model confidence cutoffs, usable as starting profiles.
std::map<std::string, double> builtin_model_cutoffs();

AppConfig load_config(const std::filesystem::path& path);

// Command-line overrides; unset fields leave the config untouched.
struct Overrides {
    std::optional<double> cutoff;
    std::optional<std::string> aux_set;
    std::optional<std::string> target_lang;
    std::optional<std::string> mode;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> sample_size;
    std::optional<std::string> cache_dir;
    std::optional<bool> offline;
};

void apply_overrides(AppConfig& config, const Overrides& overrides);

// Throws ConfigurationError on any invariant violation (thresholds out of
// range, empty auxiliary set, unknown mode, ...).
void validate(const AppConfig& config);

// Constructs the configured backends, wrapped in the record/replay cache when
// cache_dir is set. Baseline mode tolerates a missing translation block.
pipeline::Backends build_backends(const AppConfig& config);

pipeline::TemplateSet build_templates(const AppConfig& config);

// Echo of every result-affecting parameter — and nothing path-like — so two
// runs that differ only in where files live produce byte-identical summaries.
nlohmann::json config_echo(const AppConfig& config);

}  // namespace mka::config
