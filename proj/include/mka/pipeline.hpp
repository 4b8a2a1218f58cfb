#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mka/backends.hpp"
#include "mka/core_types.hpp"

namespace mka::pipeline {

// Sentinel separating choices in a joint translation payload. Survival is
// validated after the round trip; violations fall back to per-choice calls.
inline constexpr std::string_view kChoiceSeparator = "\n|||\n";

// Template with exactly one {question} and one {choices} placeholder.
struct PromptTemplate {
    std::string text;

    static PromptTemplate parse(std::string text);  // throws ConfigurationError
};

// Per-language pre-translated instruction texts; the fallback is used for
// languages without an override.
struct TemplateSet {
    PromptTemplate fallback;
    std::map<std::string, PromptTemplate> by_language;

    const PromptTemplate& for_language(const std::string& code) const;
    static TemplateSet builtin();
};

struct Backends {
    std::shared_ptr<backends::TranslationBackend> translation;
    std::shared_ptr<backends::ChatBackend> chat;
    std::shared_ptr<backends::EmbeddingBackend> embedding;
};

struct ItemResult {
    EvalItem item;
    std::vector<ItemTrace> traces;  // one per auxiliary language
    ItemOutcome outcome;
};

// Deterministic template fill; choices are enumerated in the given order.
std::string build_prompt(const std::string& question, const std::vector<std::string>& choices,
                         const PromptTemplate& tpl);

// Strips whitespace, markup fences, option-letter prefixes ("B)", "2.") and
// bracket wrappers; keeps the first non-empty line. May return empty text.
std::string extract_answer(const std::string& generation);

ItemResult run_item(const EvalItem& item, const RunConfig& config, const Backends& backends,
                    const TemplateSet& templates);

// Single target-language trace, no translation, fixed confidence 1.0, always
// answers.
ItemResult run_baseline(const EvalItem& item, const RunConfig& config, const Backends& backends,
                        const TemplateSet& templates);

enum class RunMode { mka, baseline };

struct RunOptions {
    RunMode mode = RunMode::mka;
    int concurrency = 1;
};

// Results are in input order regardless of execution order. When
// config.sample_size is positive and smaller than the dataset, a
// seed-deterministic sample is drawn first.
std::vector<ItemResult> run_set(const std::vector<EvalItem>& items, const RunConfig& config,
                                const Backends& backends, const TemplateSet& templates,
                                const RunOptions& options);

// Seed-stable choice of k of population indices, sorted ascending.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t k, std::uint64_t seed);

}  // namespace mka::pipeline
