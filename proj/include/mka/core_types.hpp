#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mka {

// One MCQA instance. The gold answer is stored as the full choice text, not a
// letter index: correctness is judged by semantic similarity, so the text is
// what gets compared.
struct EvalItem {
    std::string id;
    std::string question;
    std::vector<std::string> choices;
    std::string gold_answer;
    std::string target_language;
};

// Named set of auxiliary language codes (FLORES-200 scheme, e.g. eng_Latn).
struct LanguageSet {
    std::string name;
    std::vector<std::string> languages;
};

enum class Decision { Answer, Abstain };

// Per-auxiliary-language record of one pipeline pass. Failed traces keep the
// stages reached so far and carry the error; they are excluded from polling.
struct ItemTrace {
    std::string language;
    std::string translated_question;
    std::vector<std::string> translated_choices;
    std::string prompt;
    std::string raw_generation;
    std::string extracted_answer;
    std::string back_translated_answer;
    bool ok = false;
    std::string error;
    // Embedding similarity to the selected answer; absent for the selected
    // trace itself and for failed traces.
    std::optional<double> similarity_to_selected;
};

struct ItemOutcome {
    int selected_index = -1;  // into the successful-trace list
    std::string selected_answer;
    double confidence_raw = 0.0;
    double confidence = 0.0;  // clamped to [0,1]
    Decision decision = Decision::Abstain;
    std::optional<bool> judged_correct;
    bool failed = false;  // no usable trace; forced abstention
};

// A1 abstain-correct, A2 abstain-incorrect, A3 answer-correct,
// A4 answer-incorrect.
struct ConfusionCounts {
    std::int64_t a1 = 0;
    std::int64_t a2 = 0;
    std::int64_t a3 = 0;
    std::int64_t a4 = 0;

    std::int64_t total() const { return a1 + a2 + a3 + a4; }
};

struct RunConfig {
    std::string target_language;
    LanguageSet auxiliary_set;
    double cutoff = 0.0;
    double similarity_boost_threshold = 0.8;
    double boost_weight = 1.5;
    double judge_threshold = 0.85;
    int ngram_size = 3;
    std::uint64_t seed = 97;
    std::size_t sample_size = 200;  // 0 = whole dataset
    std::string prompt_template_id = "default";
};

struct ValidationError {
    std::string item_id;
    std::string message;
};

// Empty result iff every item satisfies the EvalItem invariants.
std::vector<ValidationError> validate_dataset(const std::vector<EvalItem>& items);

}  // namespace mka
