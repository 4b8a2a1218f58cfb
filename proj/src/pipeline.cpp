#include "mka/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "mka/calibration.hpp"
#include "mka/similarity.hpp"
#include "mka/text.hpp"

namespace mka::pipeline {

namespace {

std::size_t count_occurrences(const std::string& haystack, std::string_view needle) {
    std::size_t count = 0;
    for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
         pos = haystack.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

std::string replace_once(std::string s, std::string_view placeholder, const std::string& value) {
    const auto pos = s.find(placeholder);
    s.replace(pos, placeholder.size(), value);
    return s;
}

}  // namespace

PromptTemplate PromptTemplate::parse(std::string text) {
    if (count_occurrences(text, "{question}") != 1 || count_occurrences(text, "{choices}") != 1) {
        throw backends::ConfigurationError(
            "prompt template must contain exactly one {question} and one {choices} placeholder");
    }
    return PromptTemplate{std::move(text)};
}

const PromptTemplate& TemplateSet::for_language(const std::string& code) const {
    const auto it = by_language.find(code);
    return it == by_language.end() ? fallback : it->second;
}

TemplateSet TemplateSet::builtin() {
    TemplateSet set;
    set.fallback = PromptTemplate::parse(
        "{question}\nOptions: {choices}\nRespond with the exact text of the correct option and nothing else.");
    return set;
}

std::string build_prompt(const std::string& question, const std::vector<std::string>& choices,
                         const PromptTemplate& tpl) {
    if (choices.empty()) throw std::invalid_argument("build_prompt: choices must be non-empty");
    std::string joined;
    for (std::size_t i = 0; i < choices.size(); ++i) {
        if (i > 0) joined += ", ";
        joined += choices[i];
    }
    std::string prompt = replace_once(tpl.text, "{question}", question);
    return replace_once(std::move(prompt), "{choices}", joined);
}

namespace {

// "B) cortex" -> "cortex"; label is 1-2 alphanumerics plus ) ] : or a dot
// followed by whitespace ("2.5 kg" survives).
void strip_option_prefix(std::string& s) {
    const std::string_view v = s;
    std::size_t i = 0;
    char open = 0;
    if (i < v.size() && (v[i] == '(' || v[i] == '[')) open = v[i++];
    const std::size_t label_start = i;
    while (i < v.size() && i - label_start < 2 && std::isalnum(static_cast<unsigned char>(v[i]))) ++i;
    if (i == label_start || i >= v.size()) return;
    const char delim = v[i];
    bool matches = false;
    if (open == '(') {
        matches = delim == ')';
    } else if (open == '[') {
        matches = delim == ']';
    } else {
        matches = delim == ')' || delim == ']' || delim == ':' || delim == '.';
    }
    if (!matches) return;
    ++i;
    if (delim == '.' && i < v.size() && !std::isspace(static_cast<unsigned char>(v[i]))) return;
    while (i < v.size() && std::isspace(static_cast<unsigned char>(v[i]))) ++i;
    if (i >= v.size()) return;  // bare label; nothing better to keep
    s = std::string(v.substr(i));
}

void strip_wrappers(std::string& s) {
    std::string_view sv = text::trim(s);
    while (sv.size() >= 2) {
        const char front = sv.front();
        const char back = sv.back();
        const bool wrapped = (front == '[' && back == ']') || (front == '(' && back == ')') ||
                             (front == '"' && back == '"') || (front == '\'' && back == '\'');
        if (!wrapped) break;
        sv = text::trim(sv.substr(1, sv.size() - 2));
    }
    s = std::string(sv);
}

}  // namespace

std::string extract_answer(const std::string& generation) {
    std::string_view sv = text::trim(generation);

    if (sv.substr(0, 3) == "```") {
        const auto nl = sv.find('\n');
        if (nl == std::string_view::npos) return {};
        sv.remove_prefix(nl + 1);
        const auto close = sv.find("```");
        if (close != std::string_view::npos) sv = sv.substr(0, close);
        sv = text::trim(sv);
    }

    // first non-empty line
    std::string_view line;
    while (!sv.empty()) {
        const auto nl = sv.find('\n');
        line = text::trim(nl == std::string_view::npos ? sv : sv.substr(0, nl));
        if (!line.empty()) break;
        if (nl == std::string_view::npos) break;
        sv.remove_prefix(nl + 1);
    }
    if (line.empty()) return {};

    std::string answer(line);
    strip_option_prefix(answer);
    strip_wrappers(answer);
    return std::string(text::trim(answer));
}

namespace {

std::vector<std::string> translate_choices(backends::TranslationBackend& translator,
                                           const std::vector<std::string>& choices,
                                           const std::string& source, const std::string& target) {
    const bool sentinel_safe =
        std::none_of(choices.begin(), choices.end(),
                     [](const std::string& c) { return c.find("|||") != std::string::npos; });

    if (sentinel_safe && choices.size() > 1) {
        std::string joined;
        for (std::size_t i = 0; i < choices.size(); ++i) {
            if (i > 0) joined += kChoiceSeparator;
            joined += choices[i];
        }
        const std::string translated = translator.translate(joined, source, target);

        std::vector<std::string> pieces;
        std::size_t start = 0;
        for (auto pos = translated.find("|||"); pos != std::string::npos;
             pos = translated.find("|||", start)) {
            pieces.emplace_back(text::trim(std::string_view(translated).substr(start, pos - start)));
            start = pos + 3;
        }
        pieces.emplace_back(text::trim(std::string_view(translated).substr(start)));

        const bool intact = pieces.size() == choices.size() &&
                            std::none_of(pieces.begin(), pieces.end(),
                                         [](const std::string& p) { return p.empty(); });
        if (intact) return pieces;
    }

    std::vector<std::string> out;
    out.reserve(choices.size());
    for (const auto& choice : choices) out.push_back(translator.translate(choice, source, target));
    return out;
}

}  // namespace

ItemResult run_item(const EvalItem& item, const RunConfig& config, const Backends& backends,
                    const TemplateSet& templates) {
    if (config.auxiliary_set.languages.empty()) {
        throw backends::ConfigurationError("auxiliary language set is empty");
    }

    ItemResult result;
    result.item = item;

    for (const auto& lang : config.auxiliary_set.languages) {
        ItemTrace trace;
        trace.language = lang;
        try {
            trace.translated_question =
                backends.translation->translate(item.question, item.target_language, lang);
            trace.translated_choices =
                translate_choices(*backends.translation, item.choices, item.target_language, lang);
            trace.prompt =
                build_prompt(trace.translated_question, trace.translated_choices, templates.for_language(lang));
            trace.raw_generation = backends.chat->chat(trace.prompt);
            trace.extracted_answer = extract_answer(trace.raw_generation);
            if (trace.extracted_answer.empty()) {
                trace.error = "no answer left after extraction";
            } else {
                trace.back_translated_answer =
                    backends.translation->translate(trace.extracted_answer, lang, item.target_language);
                if (text::trim(trace.back_translated_answer).empty()) {
                    trace.error = "empty back-translation";
                } else {
                    trace.ok = true;
                }
            }
        } catch (const backends::ConfigurationError&) {
            throw;  // fatal, never contained per trace
        } catch (const backends::BackendError& e) {
            trace.error = e.what();
        }
        result.traces.push_back(std::move(trace));
    }

    std::vector<std::size_t> ok_traces;
    std::vector<std::string> answers;
    for (std::size_t i = 0; i < result.traces.size(); ++i) {
        if (result.traces[i].ok) {
            ok_traces.push_back(i);
            answers.push_back(result.traces[i].back_translated_answer);
        }
    }

    ItemOutcome& outcome = result.outcome;
    if (answers.empty()) {
        outcome.failed = true;
        outcome.decision = Decision::Abstain;
        return result;
    }

    const auto poll = similarity::centroid_poll(answers, config.ngram_size);
    outcome.selected_index = static_cast<int>(poll.index);
    outcome.selected_answer = poll.answer;

    try {
        std::vector<calibration::Embedding> embeddings;
        embeddings.reserve(answers.size());
        for (const auto& answer : answers) embeddings.push_back(backends.embedding->embed(answer));

        std::vector<calibration::Embedding> others;
        others.reserve(answers.size() - 1);
        for (std::size_t j = 0; j < embeddings.size(); ++j) {
            if (j != poll.index) others.push_back(embeddings[j]);
        }
        const std::vector<double> sims = calibration::similarities(embeddings[poll.index], others);

        std::size_t sim_pos = 0;
        for (std::size_t j = 0; j < ok_traces.size(); ++j) {
            if (j == poll.index) continue;
            result.traces[ok_traces[j]].similarity_to_selected = sims[sim_pos++];
        }

        const auto conf =
            calibration::confidence_from_sims(sims, config.similarity_boost_threshold, config.boost_weight);
        outcome.confidence_raw = conf.raw;
        outcome.confidence = conf.clamped;
        outcome.decision = calibration::decide(conf.clamped, config.cutoff);
    } catch (const backends::ConfigurationError&) {
        throw;
    } catch (const backends::BackendError&) {
        outcome.failed = true;
        outcome.confidence_raw = 0.0;
        outcome.confidence = 0.0;
        outcome.decision = Decision::Abstain;
    }
    return result;
}

ItemResult run_baseline(const EvalItem& item, const RunConfig& config, const Backends& backends,
                        const TemplateSet& templates) {
    (void)config;
    ItemResult result;
    result.item = item;

    ItemTrace trace;
    trace.language = item.target_language;
    trace.translated_question = item.question;
    trace.translated_choices = item.choices;
    try {
        trace.prompt = build_prompt(item.question, item.choices, templates.for_language(item.target_language));
        trace.raw_generation = backends.chat->chat(trace.prompt);
        trace.extracted_answer = extract_answer(trace.raw_generation);
        trace.back_translated_answer = trace.extracted_answer;
        if (trace.extracted_answer.empty()) {
            trace.error = "no answer left after extraction";
        } else {
            trace.ok = true;
        }
    } catch (const backends::ConfigurationError&) {
        throw;
    } catch (const backends::BackendError& e) {
        trace.error = e.what();
    }
    result.traces.push_back(std::move(trace));

    // The baseline never abstains: a failed generation is an answered-wrong
    // item, not an abstention.
    ItemOutcome& outcome = result.outcome;
    const ItemTrace& only = result.traces.front();
    outcome.selected_index = only.ok ? 0 : -1;
    outcome.selected_answer = only.extracted_answer;
    outcome.confidence_raw = 1.0;
    outcome.confidence = 1.0;
    outcome.decision = Decision::Answer;
    outcome.failed = !only.ok;
    return result;
}

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t k, std::uint64_t seed) {
    std::vector<std::size_t> indices(population);
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    if (k >= population) return indices;

    // Partial Fisher-Yates over raw mt19937_64 draws: identical samples on
    // every platform for a given seed.
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (population - i));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(k);
    std::sort(indices.begin(), indices.end());
    return indices;
}

std::vector<ItemResult> run_set(const std::vector<EvalItem>& items, const RunConfig& config,
                                const Backends& backends, const TemplateSet& templates,
                                const RunOptions& options) {
    std::vector<std::size_t> chosen;
    if (config.sample_size > 0 && config.sample_size < items.size()) {
        chosen = sample_indices(items.size(), config.sample_size, config.seed);
    } else {
        chosen.resize(items.size());
        std::iota(chosen.begin(), chosen.end(), std::size_t{0});
    }

    std::vector<ItemResult> results(chosen.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= chosen.size()) return;
            {
                std::lock_guard lock(error_mutex);
                if (error) return;
            }
            try {
                const EvalItem& item = items[chosen[i]];
                results[i] = options.mode == RunMode::mka ? run_item(item, config, backends, templates)
                                                          : run_baseline(item, config, backends, templates);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    const int max_threads = static_cast<int>(std::max<std::size_t>(chosen.size(), 1));
    const int threads = std::clamp(options.concurrency, 1, max_threads);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return results;
}

}  // namespace mka::pipeline
