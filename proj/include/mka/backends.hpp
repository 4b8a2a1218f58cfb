#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "mka/calibration.hpp"

namespace mka::backends {

enum class BackendKind { translation, chat, embedding };

std::string to_string(BackendKind kind);

struct BackendEndpoint {
    std::string base_url;
    BackendKind protocol_kind = BackendKind::chat;
    std::string model_name;
    std::chrono::milliseconds timeout{30000};
    int max_retries = 2;
    double temperature = 0.0;
    std::chrono::milliseconds initial_backoff{250};
    std::string api_key_env;  // env var holding a bearer token, if any
};

struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Transport failure that survived the retry budget.
struct TransportError : BackendError {
    using BackendError::BackendError;
};

// Misconfiguration: unsupported language code, bad adapter path, embedding
// dimension drift. Fatal; not contained per item.
struct ConfigurationError : BackendError {
    using BackendError::BackendError;
};

struct EmptyResponseError : BackendError {
    using BackendError::BackendError;
};

class TranslationBackend {
public:
    virtual ~TranslationBackend() = default;

    // Identity pairs return the text unchanged without touching the backend.
    std::string translate(const std::string& text, const std::string& source, const std::string& target) {
        if (source == target) return text;
        return translate_impl(text, source, target);
    }

    virtual std::string identity() const = 0;

protected:
    virtual std::string translate_impl(const std::string& text, const std::string& source,
                                       const std::string& target) = 0;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;

    std::string chat(const std::string& prompt) {
        if (prompt.empty()) throw std::invalid_argument("chat: prompt must be non-empty");
        std::string generation = chat_impl(prompt);
        if (generation.empty()) throw EmptyResponseError("chat backend returned an empty generation");
        return generation;
    }

    virtual std::string identity() const = 0;

protected:
    virtual std::string chat_impl(const std::string& prompt) = 0;
};

class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;

    // Enforces non-empty input, finite values, and a stable dimension across
    // the run (drift is a fatal configuration error).
    calibration::Embedding embed(const std::string& text);

    virtual std::string identity() const = 0;

protected:
    virtual calibration::Embedding embed_impl(const std::string& text) = 0;

private:
    std::atomic<std::size_t> expected_dimension_{0};
};

// Non-decreasing linear backoff schedule; attempt is 0-based.
std::chrono::milliseconds backoff_delay(std::chrono::milliseconds initial, int attempt);

// Stable 64-bit content hashes (FNV-1a / splitmix64); used for cache digests
// and deterministic mock embeddings.
std::uint64_t fnv1a64(std::string_view data);
std::uint64_t splitmix64(std::uint64_t& state);

// ---------------------------------------------------------------------------
// Deterministic mocks. Pure functions of their fixtures; whole-pipeline runs
// over mocks are bit-reproducible.
// ---------------------------------------------------------------------------

class MockTranslator : public TranslationBackend {
public:
    struct Rule {
        std::string text;    // exact match; "*" matches any
        std::string source;  // "*" matches any
        std::string target;  // "*" matches any
        std::string result;  // "*" as result echoes the input text
    };

    enum class Fallback {
        suffix,  // text + "#" + target
        error,   // unscripted request throws
    };

    explicit MockTranslator(std::vector<Rule> rules = {}, Fallback fallback = Fallback::suffix)
        : rules_(std::move(rules)), fallback_(fallback) {}

    void add_rule(Rule rule) { rules_.push_back(std::move(rule)); }
    void set_unsupported(std::vector<std::string> codes) { unsupported_ = std::move(codes); }

    std::string identity() const override { return "mock-translator"; }

protected:
    std::string translate_impl(const std::string& text, const std::string& source,
                               const std::string& target) override;

private:
    std::string translate_segment(const std::string& text, const std::string& source,
                                  const std::string& target) const;

    std::vector<Rule> rules_;
    Fallback fallback_;
    std::vector<std::string> unsupported_;
};

class MockChat : public ChatBackend {
public:
    struct Rule {
        std::string contains;  // substring of the prompt
        std::string response;
    };

    enum class Fallback {
        fixed,         // fixed_response
        first_choice,  // first entry of the prompt's "Options:" line
        fail,          // TransportError
        empty,         // empty generation (EmptyResponseError upstream)
    };

    explicit MockChat(std::vector<Rule> rules = {}, Fallback fallback = Fallback::fixed,
                      std::string fixed_response = {})
        : rules_(std::move(rules)), fallback_(fallback), fixed_response_(std::move(fixed_response)) {}

    void add_rule(Rule rule) { rules_.push_back(std::move(rule)); }

    std::string identity() const override { return "mock-chat"; }

protected:
    std::string chat_impl(const std::string& prompt) override;

private:
    std::vector<Rule> rules_;
    Fallback fallback_;
    std::string fixed_response_;
};

class MockEmbedder : public EmbeddingBackend {
public:
    enum class Mode {
        orthogonal,   // distinct texts -> distinct basis vectors
        hashed,       // seeded pseudo-random vector per text
        prefix_hash,  // hashed over the first prefix_cps normalized code points
        anchor_table, // prescribed cosine against a fixed anchor text
    };

    static std::shared_ptr<MockEmbedder> orthogonal(std::size_t dimension);
    static std::shared_ptr<MockEmbedder> hashed(std::size_t dimension);
    static std::shared_ptr<MockEmbedder> prefix_hash(std::size_t dimension, std::size_t prefix_cps);
    // pairs: text -> cosine(anchor, text). The anchor itself embeds to the
    // first basis vector; unknown texts are a configuration error.
    static std::shared_ptr<MockEmbedder> anchor_table(std::string anchor, std::map<std::string, double> pairs);

    std::string identity() const override { return "mock-embedder"; }

protected:
    calibration::Embedding embed_impl(const std::string& text) override;

private:
    MockEmbedder() = default;

    Mode mode_ = Mode::hashed;
    std::size_t dimension_ = 64;
    std::size_t prefix_cps_ = 8;
    std::string anchor_;
    std::map<std::string, double> pairs_;

    std::mutex registry_mutex_;
    std::map<std::string, std::size_t> basis_registry_;  // orthogonal mode
};

}  // namespace mka::backends
