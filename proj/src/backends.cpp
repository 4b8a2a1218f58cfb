#include "mka/backends.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mka/text.hpp"

namespace mka::backends {

std::string to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::translation: return "translation";
        case BackendKind::chat: return "chat";
        case BackendKind::embedding: return "embedding";
    }
    return "unknown";
}

calibration::Embedding EmbeddingBackend::embed(const std::string& text) {
    if (text::trim(text).empty()) throw std::invalid_argument("embed: text must be non-empty");
    calibration::Embedding embedding = embed_impl(text);
    if (embedding.values.empty()) throw BackendError("embedding backend returned an empty vector");
    for (const double v : embedding.values) {
        if (!std::isfinite(v)) throw BackendError("embedding contains non-finite values");
    }

    std::size_t expected = expected_dimension_.load(std::memory_order_relaxed);
    if (expected == 0) {
        std::size_t zero = 0;
        expected_dimension_.compare_exchange_strong(zero, embedding.dimension());
        expected = expected_dimension_.load(std::memory_order_relaxed);
    }
    if (embedding.dimension() != expected) {
        throw ConfigurationError("embedding dimension drift: got " + std::to_string(embedding.dimension()) +
                                 ", run established " + std::to_string(expected));
    }
    return embedding;
}

std::chrono::milliseconds backoff_delay(std::chrono::milliseconds initial, int attempt) {
    if (attempt < 0) attempt = 0;
    return initial * (attempt + 1);
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : data) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// MockTranslator
// ---------------------------------------------------------------------------

std::string MockTranslator::translate_impl(const std::string& text, const std::string& source,
                                           const std::string& target) {
    for (const auto& code : unsupported_) {
        if (code == source || code == target) {
            throw ConfigurationError("unsupported language code: " + code);
        }
    }

    // Multi-line payloads (joint choice translation) are handled line by
    // line; "|||" separator lines pass through untouched.
    if (text.find('\n') == std::string::npos) return translate_segment(text, source, target);

    std::ostringstream out;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!first) out << '\n';
        first = false;
        if (line == "|||" || line.empty()) {
            out << line;
        } else {
            out << translate_segment(line, source, target);
        }
    }
    return out.str();
}

std::string MockTranslator::translate_segment(const std::string& text, const std::string& source,
                                              const std::string& target) const {
    for (const auto& rule : rules_) {
        const bool text_ok = rule.text == "*" || rule.text == text;
        const bool source_ok = rule.source == "*" || rule.source == source;
        const bool target_ok = rule.target == "*" || rule.target == target;
        if (text_ok && source_ok && target_ok) {
            return rule.result == "*" ? text : rule.result;
        }
    }
    if (fallback_ == Fallback::error) {
        throw TransportError("no scripted translation for \"" + text + "\" (" + source + " -> " + target + ")");
    }
    return text + "#" + target;
}

// ---------------------------------------------------------------------------
// MockChat
// ---------------------------------------------------------------------------

std::string MockChat::chat_impl(const std::string& prompt) {
    for (const auto& rule : rules_) {
        if (prompt.find(rule.contains) != std::string::npos) return rule.response;
    }
    switch (fallback_) {
        case Fallback::fixed:
            return fixed_response_;
        case Fallback::first_choice: {
            static constexpr std::string_view marker = "Options: ";
            const auto pos = prompt.find(marker);
            if (pos == std::string::npos) return {};
            const auto start = pos + marker.size();
            auto end = prompt.find_first_of(",\n", start);
            if (end == std::string::npos) end = prompt.size();
            return std::string(text::trim(std::string_view(prompt).substr(start, end - start)));
        }
        case Fallback::fail:
            throw TransportError("scripted chat failure");
        case Fallback::empty:
            return {};
    }
    return {};
}

// ---------------------------------------------------------------------------
// MockEmbedder
// ---------------------------------------------------------------------------

std::shared_ptr<MockEmbedder> MockEmbedder::orthogonal(std::size_t dimension) {
    auto mock = std::shared_ptr<MockEmbedder>(new MockEmbedder());
    mock->mode_ = Mode::orthogonal;
    mock->dimension_ = dimension;
    return mock;
}

std::shared_ptr<MockEmbedder> MockEmbedder::hashed(std::size_t dimension) {
    auto mock = std::shared_ptr<MockEmbedder>(new MockEmbedder());
    mock->mode_ = Mode::hashed;
    mock->dimension_ = dimension;
    return mock;
}

std::shared_ptr<MockEmbedder> MockEmbedder::prefix_hash(std::size_t dimension, std::size_t prefix_cps) {
    auto mock = std::shared_ptr<MockEmbedder>(new MockEmbedder());
    mock->mode_ = Mode::prefix_hash;
    mock->dimension_ = dimension;
    mock->prefix_cps_ = prefix_cps == 0 ? 1 : prefix_cps;
    return mock;
}

std::shared_ptr<MockEmbedder> MockEmbedder::anchor_table(std::string anchor, std::map<std::string, double> pairs) {
    auto mock = std::shared_ptr<MockEmbedder>(new MockEmbedder());
    mock->mode_ = Mode::anchor_table;
    mock->anchor_ = std::move(anchor);
    mock->pairs_ = std::move(pairs);
    mock->dimension_ = 1 + mock->pairs_.size();
    for (const auto& [label, cos] : mock->pairs_) {
        if (cos < -1.0 || cos > 1.0) {
            throw ConfigurationError("anchor_table cosine out of [-1,1] for \"" + label + "\"");
        }
    }
    return mock;
}

namespace {

std::vector<double> seeded_vector(std::uint64_t seed, std::size_t dimension) {
    std::vector<double> values(dimension);
    std::uint64_t state = seed;
    for (auto& v : values) {
        const std::uint64_t bits = splitmix64(state);
        // 53 mantissa bits -> [0,1), then to [-1,1)
        v = static_cast<double>(bits >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    }
    return values;
}

}  // namespace

calibration::Embedding MockEmbedder::embed_impl(const std::string& text) {
    switch (mode_) {
        case Mode::orthogonal: {
            std::lock_guard lock(registry_mutex_);
            auto [it, inserted] = basis_registry_.try_emplace(text, basis_registry_.size());
            if (it->second >= dimension_) {
                throw ConfigurationError("orthogonal mock embedder exhausted its " +
                                         std::to_string(dimension_) + " basis vectors");
            }
            std::vector<double> values(dimension_, 0.0);
            values[it->second] = 1.0;
            return {std::move(values)};
        }
        case Mode::hashed:
            return {seeded_vector(fnv1a64(text::normalize_utf8(text)), dimension_)};
        case Mode::prefix_hash: {
            std::vector<char32_t> cps = text::normalize(text);
            if (cps.size() > prefix_cps_) cps.resize(prefix_cps_);
            return {seeded_vector(fnv1a64(text::utf8_encode(cps)), dimension_)};
        }
        case Mode::anchor_table: {
            std::vector<double> values(dimension_, 0.0);
            if (text == anchor_) {
                values[0] = 1.0;
                return {std::move(values)};
            }
            const auto it = pairs_.find(text);
            if (it == pairs_.end()) {
                throw ConfigurationError("anchor_table mock has no entry for \"" + text + "\"");
            }
            const double cos = it->second;
            const std::size_t axis = 1 + static_cast<std::size_t>(std::distance(pairs_.begin(), it));
            values[0] = cos;
            values[axis] = std::sqrt(std::max(0.0, 1.0 - cos * cos));
            return {std::move(values)};
        }
    }
    throw BackendError("mock embedder: unreachable mode");
}

}  // namespace mka::backends
