#include "mka/cache.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace mka::backends {

namespace {

constexpr int kMaxProbes = 8;

std::string sanitize(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                          c == '-' || c == '_' || c == '.';
        out.push_back(keep ? c : '_');
    }
    return out.empty() ? std::string("x") : out;
}

std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

}  // namespace

CacheKey CacheKey::make(const std::string& kind, const std::string& identity, const nlohmann::json& request) {
    return CacheKey{kind, identity, fnv1a64(request.dump())};
}

std::string CacheKey::filename(int probe) const {
    std::string name = kind + "-" + sanitize(identity) + "-" + hex64(digest);
    if (probe > 0) name += "-" + std::to_string(probe);
    return name + ".json";
}

CacheStore::CacheStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

void CacheStore::warn_once(const std::string& what) const {
    if (!warned_) {
        warned_ = true;
        std::cerr << "warning: cache store degraded to uncached operation: " << what << "\n";
    }
}

std::optional<nlohmann::json> CacheStore::get(const CacheKey& key, const nlohmann::json& request) const {
    std::shared_lock lock(mutex_);
    for (int probe = 0; probe < kMaxProbes; ++probe) {
        const auto path = dir_ / key.filename(probe);
        std::ifstream in(path, std::ios::binary);
        if (!in) return std::nullopt;
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception&) {
            return std::nullopt;  // truncated or corrupt record: treat as a miss
        }
        if (doc.contains("request") && doc["request"] == request) return doc.value("response", nlohmann::json());
    }
    return std::nullopt;
}

void CacheStore::put(const CacheKey& key, const nlohmann::json& request, const nlohmann::json& response) {
    std::unique_lock lock(mutex_);
    try {
        for (int probe = 0; probe < kMaxProbes; ++probe) {
            const auto path = dir_ / key.filename(probe);
            if (std::filesystem::exists(path)) {
                std::ifstream in(path, std::ios::binary);
                nlohmann::json doc;
                try {
                    in >> doc;
                } catch (const nlohmann::json::exception&) {
                    continue;
                }
                if (doc.contains("request") && doc["request"] == request) return;  // write-once
                continue;  // digest collision: probe the next slot
            }
            nlohmann::json doc{{"request", request}, {"response", response}};
            const auto tmp = path.string() + ".tmp";
            {
                std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
                if (!out) throw std::runtime_error("cannot open " + tmp);
                out << doc.dump(2) << "\n";
                if (!out) throw std::runtime_error("short write to " + tmp);
            }
            std::filesystem::rename(tmp, path);
            return;
        }
        warn_once("probe chain exhausted for " + key.filename());
    } catch (const std::exception& e) {
        warn_once(e.what());
    }
}

namespace {

class CachedTranslation : public TranslationBackend {
public:
    CachedTranslation(std::shared_ptr<TranslationBackend> inner, std::shared_ptr<CacheStore> store, bool offline)
        : inner_(std::move(inner)), store_(std::move(store)), offline_(offline) {}

    std::string identity() const override { return inner_->identity(); }

protected:
    std::string translate_impl(const std::string& text, const std::string& source,
                               const std::string& target) override {
        const nlohmann::json request{
            {"kind", "translation"}, {"identity", inner_->identity()},
            {"source", source},      {"target", target},
            {"text", text},
        };
        const auto key = CacheKey::make("translation", inner_->identity(), request);
        if (auto hit = store_->get(key, request)) return hit->value("text", std::string());
        if (offline_) {
            throw TransportError("offline run: cache miss for translation " + source + " -> " + target);
        }
        std::string result = inner_->translate(text, source, target);
        store_->put(key, request, nlohmann::json{{"text", result}});
        return result;
    }

private:
    std::shared_ptr<TranslationBackend> inner_;
    std::shared_ptr<CacheStore> store_;
    bool offline_;
};

class CachedChat : public ChatBackend {
public:
    CachedChat(std::shared_ptr<ChatBackend> inner, std::shared_ptr<CacheStore> store, bool offline)
        : inner_(std::move(inner)), store_(std::move(store)), offline_(offline) {}

    std::string identity() const override { return inner_->identity(); }

protected:
    std::string chat_impl(const std::string& prompt) override {
        const nlohmann::json request{
            {"kind", "chat"},
            {"identity", inner_->identity()},
            {"prompt", prompt},
        };
        const auto key = CacheKey::make("chat", inner_->identity(), request);
        if (auto hit = store_->get(key, request)) return hit->value("text", std::string());
        if (offline_) throw TransportError("offline run: cache miss for chat prompt");
        std::string result = inner_->chat(prompt);
        store_->put(key, request, nlohmann::json{{"text", result}});
        return result;
    }

private:
    std::shared_ptr<ChatBackend> inner_;
    std::shared_ptr<CacheStore> store_;
    bool offline_;
};

class CachedEmbedding : public EmbeddingBackend {
public:
    CachedEmbedding(std::shared_ptr<EmbeddingBackend> inner, std::shared_ptr<CacheStore> store, bool offline)
        : inner_(std::move(inner)), store_(std::move(store)), offline_(offline) {}

    std::string identity() const override { return inner_->identity(); }

protected:
    calibration::Embedding embed_impl(const std::string& text) override {
        const nlohmann::json request{
            {"kind", "embedding"},
            {"identity", inner_->identity()},
            {"text", text},
        };
        const auto key = CacheKey::make("embedding", inner_->identity(), request);
        if (auto hit = store_->get(key, request)) {
            return {hit->value("embedding", std::vector<double>())};
        }
        if (offline_) throw TransportError("offline run: cache miss for embedding");
        calibration::Embedding result = inner_->embed(text);
        store_->put(key, request, nlohmann::json{{"embedding", result.values}});
        return result;
    }

private:
    std::shared_ptr<EmbeddingBackend> inner_;
    std::shared_ptr<CacheStore> store_;
    bool offline_;
};

}  // namespace

std::shared_ptr<TranslationBackend> with_cache(std::shared_ptr<TranslationBackend> inner,
                                               std::shared_ptr<CacheStore> store, bool offline) {
    return std::make_shared<CachedTranslation>(std::move(inner), std::move(store), offline);
}

std::shared_ptr<ChatBackend> with_cache(std::shared_ptr<ChatBackend> inner,
                                        std::shared_ptr<CacheStore> store, bool offline) {
    return std::make_shared<CachedChat>(std::move(inner), std::move(store), offline);
}

std::shared_ptr<EmbeddingBackend> with_cache(std::shared_ptr<EmbeddingBackend> inner,
                                             std::shared_ptr<CacheStore> store, bool offline) {
    return std::make_shared<CachedEmbedding>(std::move(inner), std::move(store), offline);
}

}  // namespace mka::backends
