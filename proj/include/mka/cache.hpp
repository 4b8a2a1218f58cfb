#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include <json.hpp>

#include "mka/backends.hpp"

namespace mka::backends {

// Stable identity of one backend request. Equal requests produce equal keys
// across process restarts.
struct CacheKey {
    std::string kind;
    std::string identity;  // backend identity (model name + decoding settings)
    std::uint64_t digest = 0;

    static CacheKey make(const std::string& kind, const std::string& identity, const nlohmann::json& request);
    std::string filename(int probe = 0) const;
};

// Append-only record/replay store: one JSON document per key holding the
// verbatim request and response. Stored requests are compared on lookup, so
// digest collisions degrade to probing, never to wrong answers. I/O failures
// degrade to uncached operation with a one-time warning.
class CacheStore {
public:
    explicit CacheStore(std::filesystem::path dir);

    std::optional<nlohmann::json> get(const CacheKey& key, const nlohmann::json& request) const;
    void put(const CacheKey& key, const nlohmann::json& request, const nlohmann::json& response);

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    mutable std::shared_mutex mutex_;
    mutable bool warned_ = false;

    void warn_once(const std::string& what) const;
};

// Cache wrappers. Identical requests are served from the store without
// touching the inner backend; offline mode turns a miss into a transport
// error instead of a network call.
std::shared_ptr<TranslationBackend> with_cache(std::shared_ptr<TranslationBackend> inner,
                                               std::shared_ptr<CacheStore> store, bool offline = false);
std::shared_ptr<ChatBackend> with_cache(std::shared_ptr<ChatBackend> inner,
                                        std::shared_ptr<CacheStore> store, bool offline = false);
std::shared_ptr<EmbeddingBackend> with_cache(std::shared_ptr<EmbeddingBackend> inner,
                                             std::shared_ptr<CacheStore> store, bool offline = false);

}  // namespace mka::backends
