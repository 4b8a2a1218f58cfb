#pragma once

#include <functional>
#include <memory>
#include <string>

#include <json.hpp>

#include "mka/backends.hpp"

namespace mka::backends {

// Field paths are JSON Pointers ("/messages/0/content"). The request template
// is the base body; input fields are injected at the configured paths, so
// common open-source inference servers can be plugged in without code changes.
struct SchemaAdapter {
    std::string endpoint_path;
    nlohmann::json request_template = nlohmann::json::object();
    std::string text_path;
    std::string source_path;     // translation only
    std::string target_path;     // translation only
    std::string model_path;      // optional
    std::string temperature_path;  // chat, optional
    std::string seed_path;         // chat, optional
    std::string response_text_path;
    std::string response_embedding_path;

    static SchemaAdapter default_translation();
    static SchemaAdapter default_chat();       // OpenAI-compatible
    static SchemaAdapter default_embedding();  // OpenAI-compatible
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

// Transport is injectable for tests; throws TransportError on connect-level
// failures. The default transport is a cpp-httplib client.
using HttpTransport = std::function<HttpResponse(const std::string& path, const std::string& body)>;

HttpTransport make_httplib_transport(const BackendEndpoint& endpoint);

// POSTs JSON with retries on transport errors, 429 and 5xx. Other 4xx are
// configuration errors and fail fast.
class HttpJsonClient {
public:
    HttpJsonClient(BackendEndpoint endpoint, HttpTransport transport = {});

    nlohmann::json post(const std::string& path, const nlohmann::json& body);

    const BackendEndpoint& endpoint() const { return endpoint_; }

private:
    BackendEndpoint endpoint_;
    HttpTransport transport_;
};

std::shared_ptr<TranslationBackend> make_http_translation(BackendEndpoint endpoint, SchemaAdapter adapter,
                                                          HttpTransport transport = {});
std::shared_ptr<ChatBackend> make_http_chat(BackendEndpoint endpoint, SchemaAdapter adapter,
                                            std::uint64_t seed, HttpTransport transport = {});
std::shared_ptr<EmbeddingBackend> make_http_embedding(BackendEndpoint endpoint, SchemaAdapter adapter,
                                                      HttpTransport transport = {});

}  // namespace mka::backends
