#include "mka/http_backend.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

namespace mka::backends {

SchemaAdapter SchemaAdapter::default_translation() {
    SchemaAdapter a;
    a.endpoint_path = "/translate";
    a.text_path = "/text";
    a.source_path = "/source";
    a.target_path = "/target";
    a.model_path = "/model";
    a.response_text_path = "/translation";
    return a;
}

SchemaAdapter SchemaAdapter::default_chat() {
    SchemaAdapter a;
    a.endpoint_path = "/v1/chat/completions";
    a.request_template = nlohmann::json{{"messages", nlohmann::json::array({nlohmann::json{
                                            {"role", "user"}, {"content", ""}}})}};
    a.text_path = "/messages/0/content";
    a.model_path = "/model";
    a.temperature_path = "/temperature";
    a.seed_path = "/seed";
    a.response_text_path = "/choices/0/message/content";
    return a;
}

SchemaAdapter SchemaAdapter::default_embedding() {
    SchemaAdapter a;
    a.endpoint_path = "/v1/embeddings";
    a.text_path = "/input";
    a.model_path = "/model";
    a.response_embedding_path = "/data/0/embedding";
    return a;
}

HttpTransport make_httplib_transport(const BackendEndpoint& endpoint) {
    auto client = std::make_shared<httplib::Client>(endpoint.base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
    client->set_connection_timeout(secs.count() ? secs.count() : 1, 0);
    client->set_read_timeout(secs.count() ? secs.count() : 1, 0);
    client->set_write_timeout(secs.count() ? secs.count() : 1, 0);

    std::string bearer;
    if (!endpoint.api_key_env.empty()) {
        if (const char* key = std::getenv(endpoint.api_key_env.c_str()); key && *key) bearer = key;
    }

    return [client, bearer](const std::string& path, const std::string& body) -> HttpResponse {
        httplib::Headers headers;
        if (!bearer.empty()) headers.emplace("Authorization", "Bearer " + bearer);
        auto result = client->Post(path, headers, body, "application/json");
        if (!result) {
            throw TransportError("HTTP transport failure: " + httplib::to_string(result.error()));
        }
        return HttpResponse{result->status, result->body};
    };
}

HttpJsonClient::HttpJsonClient(BackendEndpoint endpoint, HttpTransport transport)
    : endpoint_(std::move(endpoint)), transport_(std::move(transport)) {
    if (!transport_) transport_ = make_httplib_transport(endpoint_);
}

nlohmann::json HttpJsonClient::post(const std::string& path, const nlohmann::json& body) {
    const std::string payload = body.dump();
    std::string last_error;
    const int attempts = 1 + std::max(0, endpoint_.max_retries);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            const auto delay = backoff_delay(endpoint_.initial_backoff, attempt - 1);
            if (delay.count() > 0) std::this_thread::sleep_for(delay);
        }
        try {
            const HttpResponse response = transport_(path, payload);
            if (response.status >= 200 && response.status < 300) {
                try {
                    return nlohmann::json::parse(response.body);
                } catch (const nlohmann::json::exception& e) {
                    throw BackendError(std::string("backend returned malformed JSON: ") + e.what());
                }
            }
            if (response.status == 429 || response.status >= 500) {
                last_error = "HTTP " + std::to_string(response.status);
                continue;
            }
            throw ConfigurationError("backend rejected request (HTTP " + std::to_string(response.status) +
                                     "): " + response.body);
        } catch (const TransportError& e) {
            last_error = e.what();
        }
    }
    throw TransportError("backend unavailable after " + std::to_string(attempts) +
                         " attempts: " + last_error);
}

namespace {

nlohmann::json build_request(const SchemaAdapter& adapter, const BackendEndpoint& endpoint) {
    nlohmann::json body = adapter.request_template.is_null() ? nlohmann::json::object()
                                                             : adapter.request_template;
    if (!adapter.model_path.empty() && !endpoint.model_name.empty()) {
        body[nlohmann::json::json_pointer(adapter.model_path)] = endpoint.model_name;
    }
    return body;
}

nlohmann::json extract(const nlohmann::json& doc, const std::string& pointer, const char* what) {
    try {
        return doc.at(nlohmann::json::json_pointer(pointer));
    } catch (const nlohmann::json::exception&) {
        throw BackendError(std::string("backend response missing ") + what + " at " + pointer);
    }
}

class HttpTranslation : public TranslationBackend {
public:
    HttpTranslation(BackendEndpoint endpoint, SchemaAdapter adapter, HttpTransport transport)
        : adapter_(std::move(adapter)), client_(std::move(endpoint), std::move(transport)) {}

    std::string identity() const override { return client_.endpoint().model_name; }

protected:
    std::string translate_impl(const std::string& text, const std::string& source,
                               const std::string& target) override {
        nlohmann::json body = build_request(adapter_, client_.endpoint());
        body[nlohmann::json::json_pointer(adapter_.text_path)] = text;
        if (!adapter_.source_path.empty()) body[nlohmann::json::json_pointer(adapter_.source_path)] = source;
        if (!adapter_.target_path.empty()) body[nlohmann::json::json_pointer(adapter_.target_path)] = target;
        try {
            const nlohmann::json response = client_.post(adapter_.endpoint_path, body);
            return extract(response, adapter_.response_text_path, "translation text").get<std::string>();
        } catch (const TransportError& e) {
            throw TransportError(std::string(e.what()) + " (language pair " + source + " -> " + target + ")");
        }
    }

private:
    SchemaAdapter adapter_;
    HttpJsonClient client_;
};

class HttpChat : public ChatBackend {
public:
    HttpChat(BackendEndpoint endpoint, SchemaAdapter adapter, std::uint64_t seed, HttpTransport transport)
        : adapter_(std::move(adapter)), seed_(seed), client_(std::move(endpoint), std::move(transport)) {}

    std::string identity() const override {
        // Decoding settings are part of the cache identity.
        return client_.endpoint().model_name + "@t=" + std::to_string(client_.endpoint().temperature) +
               ",seed=" + std::to_string(seed_);
    }

protected:
    std::string chat_impl(const std::string& prompt) override {
        nlohmann::json body = build_request(adapter_, client_.endpoint());
        body[nlohmann::json::json_pointer(adapter_.text_path)] = prompt;
        if (!adapter_.temperature_path.empty()) {
            body[nlohmann::json::json_pointer(adapter_.temperature_path)] = client_.endpoint().temperature;
        }
        if (!adapter_.seed_path.empty()) {
            body[nlohmann::json::json_pointer(adapter_.seed_path)] = seed_;
        }
        const nlohmann::json response = client_.post(adapter_.endpoint_path, body);
        return extract(response, adapter_.response_text_path, "generation").get<std::string>();
    }

private:
    SchemaAdapter adapter_;
    std::uint64_t seed_;
    HttpJsonClient client_;
};

class HttpEmbedding : public EmbeddingBackend {
public:
    HttpEmbedding(BackendEndpoint endpoint, SchemaAdapter adapter, HttpTransport transport)
        : adapter_(std::move(adapter)), client_(std::move(endpoint), std::move(transport)) {}

    std::string identity() const override { return client_.endpoint().model_name; }

protected:
    calibration::Embedding embed_impl(const std::string& text) override {
        nlohmann::json body = build_request(adapter_, client_.endpoint());
        body[nlohmann::json::json_pointer(adapter_.text_path)] = text;
        const nlohmann::json response = client_.post(adapter_.endpoint_path, body);
        const nlohmann::json values = extract(response, adapter_.response_embedding_path, "embedding array");
        if (!values.is_array()) throw BackendError("embedding field is not an array");
        return {values.get<std::vector<double>>()};
    }

private:
    SchemaAdapter adapter_;
    HttpJsonClient client_;
};

}  // namespace

std::shared_ptr<TranslationBackend> make_http_translation(BackendEndpoint endpoint, SchemaAdapter adapter,
                                                          HttpTransport transport) {
    return std::make_shared<HttpTranslation>(std::move(endpoint), std::move(adapter), std::move(transport));
}

std::shared_ptr<ChatBackend> make_http_chat(BackendEndpoint endpoint, SchemaAdapter adapter,
                                            std::uint64_t seed, HttpTransport transport) {
    return std::make_shared<HttpChat>(std::move(endpoint), std::move(adapter), seed, std::move(transport));
}

std::shared_ptr<EmbeddingBackend> make_http_embedding(BackendEndpoint endpoint, SchemaAdapter adapter,
                                                      HttpTransport transport) {
    return std::make_shared<HttpEmbedding>(std::move(endpoint), std::move(adapter), std::move(transport));
}

}  // namespace mka::backends
