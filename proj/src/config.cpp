#include "mka/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mka/cache.hpp"
#include "mka/http_backend.hpp"

namespace mka::config {

namespace {

using backends::ConfigurationError;

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigurationError("cannot open config file: " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigurationError("config is not valid JSON: " + std::string(e.what()));
    }
}

LanguageSet resolve_aux_set(const std::string& name, const nlohmann::json& explicit_languages) {
    if (!explicit_languages.is_null()) {
        LanguageSet set;
        set.name = name.empty() ? "custom" : name;
        for (const auto& code : explicit_languages) set.languages.push_back(code.get<std::string>());
        return set;
    }
    const auto presets = builtin_language_sets();
    const auto it = presets.find(name);
    if (it == presets.end()) throw ConfigurationError("unknown auxiliary language set: " + name);
    return it->second;
}

pipeline::RunMode mode_from_string(const std::string& text) {
    if (text == "mka") return pipeline::RunMode::mka;
    if (text == "baseline") return pipeline::RunMode::baseline;
    throw ConfigurationError("unknown mode: " + text + " (expected mka or baseline)");
}

}  // namespace

std::map<std::string, LanguageSet> builtin_language_sets() {
    return {
        {"high",
         LanguageSet{"high",
                     {"eng_Latn", "deu_Latn", "fra_Latn", "spa_Latn", "zho_Hans", "por_Latn"}}},
        {"mid",
         LanguageSet{"mid",
                     {"ell_Grek", "heb_Hebr", "hin_Deva", "ind_Latn", "ukr_Cyrl", "vie_Latn"}}},
        {"low",
         LanguageSet{"low",
                     {"tel_Telu", "npi_Deva", "mai_Deva", "bho_Deva", "yor_Latn", "zul_Latn"}}},
    };
}

std::map<std::string, double> builtin_model_cutoffs() {
    return {
        {"aya-expanse-8b", 0.70},
        {"qwen2.5-7b", 0.58},
        {"gemma2-2b", 0.66},
        {"gemma2-9b", 0.64},
        {"gemma2-27b", 0.64},
    };
}

AppConfig load_config(const std::filesystem::path& path) {
    const nlohmann::json j = read_json_file(path);
    if (!j.is_object()) throw ConfigurationError("config root must be a JSON object");

    AppConfig config;
    try {
        config.dataset_path = j.value("dataset", "");
        config.output_dir = j.value("output_dir", "out");
        config.cache_dir = j.value("cache_dir", "");
        config.offline = j.value("offline", false);
        config.concurrency = j.value("concurrency", 1);
        config.mode = mode_from_string(j.value("mode", "mka"));
        config.baseline_summary_path = j.value("baseline_summary", "");

        RunConfig& run = config.run;
        run.target_language = j.value("target_language", "");
        const std::string default_set_name = j.contains("aux_languages") ? "custom" : "high";
        run.auxiliary_set =
            resolve_aux_set(j.value("aux_set", default_set_name), j.value("aux_languages", nlohmann::json{}));
        run.similarity_boost_threshold = j.value("similarity_boost_threshold", 0.8);
        run.boost_weight = j.value("boost_weight", 1.5);
        run.judge_threshold = j.value("judge_threshold", 0.85);
        run.ngram_size = j.value("ngram_size", 3);
        run.seed = j.value("seed", std::uint64_t{97});
        run.sample_size = j.value("sample_size", std::size_t{200});

        if (j.contains("cutoff")) {
            run.cutoff = j.at("cutoff").get<double>();
        } else if (j.contains("model_profile")) {
            const auto profiles = builtin_model_cutoffs();
            const std::string profile = j.at("model_profile").get<std::string>();
            const auto it = profiles.find(profile);
            if (it == profiles.end()) throw ConfigurationError("unknown model profile: " + profile);
            run.cutoff = it->second;
        }

        if (const auto it = j.find("backends"); it != j.end()) {
            config.translation_backend = it->value("translation", nlohmann::json{});
            config.chat_backend = it->value("chat", nlohmann::json{});
            config.embedding_backend = it->value("embedding", nlohmann::json{});
        }

        if (const auto it = j.find("prompt_templates"); it != j.end()) {
            for (const auto& [key, value] : it->items()) {
                config.prompt_templates[key] = value.get<std::string>();
            }
            config.run.prompt_template_id = "custom";
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError("malformed config field: " + std::string(e.what()));
    }
    return config;
}

void apply_overrides(AppConfig& config, const Overrides& overrides) {
    if (overrides.cutoff) config.run.cutoff = *overrides.cutoff;
    if (overrides.aux_set) config.run.auxiliary_set = resolve_aux_set(*overrides.aux_set, {});
    if (overrides.target_lang) config.run.target_language = *overrides.target_lang;
    if (overrides.mode) config.mode = mode_from_string(*overrides.mode);
    if (overrides.seed) config.run.seed = *overrides.seed;
    if (overrides.sample_size) config.run.sample_size = static_cast<std::size_t>(*overrides.sample_size);
    if (overrides.cache_dir) config.cache_dir = *overrides.cache_dir;
    if (overrides.offline) config.offline = *overrides.offline;
}

void validate(const AppConfig& config) {
    const RunConfig& run = config.run;
    const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(run.cutoff)) throw ConfigurationError("cutoff must lie in [0, 1]");
    if (!in_unit(run.similarity_boost_threshold)) {
        throw ConfigurationError("similarity_boost_threshold must lie in [0, 1]");
    }
    if (!in_unit(run.judge_threshold)) throw ConfigurationError("judge_threshold must lie in [0, 1]");
    if (run.boost_weight < 1.0) throw ConfigurationError("boost_weight must be >= 1");
    if (run.ngram_size < 1) throw ConfigurationError("ngram_size must be >= 1");
    if (run.sample_size < 1) throw ConfigurationError("sample_size must be >= 1");
    if (config.concurrency < 1) throw ConfigurationError("concurrency must be >= 1");
    if (run.target_language.empty()) throw ConfigurationError("target_language is required");

    if (config.mode == pipeline::RunMode::mka) {
        const auto& langs = run.auxiliary_set.languages;
        if (langs.empty()) throw ConfigurationError("auxiliary language set is empty");
        std::set<std::string> seen(langs.begin(), langs.end());
        if (seen.size() != langs.size()) {
            throw ConfigurationError("auxiliary language set contains duplicates");
        }
    }
    if (config.offline && config.cache_dir.empty()) {
        throw ConfigurationError("offline mode requires cache_dir (nothing to replay from)");
    }
}

namespace {

backends::BackendEndpoint endpoint_from_json(const nlohmann::json& block, backends::BackendKind kind) {
    backends::BackendEndpoint endpoint;
    if (!block.contains("base_url")) {
        throw ConfigurationError("http backend block needs base_url (" + backends::to_string(kind) + ")");
    }
    endpoint.base_url = block.at("base_url").get<std::string>();
    endpoint.protocol_kind = kind;
    endpoint.model_name = block.value("model", "");
    endpoint.timeout = std::chrono::milliseconds(block.value("timeout_ms", 30000));
    endpoint.max_retries = block.value("max_retries", 2);
    endpoint.temperature = block.value("temperature", 0.0);
    endpoint.initial_backoff = std::chrono::milliseconds(block.value("initial_backoff_ms", 250));
    endpoint.api_key_env = block.value("api_key_env", "");
    return endpoint;
}

void apply_schema_overrides(backends::SchemaAdapter& adapter, const nlohmann::json& block) {
    const auto it = block.find("schema");
    if (it == block.end()) return;
    const nlohmann::json& s = *it;
    if (s.contains("endpoint_path")) adapter.endpoint_path = s.at("endpoint_path").get<std::string>();
    if (s.contains("request_template")) adapter.request_template = s.at("request_template");
    if (s.contains("text_path")) adapter.text_path = s.at("text_path").get<std::string>();
    if (s.contains("source_path")) adapter.source_path = s.at("source_path").get<std::string>();
    if (s.contains("target_path")) adapter.target_path = s.at("target_path").get<std::string>();
    if (s.contains("model_path")) adapter.model_path = s.at("model_path").get<std::string>();
    if (s.contains("temperature_path")) adapter.temperature_path = s.at("temperature_path").get<std::string>();
    if (s.contains("seed_path")) adapter.seed_path = s.at("seed_path").get<std::string>();
    if (s.contains("response_text_path")) {
        adapter.response_text_path = s.at("response_text_path").get<std::string>();
    }
    if (s.contains("response_embedding_path")) {
        adapter.response_embedding_path = s.at("response_embedding_path").get<std::string>();
    }
}

std::string block_kind(const nlohmann::json& block) {
    if (block.is_null()) return "";
    if (!block.is_object()) throw ConfigurationError("backend block must be a JSON object");
    return block.value("kind", "http");
}

std::shared_ptr<backends::TranslationBackend> translation_from_json(const nlohmann::json& block) {
    const std::string kind = block_kind(block);
    if (kind == "mock") {
        std::vector<backends::MockTranslator::Rule> rules;
        for (const auto& r : block.value("rules", nlohmann::json::array())) {
            rules.push_back(backends::MockTranslator::Rule{
                r.value("text", "*"), r.value("source", "*"), r.value("target", "*"),
                r.value("result", "*")});
        }
        const std::string fallback = block.value("fallback", "suffix");
        backends::MockTranslator::Fallback fb;
        if (fallback == "suffix") {
            fb = backends::MockTranslator::Fallback::suffix;
        } else if (fallback == "error") {
            fb = backends::MockTranslator::Fallback::error;
        } else {
            throw ConfigurationError("unknown mock translator fallback: " + fallback);
        }
        auto mock = std::make_shared<backends::MockTranslator>(std::move(rules), fb);
        if (block.contains("unsupported")) {
            mock->set_unsupported(block.at("unsupported").get<std::vector<std::string>>());
        }
        return mock;
    }
    if (kind == "http") {
        auto adapter = backends::SchemaAdapter::default_translation();
        apply_schema_overrides(adapter, block);
        return backends::make_http_translation(
            endpoint_from_json(block, backends::BackendKind::translation), std::move(adapter));
    }
    throw ConfigurationError("unknown translation backend kind: " + kind);
}

std::shared_ptr<backends::ChatBackend> chat_from_json(const nlohmann::json& block, std::uint64_t seed) {
    const std::string kind = block_kind(block);
    if (kind == "mock") {
        std::vector<backends::MockChat::Rule> rules;
        for (const auto& r : block.value("rules", nlohmann::json::array())) {
            rules.push_back(backends::MockChat::Rule{r.value("contains", ""), r.value("response", "")});
        }
        const std::string fallback = block.value("fallback", "first_choice");
        backends::MockChat::Fallback fb;
        if (fallback == "fixed") {
            fb = backends::MockChat::Fallback::fixed;
        } else if (fallback == "first_choice") {
            fb = backends::MockChat::Fallback::first_choice;
        } else if (fallback == "fail") {
            fb = backends::MockChat::Fallback::fail;
        } else if (fallback == "empty") {
            fb = backends::MockChat::Fallback::empty;
        } else {
            throw ConfigurationError("unknown mock chat fallback: " + fallback);
        }
        return std::make_shared<backends::MockChat>(std::move(rules), fb,
                                                    block.value("fixed_response", ""));
    }
    if (kind == "http") {
        auto adapter = backends::SchemaAdapter::default_chat();
        apply_schema_overrides(adapter, block);
        return backends::make_http_chat(endpoint_from_json(block, backends::BackendKind::chat),
                                        std::move(adapter), seed);
    }
    throw ConfigurationError("unknown chat backend kind: " + kind);
}

std::shared_ptr<backends::EmbeddingBackend> embedding_from_json(const nlohmann::json& block) {
    const std::string kind = block_kind(block);
    if (kind == "mock") {
        const std::string style = block.value("style", "hashed");
        const auto dimension = block.value("dimension", std::size_t{64});
        if (style == "hashed") return backends::MockEmbedder::hashed(dimension);
        if (style == "orthogonal") return backends::MockEmbedder::orthogonal(dimension);
        if (style == "prefix_hash") {
            return backends::MockEmbedder::prefix_hash(dimension,
                                                       block.value("prefix_codepoints", std::size_t{8}));
        }
        if (style == "anchor_table") {
            std::map<std::string, double> pairs;
            for (const auto& [text, cos] : block.value("pairs", nlohmann::json::object()).items()) {
                pairs[text] = cos.get<double>();
            }
            return backends::MockEmbedder::anchor_table(block.value("anchor", ""), std::move(pairs));
        }
        throw ConfigurationError("unknown mock embedder style: " + style);
    }
    if (kind == "http") {
        auto adapter = backends::SchemaAdapter::default_embedding();
        apply_schema_overrides(adapter, block);
        return backends::make_http_embedding(endpoint_from_json(block, backends::BackendKind::embedding),
                                             std::move(adapter));
    }
    throw ConfigurationError("unknown embedding backend kind: " + kind);
}

}  // namespace

pipeline::Backends build_backends(const AppConfig& config) {
    pipeline::Backends built;

    if (!config.translation_backend.is_null()) {
        built.translation = translation_from_json(config.translation_backend);
    } else if (config.mode == pipeline::RunMode::mka) {
        throw ConfigurationError("backends.translation is required in mka mode");
    }
    if (config.chat_backend.is_null()) throw ConfigurationError("backends.chat is required");
    built.chat = chat_from_json(config.chat_backend, config.run.seed);
    if (config.embedding_backend.is_null()) {
        throw ConfigurationError("backends.embedding is required");
    }
    built.embedding = embedding_from_json(config.embedding_backend);

    if (!config.cache_dir.empty()) {
        auto store = std::make_shared<backends::CacheStore>(config.cache_dir);
        if (built.translation) {
            built.translation = backends::with_cache(built.translation, store, config.offline);
        }
        built.chat = backends::with_cache(built.chat, store, config.offline);
        built.embedding = backends::with_cache(built.embedding, store, config.offline);
    }
    return built;
}

pipeline::TemplateSet build_templates(const AppConfig& config) {
    auto templates = pipeline::TemplateSet::builtin();
    for (const auto& [key, text] : config.prompt_templates) {
        auto parsed = pipeline::PromptTemplate::parse(text);
        if (key == "default") {
            templates.fallback = std::move(parsed);
        } else {
            templates.by_language.emplace(key, std::move(parsed));
        }
    }
    return templates;
}

nlohmann::json config_echo(const AppConfig& config) {
    const RunConfig& run = config.run;

    std::string template_digest;
    {
        std::string all;
        for (const auto& [key, text] : config.prompt_templates) {
            all += key;
            all += '\0';
            all += text;
            all += '\0';
        }
        std::ostringstream hex;
        hex << std::hex << backends::fnv1a64(all);
        template_digest = hex.str();
    }

    return nlohmann::json{
        {"mode", config.mode == pipeline::RunMode::mka ? "mka" : "baseline"},
        {"target_language", run.target_language},
        {"auxiliary_set",
         {{"name", run.auxiliary_set.name}, {"languages", run.auxiliary_set.languages}}},
        {"cutoff", run.cutoff},
        {"similarity_boost_threshold", run.similarity_boost_threshold},
        {"boost_weight", run.boost_weight},
        {"judge_threshold", run.judge_threshold},
        {"ngram_size", run.ngram_size},
        {"seed", run.seed},
        {"sample_size", run.sample_size},
        {"concurrency", config.concurrency},
        {"prompt_template_id", run.prompt_template_id},
        {"prompt_templates_digest", template_digest},
        {"backends",
         {{"translation", config.translation_backend},
          {"chat", config.chat_backend},
          {"embedding", config.embedding_backend}}},
    };
}

}  // namespace mka::config
