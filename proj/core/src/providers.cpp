#include "designflow/providers.hpp"

#include "designflow/error.hpp"
#include "designflow/hashing.hpp"
#include "designflow/http_providers.hpp"
#include "designflow/mock_providers.hpp"
#include "designflow/text.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

namespace designflow {

using nlohmann::json;

std::string_view to_string(SchemaId id) noexcept {
    switch (id) {
        case SchemaId::ExtractedRequirements: return "ExtractedRequirements";
        case SchemaId::RequirementCandidates: return "RequirementCandidates";
        case SchemaId::ElementCandidates: return "ElementCandidates";
        case SchemaId::EnhancedLine: return "EnhancedLine";
        case SchemaId::IntegratedParagraph: return "IntegratedParagraph";
    }
    return "unknown";
}

StructuredSchema StructuredSchema::extracted_requirements() {
    return {SchemaId::ExtractedRequirements, 0, std::nullopt};
}

StructuredSchema StructuredSchema::requirement_candidates(std::size_t n) {
    return {SchemaId::RequirementCandidates, n, std::nullopt};
}

StructuredSchema StructuredSchema::element_candidates(ElementType type, std::size_t n) {
    return {SchemaId::ElementCandidates, n, type};
}

StructuredSchema StructuredSchema::enhanced_line() { return {SchemaId::EnhancedLine, 0, std::nullopt}; }

StructuredSchema StructuredSchema::integrated_paragraph() {
    return {SchemaId::IntegratedParagraph, 0, std::nullopt};
}

namespace {

[[noreturn]] void violation(const StructuredSchema& schema, const std::string& what) {
    throw Error(Errc::schema_violation, std::string(to_string(schema.id)) + ": " + what,
                {{"schema", to_string(schema.id)}, {"problem", what}});
}

void check_candidates(const StructuredSchema& schema, const json& list) {
    if (!list.is_array()) violation(schema, "candidates must be an array");
    if (list.size() != schema.expected_count) {
        violation(schema, "expected " + std::to_string(schema.expected_count) + " candidates, got " +
                              std::to_string(list.size()));
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& c = list[i];
        const std::string at = "candidates[" + std::to_string(i) + "]";
        if (!c.is_object()) violation(schema, at + " must be an object");
        for (const char* k : {"value", "reasoning"}) {
            if (!c.contains(k) || !c[k].is_string()) violation(schema, at + "." + k + " must be a string");
        }
        if (trim(c["value"].get<std::string>()).empty()) violation(schema, at + ".value is empty");
        if (!c.contains("influencing_fields") || !c["influencing_fields"].is_array()) {
            violation(schema, at + ".influencing_fields must be an array");
        }
        for (const auto& f : c["influencing_fields"]) {
            if (!f.is_string() || !requirement_field_from_key(f.get<std::string>())) {
                violation(schema, at + ".influencing_fields holds an unknown field");
            }
        }
    }
}

json candidate_schema() {
    return {{"type", "object"},
            {"additionalProperties", false},
            {"required", {"value", "reasoning", "influencing_fields"}},
            {"properties",
             {{"value", {{"type", "string"}}},
              {"reasoning", {{"type", "string"}}},
              {"influencing_fields", {{"type", "array"}, {"items", {{"type", "string"}}}}}}}};
}

}  // namespace

void validate_payload(const StructuredSchema& schema, const json& payload) {
    if (!payload.is_object()) violation(schema, "payload must be an object");
    switch (schema.id) {
        case SchemaId::ExtractedRequirements:
            for (auto f : kRequirementFields) {
                const std::string k(key(f));
                if (!payload.contains(k)) violation(schema, "missing field " + k);
                if (!payload[k].is_array()) violation(schema, k + " must be an array");
                for (const auto& v : payload[k]) {
                    if (!v.is_string()) violation(schema, k + " must hold strings");
                }
            }
            for (const auto& [k, _] : payload.items()) {
                if (!requirement_field_from_key(k)) violation(schema, "unknown field " + k);
            }
            return;
        case SchemaId::RequirementCandidates:
            if (!payload.contains("candidates")) violation(schema, "missing candidates");
            check_candidates(schema, payload["candidates"]);
            return;
        case SchemaId::ElementCandidates: {
            if (!payload.contains("element_type") || !payload["element_type"].is_string()) {
                violation(schema, "element_type must be a string");
            }
            const auto& et = payload["element_type"].get_ref<const std::string&>();
            if (schema.element_type && et != label(*schema.element_type)) {
                violation(schema, "element_type must be \"" + std::string(label(*schema.element_type)) + "\"");
            }
            if (!payload.contains("candidates")) violation(schema, "missing candidates");
            check_candidates(schema, payload["candidates"]);
            return;
        }
        case SchemaId::EnhancedLine:
        case SchemaId::IntegratedParagraph: {
            if (!payload.contains("text") || !payload["text"].is_string()) {
                violation(schema, "text must be a string");
            }
            const auto& text = payload["text"].get_ref<const std::string&>();
            if (trim(text).empty()) violation(schema, "text is empty");
            if (schema.id == SchemaId::EnhancedLine && text.find_first_of("\r\n") != std::string::npos) {
                violation(schema, "text must be a single line");
            }
            return;
        }
    }
}

json json_schema(const StructuredSchema& schema) {
    switch (schema.id) {
        case SchemaId::ExtractedRequirements: {
            json props = json::object();
            json required = json::array();
            for (auto f : kRequirementFields) {
                props[std::string(key(f))] = {{"type", "array"}, {"items", {{"type", "string"}}}};
                required.push_back(key(f));
            }
            return {{"type", "object"},
                    {"additionalProperties", false},
                    {"required", required},
                    {"properties", props}};
        }
        case SchemaId::RequirementCandidates:
        case SchemaId::ElementCandidates: {
            json props = {{"candidates",
                           {{"type", "array"},
                            {"minItems", schema.expected_count},
                            {"maxItems", schema.expected_count},
                            {"items", candidate_schema()}}}};
            json required = {"candidates"};
            if (schema.id == SchemaId::ElementCandidates) {
                props["element_type"] = {{"type", "string"}};
                if (schema.element_type) props["element_type"]["enum"] = {label(*schema.element_type)};
                required.push_back("element_type");
            }
            return {{"type", "object"},
                    {"additionalProperties", false},
                    {"required", required},
                    {"properties", props}};
        }
        case SchemaId::EnhancedLine:
        case SchemaId::IntegratedParagraph:
            return {{"type", "object"},
                    {"additionalProperties", false},
                    {"required", {"text"}},
                    {"properties", {{"text", {{"type", "string"}}}}}};
    }
    return json::object();
}

void validate_config(const ProviderConfig& config) {
    if (config.timeout_ms <= 0) throw Error(Errc::invalid_argument, "timeout_ms must be positive");
    if (config.max_retries < 0) throw Error(Errc::invalid_argument, "max_retries must not be negative");
}

std::string prompt_digest(std::string_view text) { return sha256_hex(text).substr(0, 16); }

// ---------------------------------------------------------------------------
// Gateway

namespace {

constexpr std::string_view kCorrectiveSuffix =
    "\n\nYour previous response did not match the required structured output ({problem}). "
    "Respond again with output that matches the schema exactly.";

std::string corrective_suffix(const Error& e) {
    std::string s(kCorrectiveSuffix);
    const auto pos = s.find("{problem}");
    std::string problem = e.details().is_object() && e.details().contains("problem")
                              ? e.details()["problem"].get<std::string>()
                              : e.what();
    s.replace(pos, 9, problem);
    return s;
}

bool retryable(const Error& e) {
    return e.code() == Errc::transport_error || e.code() == Errc::timeout;
}

}  // namespace

ProviderGateway::ProviderGateway(ProviderSet providers, BlobStore& blobs, CallObserver observer,
                                 RetryPolicy retry)
    : providers_(std::move(providers)), blobs_(blobs), observer_(std::move(observer)), retry_(retry) {
    if (!providers_.chat || !providers_.image || !providers_.embedder) {
        throw Error(Errc::invalid_argument, "provider set is incomplete");
    }
    if (retry_.transport_attempts < 1) retry_.transport_attempts = 1;
}

void ProviderGateway::report(std::string_view kind, json detail,
                             std::chrono::steady_clock::time_point start) {
    if (!observer_) return;
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    observer_(CallRecord{std::string(kind), std::move(detail), elapsed});
}

template <class Fn>
auto ProviderGateway::with_transport_retry(Fn&& fn) {
    auto backoff = retry_.initial_backoff;
    for (int attempt = 1;; ++attempt) {
        try {
            return fn(attempt);
        } catch (const Error& e) {
            if (!retryable(e) || attempt >= retry_.transport_attempts) throw;
        }
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
    }
}

json ProviderGateway::complete_structured(const RenderedPrompt& prompt, const StructuredSchema& schema) {
    constexpr int kSchemaAttempts = 2;
    std::string suffix;
    for (int schema_attempt = 1;; ++schema_attempt) {
        auto call = [&](int transport_attempt) {
            const auto start = std::chrono::steady_clock::now();
            json detail = {{"template", to_string(prompt.kind)},
                           {"schema", to_string(schema.id)},
                           {"prompt_digest", prompt_digest(prompt.text + suffix)},
                           {"attempt", schema_attempt},
                           {"transport_attempt", transport_attempt}};
            json out;
            try {
                out = providers_.chat->complete(prompt, schema, suffix);
            } catch (const Error& e) {
                detail["outcome"] = code_name(e.code());
                report(event_kind::complete_structured, std::move(detail), start);
                throw;
            }
            try {
                validate_payload(schema, out);
            } catch (const Error& e) {
                detail["outcome"] = code_name(e.code());
                report(event_kind::complete_structured, std::move(detail), start);
                throw;
            }
            detail["outcome"] = "ok";
            report(event_kind::complete_structured, std::move(detail), start);
            return out;
        };
        try {
            return with_transport_retry(call);
        } catch (const Error& e) {
            if (e.code() != Errc::schema_violation || schema_attempt >= kSchemaAttempts) throw;
            suffix = corrective_suffix(e);
        }
    }
}

ImageRef ProviderGateway::generate_image(std::string_view prompt, ImageSize size, std::uint64_t nonce) {
    if (trim(prompt).empty()) throw Error(Errc::invalid_argument, "image prompt must not be empty");
    if (size.width <= 0 || size.height <= 0) {
        throw Error(Errc::invalid_argument, "image dimensions must be positive");
    }
    return with_transport_retry([&](int transport_attempt) {
        const auto start = std::chrono::steady_clock::now();
        json detail = {{"prompt_digest", prompt_digest(prompt)},
                       {"width", size.width},
                       {"height", size.height},
                       {"nonce", nonce},
                       {"transport_attempt", transport_attempt}};
        GeneratedImage img;
        try {
            img = providers_.image->generate(prompt, size, nonce);
        } catch (const Error& e) {
            detail["outcome"] = code_name(e.code());
            report(event_kind::generate_image, std::move(detail), start);
            throw;
        }
        const auto blob = blobs_.put_blob(img.bytes, img.media_type);
        detail["outcome"] = "ok";
        detail["content_hash"] = blob.content_hash;
        report(event_kind::generate_image, std::move(detail), start);
        return ImageRef{blob.content_hash, size.width, size.height, blob.media_type};
    });
}

EmbeddingVector ProviderGateway::embed_text(std::string_view text) {
    if (text.empty()) throw Error(Errc::invalid_argument, "text to embed must not be empty");
    return with_transport_retry([&](int transport_attempt) {
        const auto start = std::chrono::steady_clock::now();
        json detail = {{"prompt_digest", prompt_digest(text)}, {"transport_attempt", transport_attempt}};
        try {
            auto v = providers_.embedder->embed_text(text);
            detail["outcome"] = "ok";
            report(event_kind::embed_text, std::move(detail), start);
            return v;
        } catch (const Error& e) {
            detail["outcome"] = code_name(e.code());
            report(event_kind::embed_text, std::move(detail), start);
            throw;
        }
    });
}

EmbeddingVector ProviderGateway::embed_image(const ImageRef& ref) {
    const std::string bytes = blobs_.get_blob(ref.content_hash);
    if (bytes.empty()) throw Error(Errc::invalid_argument, "image to embed is empty");
    return with_transport_retry([&](int transport_attempt) {
        const auto start = std::chrono::steady_clock::now();
        json detail = {{"content_hash", ref.content_hash}, {"transport_attempt", transport_attempt}};
        try {
            auto v = providers_.embedder->embed_image(bytes);
            detail["outcome"] = "ok";
            report(event_kind::embed_image, std::move(detail), start);
            return v;
        } catch (const Error& e) {
            detail["outcome"] = code_name(e.code());
            report(event_kind::embed_image, std::move(detail), start);
            throw;
        }
    });
}

// ---------------------------------------------------------------------------
// Settings

std::optional<std::string> process_env(std::string_view name) {
    const char* v = std::getenv(std::string(name).c_str());
    if (!v) return std::nullopt;
    return std::string(v);
}

namespace {

void apply_config(ProviderConfig& c, const json& j) {
    if (!j.is_object()) return;
    c.endpoint = j.value("endpoint", c.endpoint);
    c.model = j.value("model", c.model);
    c.api_key = j.value("api_key", c.api_key);
    c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.temperature = j.value("temperature", c.temperature);
}

std::uint64_t parse_seed(const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw Error(Errc::invalid_argument, "B2D_SEED must be an unsigned integer");
    return v;
}

}  // namespace

ProviderSettings load_provider_settings(const std::optional<std::filesystem::path>& config_file,
                                        const EnvLookup& env) {
    ProviderSettings s;
    s.chat.model = "gpt-4o";
    s.image.model = "gpt-image-1";
    s.embedding.model = "text-embedding-3-small";
    if (config_file && std::filesystem::exists(*config_file)) {
        std::ifstream in(*config_file);
        json j = json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw Error(Errc::invalid_argument, "config file is not a JSON object: " + config_file->string());
        }
        s.provider = j.value("provider", s.provider);
        if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
        for (auto* c : {&s.chat, &s.image, &s.embedding}) apply_config(*c, j);
        if (j.contains("chat")) apply_config(s.chat, j["chat"]);
        if (j.contains("image")) apply_config(s.image, j["image"]);
        if (j.contains("embedding")) apply_config(s.embedding, j["embedding"]);
    }
    if (auto v = env("B2D_PROVIDER")) s.provider = *v;
    if (auto v = env("B2D_SEED")) s.seed = parse_seed(*v);
    if (auto v = env("B2D_HTTP_ENDPOINT")) {
        for (auto* c : {&s.chat, &s.image, &s.embedding}) c->endpoint = *v;
    }
    if (auto v = env("B2D_HTTP_API_KEY")) {
        for (auto* c : {&s.chat, &s.image, &s.embedding}) c->api_key = *v;
    }
    if (auto v = env("B2D_CHAT_MODEL")) s.chat.model = *v;
    if (auto v = env("B2D_IMAGE_MODEL")) s.image.model = *v;
    if (auto v = env("B2D_EMBEDDING_MODEL")) s.embedding.model = *v;
    if (s.provider != "mock" && s.provider != "http") {
        throw Error(Errc::invalid_argument, "provider must be \"mock\" or \"http\", got \"" + s.provider + "\"");
    }
    for (auto* c : {&s.chat, &s.image, &s.embedding}) validate_config(*c);
    return s;
}

ProviderSet make_providers(const ProviderSettings& settings) {
    if (settings.provider == "mock") return make_mock_providers(settings.seed).providers();
    if (settings.provider == "http") {
        for (const auto* c : {&settings.chat, &settings.image, &settings.embedding}) {
            if (c->endpoint.empty()) {
                throw Error(Errc::invalid_argument, "http provider needs an endpoint (B2D_HTTP_ENDPOINT)");
            }
        }
        return ProviderSet{std::make_shared<HttpChatProvider>(settings.chat),
                           std::make_shared<HttpImageProvider>(settings.image),
                           std::make_shared<HttpEmbedder>(settings.embedding)};
    }
    throw Error(Errc::invalid_argument, "unknown provider " + settings.provider);
}

}  // namespace designflow
