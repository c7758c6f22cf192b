#pragma once

#include "designflow/domain.hpp"
#include "designflow/embedding.hpp"
#include "designflow/persistence.hpp"
#include "designflow/prompts.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace designflow {

// ---------------------------------------------------------------------------
// Structured output schemas
//
//   ExtractedRequirements  {"<field key>": [string, ...], ...}  (all eight keys)
//   RequirementCandidates  {"candidates": [Candidate x expected_count]}
//   ElementCandidates      {"element_type": "<Label>", "candidates": [Candidate x expected_count]}
//   EnhancedLine           {"text": string}   single line
//   IntegratedParagraph    {"text": string}
//
//   Candidate = {"value": string, "reasoning": string, "influencing_fields": [field key, ...]}

enum class SchemaId {
    ExtractedRequirements,
    RequirementCandidates,
    ElementCandidates,
    EnhancedLine,
    IntegratedParagraph,
};

std::string_view to_string(SchemaId id) noexcept;

struct StructuredSchema {
    SchemaId id = SchemaId::EnhancedLine;
    std::size_t expected_count = 0;           // candidate schemas only
    std::optional<ElementType> element_type;  // ElementCandidates only

    static StructuredSchema extracted_requirements();
    static StructuredSchema requirement_candidates(std::size_t n);
    static StructuredSchema element_candidates(ElementType type, std::size_t n);
    static StructuredSchema enhanced_line();
    static StructuredSchema integrated_paragraph();
};

/// Throws Errc::schema_violation describing the first problem found.
void validate_payload(const StructuredSchema& schema, const nlohmann::json& payload);

/// JSON Schema document for providers that support constrained decoding.
nlohmann::json json_schema(const StructuredSchema& schema);

// ---------------------------------------------------------------------------
// Provider interfaces

struct ProviderConfig {
    std::string endpoint;
    std::string model;
    std::string api_key;
    std::int64_t timeout_ms = 120'000;
    int max_retries = 1;
    double temperature = 0.7;
};

/// Throws Errc::invalid_argument unless timeout_ms > 0 and max_retries >= 0.
void validate_config(const ProviderConfig& config);

struct ImageSize {
    int width = 0;
    int height = 0;

    friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

struct GeneratedImage {
    std::string bytes;
    std::string media_type;
    int width = 0;
    int height = 0;
};

class ChatProvider {
public:
    virtual ~ChatProvider() = default;

    /// One model call. `corrective_suffix` is non-empty on schema retries.
    /// May throw Errc::timeout or Errc::transport_error.
    virtual nlohmann::json complete(const RenderedPrompt& prompt, const StructuredSchema& schema,
                                    std::string_view corrective_suffix) = 0;
};

class ImageProvider {
public:
    virtual ~ImageProvider() = default;

    /// `nonce` selects a sample; equal inputs and nonce give equal output
    /// for deterministic providers.
    virtual GeneratedImage generate(std::string_view prompt, ImageSize size, std::uint64_t nonce) = 0;
};

class Embedder {
public:
    virtual ~Embedder() = default;

    virtual std::size_t dimension() const = 0;
    virtual EmbeddingVector embed_text(std::string_view text) = 0;
    virtual EmbeddingVector embed_image(std::string_view image_bytes) = 0;
};

struct ProviderSet {
    std::shared_ptr<ChatProvider> chat;
    std::shared_ptr<ImageProvider> image;
    std::shared_ptr<Embedder> embedder;
};

// ---------------------------------------------------------------------------
// Gateway

/// One provider call as reported to observers (one record per attempt).
struct CallRecord {
    std::string kind;  // event_kind::complete_structured, generate_image, ...
    nlohmann::json detail;
    std::chrono::milliseconds duration{0};
};

using CallObserver = std::function<void(const CallRecord&)>;

struct RetryPolicy {
    int transport_attempts = 2;
    std::chrono::milliseconds initial_backoff{20};
};

/// First 16 hex digits of the SHA-256 of a prompt.
std::string prompt_digest(std::string_view text);

/// Validating, retrying facade over a ProviderSet. Images are written to the
/// blob store; every provider attempt is reported to the observer.
class ProviderGateway {
public:
    ProviderGateway(ProviderSet providers, BlobStore& blobs, CallObserver observer = {},
                    RetryPolicy retry = {});

    /// Validates against `schema`; a violation is retried once with a
    /// corrective suffix, then surfaces as Errc::schema_violation.
    nlohmann::json complete_structured(const RenderedPrompt& prompt, const StructuredSchema& schema);

    ImageRef generate_image(std::string_view prompt, ImageSize size, std::uint64_t nonce = 0);

    EmbeddingVector embed_text(std::string_view text);
    EmbeddingVector embed_image(const ImageRef& ref);

private:
    template <class Fn>
    auto with_transport_retry(Fn&& fn);

    void report(std::string_view kind, nlohmann::json detail, std::chrono::steady_clock::time_point start);

    ProviderSet providers_;
    BlobStore& blobs_;
    CallObserver observer_;
    RetryPolicy retry_;
};

// ---------------------------------------------------------------------------
// Settings

struct ProviderSettings {
    std::string provider = "mock";  // "mock" | "http"
    std::uint64_t seed = 0;
    ProviderConfig chat;
    ProviderConfig image;
    ProviderConfig embedding;
};

using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;

std::optional<std::string> process_env(std::string_view name);

/// Reads the JSON config file (when given and present), then applies the
/// B2D_* environment overrides.
ProviderSettings load_provider_settings(const std::optional<std::filesystem::path>& config_file,
                                        const EnvLookup& env = process_env);

ProviderSet make_providers(const ProviderSettings& settings);

}  // namespace designflow
