#pragma once

#include "designflow/providers.hpp"

#include <mutex>

namespace designflow {

// Adapters for OpenAI-compatible HTTP APIs:
//   POST <endpoint>/v1/chat/completions    (json_schema response format)
//   POST <endpoint>/v1/images/generations  (b64_json)
//   POST <endpoint>/v1/embeddings

class HttpChatProvider final : public ChatProvider {
public:
    explicit HttpChatProvider(ProviderConfig config);

    nlohmann::json complete(const RenderedPrompt& prompt, const StructuredSchema& schema,
                            std::string_view corrective_suffix) override;

private:
    ProviderConfig config_;
};

class HttpImageProvider final : public ImageProvider {
public:
    explicit HttpImageProvider(ProviderConfig config);

    GeneratedImage generate(std::string_view prompt, ImageSize size, std::uint64_t nonce) override;

private:
    ProviderConfig config_;
};

/// Text embeddings only; embed_image throws Errc::invalid_argument.
class HttpEmbedder final : public Embedder {
public:
    explicit HttpEmbedder(ProviderConfig config);

    /// 0 until the first successful call.
    std::size_t dimension() const override;
    EmbeddingVector embed_text(std::string_view text) override;
    EmbeddingVector embed_image(std::string_view image_bytes) override;

private:
    ProviderConfig config_;
    mutable std::mutex mutex_;
    std::size_t dimension_ = 0;
};

/// POSTs a JSON body and returns the parsed JSON response. Connection
/// failures and non-2xx replies raise Errc::transport_error; timeouts raise
/// Errc::timeout.
nlohmann::json post_json(const ProviderConfig& config, std::string_view path, const nlohmann::json& body);

}  // namespace designflow
