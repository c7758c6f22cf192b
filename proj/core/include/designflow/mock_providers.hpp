#pragma once

#include "designflow/providers.hpp"

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>

namespace designflow {

/// Failure switches for mock providers; safe to flip while calls are running.
struct MockFaults {
    std::atomic<bool> schema_violation{false};
    std::atomic<bool> transport_error{false};
    std::atomic<bool> timeout{false};
};

/// Deterministic chat model.
///
///   ExtractedRequirements  brief sentences dealt round-robin over the fields
///                          in canonical order, each cut to 12 words
///   RequirementCandidates  "mock-<field initials>-<i>", i = 1..n
///   ElementCandidates      "mock-<type>-<i>: <first 6 words of the requirements>"
///                          (Text: "<Role>: mock-text-<i> <words>"), numbering
///                          continues after the existing values in the prompt
///   EnhancedLine           "ENHANCED[<template>]: <rough prompt on one line>"
///   IntegratedParagraph    selection sections joined with " | "
class MockChatProvider final : public ChatProvider {
public:
    explicit MockChatProvider(std::uint64_t seed = 0) : seed_(seed) {}

    nlohmann::json complete(const RenderedPrompt& prompt, const StructuredSchema& schema,
                            std::string_view corrective_suffix) override;

    MockFaults& faults() noexcept { return faults_; }
    std::uint64_t calls() const noexcept { return calls_.load(); }

private:
    std::uint64_t seed_;
    MockFaults faults_;
    std::atomic<std::uint64_t> calls_{0};
};

/// PNG whose 8x8 grid of colour cells is derived from
/// SHA-256("mock-image|<seed>|<nonce>|<w>x<h>|<prompt>").
class MockImageProvider final : public ImageProvider {
public:
    explicit MockImageProvider(std::uint64_t seed = 0) : seed_(seed) {}

    GeneratedImage generate(std::string_view prompt, ImageSize size, std::uint64_t nonce) override;

    MockFaults& faults() noexcept { return faults_; }
    std::uint64_t calls() const noexcept { return calls_.load(); }

    /// The 32-byte digest that seeds the pixels of an image.
    static std::string pixel_seed(std::uint64_t seed, std::uint64_t nonce, ImageSize size,
                                  std::string_view prompt);
    /// RGB of grid cell `cell` (0..63, row-major) for a given pixel seed.
    static std::array<std::uint8_t, 3> cell_colour(std::string_view digest, int cell);

private:
    std::uint64_t seed_;
    MockFaults faults_;
    std::atomic<std::uint64_t> calls_{0};
};

/// Bag-of-tokens embedder: each whitespace token counts into bucket
/// fnv1a64(token) % 64. Images use a histogram of (byte >> 2).
class MockEmbedder final : public Embedder {
public:
    static constexpr std::size_t kDimension = 64;

    std::size_t dimension() const override { return kDimension; }
    EmbeddingVector embed_text(std::string_view text) override;
    EmbeddingVector embed_image(std::string_view image_bytes) override;

    MockFaults& faults() noexcept { return faults_; }

private:
    MockFaults faults_;
};

struct MockProviders {
    std::shared_ptr<MockChatProvider> chat;
    std::shared_ptr<MockImageProvider> image;
    std::shared_ptr<MockEmbedder> embedder;

    ProviderSet providers() const { return ProviderSet{chat, image, embedder}; }
};

MockProviders make_mock_providers(std::uint64_t seed = 0);

/// Truecolour PNG (8-bit RGB, no interlace) from packed rows.
std::string encode_png_rgb(int width, int height, std::string_view rgb);

}  // namespace designflow
