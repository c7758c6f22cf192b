#pragma once

#include "designflow/domain.hpp"
#include "designflow/embedding.hpp"
#include "designflow/persistence.hpp"
#include "designflow/providers.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace designflow {

struct PairDistance {
    std::string id_a;
    std::string id_b;
    double distance = 0.0;
};

struct DiversityReport {
    std::size_t item_count = 0;
    std::size_t pair_count = 0;
    double mean_pairwise_distance = 0.0;
    std::vector<PairDistance> per_pair;
};

void to_json(nlohmann::json& j, const PairDistance& p);
void to_json(nlohmann::json& j, const DiversityReport& r);

/// 1 - cos(u, v), clamped to [0, 2]. Throws Errc::dimension_mismatch.
double pairwise_distance(const EmbeddingVector& u, const EmbeddingVector& v);

/// Mean distance over all unordered pairs, listed as (0,1), (0,2), ..., (1,2), ...
/// `ids` defaults to the item indices. Throws Errc::too_few_items below two.
DiversityReport diversity(std::span<const EmbeddingVector> vectors, std::span<const std::string> ids = {});

DiversityReport corpus_diversity_texts(std::span<const std::string> texts, Embedder& embedder,
                                       std::span<const std::string> ids = {});
DiversityReport corpus_diversity_images(std::span<const std::string> image_bytes, Embedder& embedder,
                                        std::span<const std::string> ids = {});

struct SessionMetrics {
    std::size_t images_generated = 0;
    std::optional<double> completion_time_s;
    std::optional<double> time_per_generation_s;
};

void to_json(nlohmann::json& j, const SessionMetrics& m);

/// Completion time runs from session_opened to the last design_generated or
/// session_closed event.
SessionMetrics session_metrics(const Session& session, std::span<const EventRecord> events);

// ---------------------------------------------------------------------------
// Prompt/image divergence quadrants

struct DivergencePoint {
    std::string label;
    double prompt_distance = 0.0;
    double image_distance = 0.0;
};

struct QuadrantThresholds {
    double prompt = 0.0;
    double image = 0.0;
};

/// Per-axis medians of the given points.
QuadrantThresholds median_thresholds(std::span<const DivergencePoint> points);

/// "high prompt / low image divergence" and so on; a distance counts as high
/// when strictly above its threshold.
std::string classify_divergence(const DivergencePoint& point, const QuadrantThresholds& thresholds);

/// {"thresholds": {...}, "points": [{label, prompt_distance, image_distance, quadrant}]}
nlohmann::json divergence_report(std::span<const DivergencePoint> points);

}  // namespace designflow
