#include "designflow/analytics.hpp"

#include "designflow/error.hpp"

#include <algorithm>

namespace designflow {

using nlohmann::json;

void to_json(json& j, const PairDistance& p) {
    j = {{"id_a", p.id_a}, {"id_b", p.id_b}, {"distance", p.distance}};
}

void to_json(json& j, const DiversityReport& r) {
    j = {{"item_count", r.item_count},
         {"pair_count", r.pair_count},
         {"mean_pairwise_distance", r.mean_pairwise_distance},
         {"per_pair", r.per_pair}};
}

double pairwise_distance(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.dims() != v.dims()) {
        throw Error(Errc::dimension_mismatch,
                    "cannot compare vectors of " + std::to_string(u.dims()) + " and " +
                        std::to_string(v.dims()) + " dimensions");
    }
    const auto a = u.values();
    const auto b = v.values();
    if (std::equal(a.begin(), a.end(), b.begin())) return 0.0;
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return std::clamp(1.0 - dot, 0.0, 2.0);
}

DiversityReport diversity(std::span<const EmbeddingVector> vectors, std::span<const std::string> ids) {
    if (vectors.size() < 2) {
        throw Error(Errc::too_few_items, "diversity needs at least two items",
                    {{"item_count", vectors.size()}});
    }
    if (!ids.empty() && ids.size() != vectors.size()) {
        throw Error(Errc::invalid_argument, "one id is needed per item");
    }
    auto id = [&](std::size_t i) { return ids.empty() ? std::to_string(i) : ids[i]; };
    DiversityReport r;
    r.item_count = vectors.size();
    r.per_pair.reserve(r.item_count * (r.item_count - 1) / 2);
    double sum = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j) {
            const double d = pairwise_distance(vectors[i], vectors[j]);
            sum += d;
            r.per_pair.push_back({id(i), id(j), d});
        }
    }
    r.pair_count = r.per_pair.size();
    r.mean_pairwise_distance = sum / static_cast<double>(r.pair_count);
    return r;
}

DiversityReport corpus_diversity_texts(std::span<const std::string> texts, Embedder& embedder,
                                       std::span<const std::string> ids) {
    if (texts.size() < 2) throw Error(Errc::too_few_items, "diversity needs at least two texts");
    std::vector<EmbeddingVector> vs;
    vs.reserve(texts.size());
    for (const auto& t : texts) vs.push_back(embedder.embed_text(t));
    return diversity(vs, ids);
}

DiversityReport corpus_diversity_images(std::span<const std::string> image_bytes, Embedder& embedder,
                                        std::span<const std::string> ids) {
    if (image_bytes.size() < 2) throw Error(Errc::too_few_items, "diversity needs at least two images");
    std::vector<EmbeddingVector> vs;
    vs.reserve(image_bytes.size());
    for (const auto& b : image_bytes) vs.push_back(embedder.embed_image(b));
    return diversity(vs, ids);
}

void to_json(json& j, const SessionMetrics& m) {
    j = {{"images_generated", m.images_generated},
         {"completion_time_s", m.completion_time_s ? json(*m.completion_time_s) : json(nullptr)},
         {"time_per_generation_s", m.time_per_generation_s ? json(*m.time_per_generation_s) : json(nullptr)}};
}

SessionMetrics session_metrics(const Session& session, std::span<const EventRecord> events) {
    SessionMetrics m;
    m.images_generated = session.history.size();
    std::optional<Timestamp> opened;
    std::optional<Timestamp> last;
    for (const auto& e : events) {
        if (e.kind == event_kind::session_opened && !opened) opened = e.timestamp;
        if (e.kind == event_kind::design_generated || e.kind == event_kind::session_closed) {
            if (!last || e.timestamp > *last) last = e.timestamp;
        }
    }
    if (opened && last && *last >= *opened) {
        m.completion_time_s = std::chrono::duration<double>(*last - *opened).count();
        if (m.images_generated > 0) {
            m.time_per_generation_s = *m.completion_time_s / static_cast<double>(m.images_generated);
        }
    }
    return m;
}

namespace {

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

}  // namespace

QuadrantThresholds median_thresholds(std::span<const DivergencePoint> points) {
    if (points.empty()) throw Error(Errc::too_few_items, "no divergence points to summarise");
    std::vector<double> p;
    std::vector<double> i;
    for (const auto& pt : points) {
        p.push_back(pt.prompt_distance);
        i.push_back(pt.image_distance);
    }
    return {median(std::move(p)), median(std::move(i))};
}

std::string classify_divergence(const DivergencePoint& point, const QuadrantThresholds& t) {
    const char* prompt = point.prompt_distance > t.prompt ? "high" : "low";
    const char* image = point.image_distance > t.image ? "high" : "low";
    return std::string(prompt) + " prompt / " + image + " image divergence";
}

json divergence_report(std::span<const DivergencePoint> points) {
    const auto t = median_thresholds(points);
    json list = json::array();
    for (const auto& p : points) {
        list.push_back({{"label", p.label},
                        {"prompt_distance", p.prompt_distance},
                        {"image_distance", p.image_distance},
                        {"quadrant", classify_divergence(p, t)}});
    }
    return {{"thresholds", {{"prompt", t.prompt}, {"image", t.image}}}, {"points", list}};
}

}  // namespace designflow
