#pragma once

#include "designflow/analytics.hpp"
#include "designflow/domain.hpp"
#include "designflow/persistence.hpp"
#include "designflow/providers.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace designflow {

struct PipelineConfig {
    std::size_t element_candidates = 4;
    std::size_t requirement_candidates = 3;
    ImageSize preview_size{512, 512};
    std::string output_language = "en";
    std::string default_deliverable_format = "poster";
    RetryPolicy retry;
};

/// Final design size for an orientation (square when unset).
ImageSize final_image_size(std::optional<Orientation> orientation) noexcept;

struct SessionOptions {
    std::optional<SessionId> id;
    std::optional<std::string> output_language;
    DeliverableContext deliverable_context;
};

struct AutoRunOptions {
    std::size_t n = 1;
    std::uint64_t seed = 0;
    std::optional<SessionId> session_id;
    std::optional<std::string> output_language;
    std::optional<std::string> deliverable_format;
    std::optional<Orientation> orientation = Orientation::portrait;
};

struct MetricsSummary {
    SessionMetrics metrics;
    std::optional<DiversityReport> prompt_diversity;  // needs two designs
};

void to_json(nlohmann::json& j, const MetricsSummary& m);

/// Drives sessions through requirement structuring, element recommendation
/// and preview, and composition-first integration. Operations on one session
/// are serialized; every mutation is saved and logged before returning.
class Pipeline {
public:
    Pipeline(ProviderSet providers, Store& store, PipelineConfig config = {}, Clock clock = now_utc);

    const PipelineConfig& config() const noexcept { return config_; }
    Store& store() noexcept { return store_; }

    Session create_session(std::string_view brief_text, SessionOptions options = {});
    Session session(const SessionId& id);
    std::vector<EventRecord> events(const SessionId& id) const;
    void set_deliverable_context(const SessionId& id, DeliverableContext context);
    void close_session(const SessionId& id);

    // Requirements
    RequirementCardSet extract_requirements(const SessionId& id,
                                            std::optional<std::string> brief_text = std::nullopt);
    /// Candidates are not stored; ids are empty. Collisions with existing
    /// entries of the field are dropped, so fewer than n may come back.
    std::vector<RequirementEntry> recommend_requirements(const SessionId& id, RequirementField field,
                                                         std::size_t n);
    RequirementEntry add_entry(const SessionId& id, RequirementField field, std::string_view text,
                               EntryOrigin origin = EntryOrigin::manual);
    RequirementEntry edit_entry(const SessionId& id, const EntryId& entry, std::string_view text);
    void delete_entry(const SessionId& id, const EntryId& entry);

    // Elements
    std::vector<ElementCard> recommend_elements(const SessionId& id, ElementType type, std::size_t n);
    /// recommend_elements followed by enhance_and_preview of every new visual
    /// card. Cards that fail stay in the session; the first failure is rethrown
    /// after all cards were attempted.
    std::vector<ElementCard> recommend_and_preview(const SessionId& id, ElementType type, std::size_t n);
    ElementCard add_manual_element(const SessionId& id, ElementType type, std::string_view rough_prompt);
    ElementCard enhance_and_preview(const SessionId& id, const CardId& card);
    ElementCard edit_rough(const SessionId& id, const CardId& card, std::string_view rough_prompt);
    ElementCard regenerate_preview(const SessionId& id, const CardId& card);
    void delete_card(const SessionId& id, const CardId& card);

    // Selection
    /// Single-slot types replace the current holder; Text cards toggle
    /// membership in the text list.
    SelectionSet set_selected(const SessionId& id, const CardId& card, bool selected);
    /// Replaces the whole selection. Ids must exist and match their slots;
    /// completeness is only enforced at integration.
    SelectionSet set_selection(const SessionId& id, const SelectionSet& selection);
    /// Throws the validation error integration would raise, without side effects.
    ValidatedSelection check_selection(const SessionId& id);

    // Integration
    DesignArtifact integrate_and_generate(const SessionId& id);
    DesignArtifact regenerate_design(const SessionId& id);

    MetricsSummary metrics(const SessionId& id);

    /// Batch mode: extract, recommend n per type, preview every visual card,
    /// select the first card of each visual type and every Text card,
    /// integrate, close.
    Session run_auto(std::string_view brief_text, const AutoRunOptions& options = {});

private:
    struct Slot {
        std::mutex mutex;
        std::optional<Session> session;
    };

    template <class Fn>
    auto with_session(const SessionId& id, Fn&& fn);

    std::shared_ptr<Slot> slot(const SessionId& id);
    ProviderGateway gateway(const SessionId& id);
    void log(const SessionId& id, std::string_view kind, nlohmann::json detail,
             std::optional<std::int64_t> duration_ms = std::nullopt);
    void commit(const Session& session);

    void enhance_card(Session& session, ElementCard& card, ProviderGateway& gw);
    std::vector<ElementCard> recommend_locked(Session& session, ElementType type, std::size_t n);
    ElementCard enhance_locked(Session& session, const CardId& card);
    DesignArtifact integrate_locked(Session& session);

    ProviderSet providers_;
    Store& store_;
    PipelineConfig config_;
    Clock clock_;

    std::mutex slots_mutex_;
    std::map<SessionId, std::shared_ptr<Slot>> slots_;
};

}  // namespace designflow
