#pragma once

#include "designflow/ids.hpp"
#include "designflow/timestamp.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace designflow {

// ---------------------------------------------------------------------------
// Requirement cards

enum class RequirementField {
    DeliverableFormat,
    BusinessContext,
    TargetAudience,
    CreativeDirection,
    ToneAndManner,
    KeywordsAndMotifs,
    DesignSpecifications,
    Restrictions,
};

/// Canonical order used everywhere fields are listed.
inline constexpr std::array<RequirementField, 8> kRequirementFields = {
    RequirementField::DeliverableFormat,   RequirementField::BusinessContext,
    RequirementField::TargetAudience,      RequirementField::CreativeDirection,
    RequirementField::ToneAndManner,       RequirementField::KeywordsAndMotifs,
    RequirementField::DesignSpecifications, RequirementField::Restrictions,
};

std::string_view label(RequirementField field) noexcept;        // "Target Audience"
std::string_view key(RequirementField field) noexcept;          // "target_audience"
std::string_view description(RequirementField field) noexcept;  // one line, used in prompts
std::optional<RequirementField> requirement_field_from_key(std::string_view key) noexcept;

enum class EntryOrigin { extracted, recommended, manual };

std::string_view to_string(EntryOrigin origin) noexcept;
EntryOrigin entry_origin_from_string(std::string_view s);

struct RequirementEntry {
    EntryId id;
    RequirementField field = RequirementField::DeliverableFormat;
    std::string text;
    EntryOrigin origin = EntryOrigin::manual;
    Timestamp created_at{};

    friend bool operator==(const RequirementEntry&, const RequirementEntry&) = default;
};

/// Eight fixed fields, each an ordered list of entries. No two entries in one
/// field share a dedup key.
class RequirementCardSet {
public:
    const std::vector<RequirementEntry>& entries(RequirementField field) const;
    std::size_t size() const noexcept;
    bool empty() const noexcept { return size() == 0; }

    /// True if `text` collides with an entry of `field` (ignoring `except`).
    bool contains_key(RequirementField field, std::string_view text,
                      const EntryId* except = nullptr) const;

    const RequirementEntry* find(const EntryId& id) const;

    /// Normalizes the entry text; throws Errc::duplicate_entry on collision.
    const RequirementEntry& add(RequirementEntry entry);
    const RequirementEntry& edit(const EntryId& id, std::string_view new_text);
    RequirementEntry remove(const EntryId& id);

    friend bool operator==(const RequirementCardSet&, const RequirementCardSet&) = default;

private:
    std::map<RequirementField, std::vector<RequirementEntry>> by_field_;
};

// ---------------------------------------------------------------------------
// Element cards

enum class ElementType { Object, Background, Text, Typography, Composition };

inline constexpr std::array<ElementType, 5> kElementTypes = {
    ElementType::Object, ElementType::Background, ElementType::Text, ElementType::Typography,
    ElementType::Composition,
};

std::string_view label(ElementType type) noexcept;  // "Object"
std::string_view key(ElementType type) noexcept;    // "object"
std::optional<ElementType> element_type_from_key(std::string_view key) noexcept;
std::optional<ElementType> element_type_from_label(std::string_view label) noexcept;

constexpr bool is_visual(ElementType type) noexcept { return type != ElementType::Text; }

enum class CardStatus { drafted, enhanced, previewed, failed };

std::string_view to_string(CardStatus status) noexcept;
CardStatus card_status_from_string(std::string_view s);

struct ImageRef {
    std::string content_hash;
    int width = 0;
    int height = 0;
    std::string media_type;

    friend bool operator==(const ImageRef&, const ImageRef&) = default;
};

struct ElementCard {
    CardId id;
    ElementType type = ElementType::Object;
    std::string rough_prompt;
    std::optional<std::string> reasoning;
    std::vector<RequirementField> influencing_fields;
    std::optional<std::string> enhanced_prompt;
    std::optional<ImageRef> preview_ref;
    CardStatus status = CardStatus::drafted;
    std::uint32_t revision = 0;
    std::optional<std::string> parent_id;
    bool selected = false;
    std::optional<std::string> error;

    friend bool operator==(const ElementCard&, const ElementCard&) = default;
};

/// Returns a description of the first violated card invariant, if any.
std::optional<std::string> card_invariant_violation(const ElementCard& card);

/// Throws Errc::invalid_text_format if `rough` is not a valid rough prompt
/// for `type` (Text requires "Role: content").
void validate_rough_prompt(ElementType type, std::string_view rough);

// ---------------------------------------------------------------------------
// Selection

/// The user's working selection. It may be incomplete while being edited;
/// validate_selection enforces the full invariant set.
struct SelectionSet {
    std::optional<CardId> composition_id;
    std::optional<CardId> object_id;
    std::optional<CardId> background_id;
    std::optional<CardId> typography_id;
    std::vector<CardId> text_ids;

    bool empty() const noexcept {
        return !composition_id && !object_id && !background_id && !typography_id &&
               text_ids.empty();
    }

    friend bool operator==(const SelectionSet&, const SelectionSet&) = default;
};

/// Selection with every id bound to a snapshot of its card.
struct ValidatedSelection {
    SelectionSet ids;
    ElementCard composition;
    std::optional<ElementCard> object;
    std::optional<ElementCard> background;
    std::optional<ElementCard> typography;
    std::vector<ElementCard> texts;
};

// ---------------------------------------------------------------------------
// Integration and history

struct SelectedElementSnapshot {
    CardId card_id;
    ElementType type = ElementType::Object;
    std::uint32_t revision = 0;
    std::string rough_prompt;
    std::optional<std::string> enhanced_prompt;

    friend bool operator==(const SelectedElementSnapshot&, const SelectedElementSnapshot&) = default;
};

struct SelectionSnapshot {
    SelectionSet selection;
    std::vector<SelectedElementSnapshot> elements;

    friend bool operator==(const SelectionSnapshot&, const SelectionSnapshot&) = default;
};

struct IntegratedPrompt {
    PromptId id;
    std::string text;
    SelectionSnapshot selection_snapshot;
    Timestamp created_at{};

    friend bool operator==(const IntegratedPrompt&, const IntegratedPrompt&) = default;
};

struct DesignArtifact {
    ArtifactId id;
    ImageRef image_ref;
    PromptId integrated_prompt_id;
    std::int64_t duration_ms = 0;
    Timestamp created_at{};

    friend bool operator==(const DesignArtifact&, const DesignArtifact&) = default;
};

// ---------------------------------------------------------------------------
// Session

enum class Orientation { portrait, landscape, square };

std::string_view to_string(Orientation o) noexcept;
std::optional<Orientation> orientation_from_string(std::string_view s) noexcept;

struct DeliverableContext {
    std::string deliverable_format;
    std::optional<Orientation> orientation = Orientation::portrait;

    friend bool operator==(const DeliverableContext&, const DeliverableContext&) = default;
};

struct Session {
    SessionId id;
    std::string brief_text;
    std::string output_language = "en";
    DeliverableContext deliverable_context;
    RequirementCardSet requirement_cards;
    std::map<ElementType, std::vector<ElementCard>> element_cards;
    std::optional<SelectionSet> selection;
    std::vector<IntegratedPrompt> integrated_prompts;
    std::vector<DesignArtifact> history;
    Timestamp created_at{};
    std::uint64_t next_serial = 1;

    const ElementCard* find_card(const CardId& id) const;
    ElementCard* find_card(const CardId& id);
    const IntegratedPrompt* find_prompt(const PromptId& id) const;
    std::size_t card_count() const noexcept;

    /// Allocates a session-unique id such as "el-7".
    std::string next_id(std::string_view prefix);

    /// Member-wise, except that an empty card list equals a missing one.
    friend bool operator==(const Session& a, const Session& b);
};

/// Binds and re-checks a selection against the session's cards.
/// Errors: missing_composition, unknown_card, type_mismatch, no_text,
/// duplicate_selection, not_selected.
ValidatedSelection validate_selection(const Session& session, const SelectionSet& selection);

}  // namespace designflow
