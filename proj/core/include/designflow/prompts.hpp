#pragma once

#include "designflow/domain.hpp"

#include <array>
#include <chrono>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace designflow {

enum class PromptTemplateKind {
    RequirementExtractor,
    RequirementRecommender,
    ElementRecommender,
    EnhanceObject,
    EnhanceBackground,
    EnhanceTypography,
    EnhanceComposition,
    DesignIntegrator,
};

inline constexpr std::array<PromptTemplateKind, 8> kPromptTemplateKinds = {
    PromptTemplateKind::RequirementExtractor, PromptTemplateKind::RequirementRecommender,
    PromptTemplateKind::ElementRecommender,   PromptTemplateKind::EnhanceObject,
    PromptTemplateKind::EnhanceBackground,    PromptTemplateKind::EnhanceTypography,
    PromptTemplateKind::EnhanceComposition,   PromptTemplateKind::DesignIntegrator,
};

std::string_view to_string(PromptTemplateKind kind) noexcept;
std::optional<PromptTemplateKind> prompt_kind_from_string(std::string_view s) noexcept;

/// The enhancer for a visual element type; nullopt for Text.
std::optional<PromptTemplateKind> enhancer_for(ElementType type) noexcept;

struct RenderedPrompt {
    PromptTemplateKind kind = PromptTemplateKind::RequirementExtractor;
    std::string text;
    std::map<std::string, std::string> variables_used;
};

/// Raw template body, byte-identical to the golden file it was built from.
/// Enhancer bodies do not include the shared enhancer instructions.
std::string_view template_body(PromptTemplateKind kind);
std::string_view shared_enhancer_instructions();
std::string_view guideline_template(ElementType type);

/// Variable names a template declares (including the shared enhancer block).
std::vector<std::string> template_variables(PromptTemplateKind kind);

/// Single-pass "{name}" substitution. Every declared variable must be bound;
/// substituted values are inserted verbatim and never re-scanned.
std::string substitute(std::string_view body, std::span<const std::string> declared,
                       const std::map<std::string, std::string>& values);

/// Element guideline paragraph with {output_language} filled in.
std::string guideline_for(ElementType type, std::string_view output_language);

struct FieldDescription {
    RequirementField field;
    std::string label;
    std::string description;
};

/// Descriptions for all eight fields in canonical order.
std::vector<FieldDescription> canonical_field_descriptions();

/// "Label:\n- entry" blocks in canonical order; "(none)" for empty fields.
std::string serialize_requirements(const RequirementCardSet& cards);

/// The {selected_elements} block: Composition first, then Background, Text,
/// Typography and Object.
std::string serialize_selection(const ValidatedSelection& selection);

/// Prompt text used for a visual card: the enhanced prompt when present.
std::string_view effective_prompt(const ElementCard& card);

inline constexpr std::string_view kNoPriorRecommendations = "(no prior recommendations)";

RenderedPrompt render_requirement_extractor(std::string_view output_language,
                                            std::span<const FieldDescription> field_descriptions,
                                            std::string_view user_input);

RenderedPrompt render_requirement_recommender(int num_candidates, std::string_view output_language,
                                              const RequirementCardSet& known_requirements,
                                              RequirementField target_field,
                                              std::string_view field_description);

RenderedPrompt render_element_recommender(ElementType type, int num_candidates,
                                          std::string_view output_language,
                                          std::chrono::year_month_day current_date,
                                          const RequirementCardSet& requirements,
                                          std::span<const std::string> predetermined);

struct EnhancerContext {
    std::string output_language = "en";
    std::optional<std::string> deliverable_format;
    std::optional<Orientation> orientation;
};

RenderedPrompt render_enhancer(PromptTemplateKind kind, std::string_view rough_prompt,
                               const EnhancerContext& ctx);

RenderedPrompt render_integrator(const ValidatedSelection& selection,
                                 std::string_view output_language);

}  // namespace designflow
