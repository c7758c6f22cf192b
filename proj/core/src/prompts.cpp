#include "designflow/prompts.hpp"

#include "designflow/error.hpp"
#include "designflow/text.hpp"
#include "embedded_templates.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace designflow {

namespace {

std::string_view embedded(std::string_view name) {
    for (const auto& t : detail::embedded_templates()) {
        if (t.name == name) return t.body;
    }
    throw Error(Errc::not_found, "missing embedded template: " + std::string(name));
}

std::string_view file_stem(PromptTemplateKind kind) {
    switch (kind) {
        case PromptTemplateKind::RequirementExtractor: return "requirement_extractor";
        case PromptTemplateKind::RequirementRecommender: return "requirement_recommender";
        case PromptTemplateKind::ElementRecommender: return "element_recommender";
        case PromptTemplateKind::EnhanceObject: return "enhance_object";
        case PromptTemplateKind::EnhanceBackground: return "enhance_background";
        case PromptTemplateKind::EnhanceTypography: return "enhance_typography";
        case PromptTemplateKind::EnhanceComposition: return "enhance_composition";
        case PromptTemplateKind::DesignIntegrator: return "design_integrator";
    }
    return "";
}

bool is_enhancer(PromptTemplateKind kind) {
    return kind == PromptTemplateKind::EnhanceObject || kind == PromptTemplateKind::EnhanceBackground ||
           kind == PromptTemplateKind::EnhanceTypography ||
           kind == PromptTemplateKind::EnhanceComposition;
}

std::string strip_final_newline(std::string_view s) {
    if (!s.empty() && s.back() == '\n') s.remove_suffix(1);
    return std::string(s);
}

std::string full_body(PromptTemplateKind kind) {
    std::string body(template_body(kind));
    if (is_enhancer(kind)) {
        body += '\n';
        body += shared_enhancer_instructions();
    }
    return body;
}

RenderedPrompt render(PromptTemplateKind kind, std::map<std::string, std::string> values) {
    const auto declared = template_variables(kind);
    RenderedPrompt out;
    out.kind = kind;
    out.text = substitute(full_body(kind), declared, values);
    out.variables_used = std::move(values);
    return out;
}

}  // namespace

std::string_view to_string(PromptTemplateKind kind) noexcept {
    switch (kind) {
        case PromptTemplateKind::RequirementExtractor: return "RequirementExtractor";
        case PromptTemplateKind::RequirementRecommender: return "RequirementRecommender";
        case PromptTemplateKind::ElementRecommender: return "ElementRecommender";
        case PromptTemplateKind::EnhanceObject: return "EnhanceObject";
        case PromptTemplateKind::EnhanceBackground: return "EnhanceBackground";
        case PromptTemplateKind::EnhanceTypography: return "EnhanceTypography";
        case PromptTemplateKind::EnhanceComposition: return "EnhanceComposition";
        case PromptTemplateKind::DesignIntegrator: return "DesignIntegrator";
    }
    return "";
}

std::optional<PromptTemplateKind> prompt_kind_from_string(std::string_view s) noexcept {
    for (auto kind : kPromptTemplateKinds) {
        if (to_string(kind) == s) return kind;
    }
    return std::nullopt;
}

std::optional<PromptTemplateKind> enhancer_for(ElementType type) noexcept {
    switch (type) {
        case ElementType::Object: return PromptTemplateKind::EnhanceObject;
        case ElementType::Background: return PromptTemplateKind::EnhanceBackground;
        case ElementType::Typography: return PromptTemplateKind::EnhanceTypography;
        case ElementType::Composition: return PromptTemplateKind::EnhanceComposition;
        case ElementType::Text: return std::nullopt;
    }
    return std::nullopt;
}

std::string_view template_body(PromptTemplateKind kind) { return embedded(file_stem(kind)); }

std::string_view shared_enhancer_instructions() { return embedded("enhance_shared"); }

std::string_view guideline_template(ElementType type) {
    return embedded("guideline_" + std::string(key(type)));
}

std::vector<std::string> template_variables(PromptTemplateKind kind) {
    switch (kind) {
        case PromptTemplateKind::RequirementExtractor:
            return {"output_language", "field_descriptions", "user_input"};
        case PromptTemplateKind::RequirementRecommender:
            return {"num_candidates", "output_language", "known_requirements", "target_field",
                    "field_description"};
        case PromptTemplateKind::ElementRecommender:
            return {"num_candidates",  "element_type",      "output_language",
                    "current_date",    "requirements_text", "predetermined_section",
                    "element_description"};
        case PromptTemplateKind::EnhanceObject:
        case PromptTemplateKind::EnhanceBackground:
        case PromptTemplateKind::EnhanceTypography:
            return {"output_language", "rough_prompt"};
        case PromptTemplateKind::EnhanceComposition:
            return {"deliverable_format", "orientation", "output_language", "rough_prompt"};
        case PromptTemplateKind::DesignIntegrator:
            return {"output_language", "selected_elements"};
    }
    return {};
}

std::string substitute(std::string_view body, std::span<const std::string> declared,
                       const std::map<std::string, std::string>& values) {
    for (const auto& name : declared) {
        if (!values.contains(name)) {
            throw Error(Errc::missing_variable, "no value bound for template variable {" + name + "}",
                        {{"variable", name}});
        }
    }
    std::string out;
    out.reserve(body.size() + 256);
    std::size_t pos = 0;
    while (pos < body.size()) {
        const auto open = body.find('{', pos);
        if (open == std::string_view::npos) break;
        const auto close = body.find('}', open + 1);
        if (close == std::string_view::npos) break;
        const std::string name(body.substr(open + 1, close - open - 1));
        if (std::find(declared.begin(), declared.end(), name) == declared.end()) {
            out.append(body.substr(pos, open + 1 - pos));
            pos = open + 1;
            continue;
        }
        out.append(body.substr(pos, open - pos));
        out.append(values.at(name));
        pos = close + 1;
    }
    out.append(body.substr(pos));
    return out;
}

std::string guideline_for(ElementType type, std::string_view output_language) {
    static const std::vector<std::string> kLanguageVar = {"output_language"};
    const std::string body = strip_final_newline(guideline_template(type));
    return substitute(body, kLanguageVar, {{"output_language", std::string(output_language)}});
}

std::vector<FieldDescription> canonical_field_descriptions() {
    std::vector<FieldDescription> out;
    for (auto f : kRequirementFields) {
        out.push_back({f, std::string(label(f)), std::string(description(f))});
    }
    return out;
}

std::string serialize_requirements(const RequirementCardSet& cards) {
    std::string out;
    for (auto field : kRequirementFields) {
        if (!out.empty()) out += "\n\n";
        out += label(field);
        out += ':';
        const auto& entries = cards.entries(field);
        if (entries.empty()) {
            out += "\n(none)";
            continue;
        }
        for (const auto& e : entries) {
            out += "\n- ";
            out += e.text;
        }
    }
    return out;
}

std::string_view effective_prompt(const ElementCard& card) {
    return card.enhanced_prompt ? std::string_view(*card.enhanced_prompt)
                                : std::string_view(card.rough_prompt);
}

std::string serialize_selection(const ValidatedSelection& sel) {
    std::string out;
    auto visual = [&](const ElementCard& card) {
        if (!out.empty()) out += '\n';
        out += label(card.type);
        out += ": ";
        out += collapse_newlines(effective_prompt(card));
    };
    visual(sel.composition);
    if (sel.background) visual(*sel.background);
    out += "\nText:";
    for (const auto& t : sel.texts) {
        out += "\n- ";
        out += format_text_entry(parse_text_entry(trim(t.rough_prompt)));
    }
    if (sel.typography) visual(*sel.typography);
    if (sel.object) visual(*sel.object);
    return out;
}

RenderedPrompt render_requirement_extractor(std::string_view output_language,
                                            std::span<const FieldDescription> field_descriptions,
                                            std::string_view user_input) {
    if (trim(user_input).empty()) {
        throw Error(Errc::empty_brief, "user input must not be empty");
    }
    std::set<RequirementField> covered;
    for (const auto& fd : field_descriptions) covered.insert(fd.field);
    if (covered.size() != kRequirementFields.size()) {
        std::vector<std::string> missing;
        for (auto f : kRequirementFields) {
            if (!covered.contains(f)) missing.emplace_back(key(f));
        }
        throw Error(Errc::missing_field, "field descriptions must cover all eight fields",
                    {{"missing", missing}});
    }
    std::string described;
    for (auto f : kRequirementFields) {
        auto it = std::find_if(field_descriptions.begin(), field_descriptions.end(),
                               [&](const auto& fd) { return fd.field == f; });
        described += "\n- ";
        described += key(f);
        described += " (" + it->label + "): " + it->description;
    }
    return render(PromptTemplateKind::RequirementExtractor,
                  {{"output_language", std::string(output_language)},
                   {"field_descriptions", described},
                   {"user_input", std::string(user_input)}});
}

RenderedPrompt render_requirement_recommender(int num_candidates, std::string_view output_language,
                                              const RequirementCardSet& known_requirements,
                                              RequirementField target_field,
                                              std::string_view field_description) {
    if (num_candidates < 1) {
        throw Error(Errc::invalid_argument, "num_candidates must be at least 1");
    }
    return render(PromptTemplateKind::RequirementRecommender,
                  {{"num_candidates", std::to_string(num_candidates)},
                   {"output_language", std::string(output_language)},
                   {"known_requirements", "\n" + serialize_requirements(known_requirements)},
                   {"target_field", std::string(label(target_field))},
                   {"field_description", std::string(field_description)}});
}

RenderedPrompt render_element_recommender(ElementType type, int num_candidates,
                                          std::string_view output_language,
                                          std::chrono::year_month_day current_date,
                                          const RequirementCardSet& requirements,
                                          std::span<const std::string> predetermined) {
    if (num_candidates < 1) {
        throw Error(Errc::invalid_argument, "num_candidates must be at least 1");
    }
    if (!current_date.ok()) {
        throw Error(Errc::invalid_argument, "current_date is not a valid calendar date");
    }
    std::string section = "\n\nExisting " + std::string(label(type)) + " values:";
    if (predetermined.empty()) {
        section += "\n";
        section += kNoPriorRecommendations;
    }
    for (const auto& p : predetermined) {
        section += "\n- " + collapse_newlines(p);
    }
    return render(PromptTemplateKind::ElementRecommender,
                  {{"num_candidates", std::to_string(num_candidates)},
                   {"element_type", std::string(label(type))},
                   {"output_language", std::string(output_language)},
                   {"current_date", format_iso_date(current_date)},
                   {"requirements_text", "\n" + serialize_requirements(requirements)},
                   {"predetermined_section", section},
                   {"element_description", guideline_for(type, output_language)}});
}

RenderedPrompt render_enhancer(PromptTemplateKind kind, std::string_view rough_prompt,
                               const EnhancerContext& ctx) {
    if (!is_enhancer(kind)) {
        throw Error(Errc::invalid_argument,
                    std::string(to_string(kind)) + " is not an enhancement template");
    }
    if (trim(rough_prompt).empty()) {
        throw Error(Errc::invalid_argument, "rough prompt must not be empty");
    }
    std::map<std::string, std::string> values{
        {"output_language", ctx.output_language},
        {"rough_prompt", collapse_newlines(trim(rough_prompt))},
    };
    if (kind == PromptTemplateKind::EnhanceComposition) {
        if (!ctx.deliverable_format || trim(*ctx.deliverable_format).empty()) {
            throw Error(Errc::missing_context, "Composition enhancement needs a deliverable format",
                        {{"missing", "deliverable_format"}});
        }
        if (!ctx.orientation) {
            throw Error(Errc::missing_context, "Composition enhancement needs an orientation",
                        {{"missing", "orientation"}});
        }
        values["deliverable_format"] = *ctx.deliverable_format;
        values["orientation"] = std::string(to_string(*ctx.orientation));
    }
    return render(kind, std::move(values));
}

RenderedPrompt render_integrator(const ValidatedSelection& selection,
                                 std::string_view output_language) {
    return render(PromptTemplateKind::DesignIntegrator,
                  {{"output_language", std::string(output_language)},
                   {"selected_elements", "\n" + serialize_selection(selection)}});
}

}  // namespace designflow
