#include "designflow/domain_json.hpp"

#include "designflow/error.hpp"

namespace designflow {

using nlohmann::json;

namespace {

template <class T>
void put_optional(json& j, const char* name, const std::optional<T>& value) {
    j[name] = value ? json(*value) : json(nullptr);
}

template <class T>
std::optional<T> get_optional(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

RequirementField field_from(const json& j) {
    const auto k = j.get<std::string>();
    if (auto f = requirement_field_from_key(k)) return *f;
    throw Error(Errc::invalid_argument, "unknown requirement field: " + k);
}

ElementType type_from(const json& j) {
    const auto k = j.get<std::string>();
    if (auto t = element_type_from_key(k)) return *t;
    throw Error(Errc::invalid_argument, "unknown element type: " + k);
}

}  // namespace

void to_json(json& j, const RequirementEntry& e) {
    j = json{{"id", e.id},
             {"field", key(e.field)},
             {"text", e.text},
             {"origin", to_string(e.origin)},
             {"created_at", format_iso8601(e.created_at)}};
}

void from_json(const json& j, RequirementEntry& e) {
    e.id = j.at("id").get<EntryId>();
    e.field = field_from(j.at("field"));
    e.text = j.at("text").get<std::string>();
    e.origin = entry_origin_from_string(j.at("origin").get<std::string>());
    e.created_at = parse_iso8601(j.at("created_at").get<std::string>());
}

void to_json(json& j, const RequirementCardSet& set) {
    j = json::object();
    for (auto field : kRequirementFields) {
        j[std::string(key(field))] = set.entries(field);
    }
}

void from_json(const json& j, RequirementCardSet& set) {
    set = RequirementCardSet{};
    for (auto field : kRequirementFields) {
        auto it = j.find(std::string(key(field)));
        if (it == j.end()) continue;
        for (const auto& ej : *it) {
            auto entry = ej.get<RequirementEntry>();
            if (entry.field != field) {
                throw Error(Errc::corrupt_record, "entry " + entry.id.str() + " filed under wrong field");
            }
            set.add(std::move(entry));
        }
    }
}

void to_json(json& j, const ImageRef& ref) {
    j = json{{"content_hash", ref.content_hash},
             {"width", ref.width},
             {"height", ref.height},
             {"media_type", ref.media_type}};
}

void from_json(const json& j, ImageRef& ref) {
    ref.content_hash = j.at("content_hash").get<std::string>();
    ref.width = j.at("width").get<int>();
    ref.height = j.at("height").get<int>();
    ref.media_type = j.at("media_type").get<std::string>();
}

void to_json(json& j, const ElementCard& card) {
    json fields = json::array();
    for (auto f : card.influencing_fields) fields.push_back(key(f));
    j = json{{"id", card.id},
             {"type", key(card.type)},
             {"rough_prompt", card.rough_prompt},
             {"influencing_fields", std::move(fields)},
             {"status", to_string(card.status)},
             {"revision", card.revision},
             {"selected", card.selected}};
    put_optional(j, "reasoning", card.reasoning);
    put_optional(j, "enhanced_prompt", card.enhanced_prompt);
    put_optional(j, "preview_ref", card.preview_ref);
    put_optional(j, "parent_id", card.parent_id);
    put_optional(j, "error", card.error);
}

void from_json(const json& j, ElementCard& card) {
    card.id = j.at("id").get<CardId>();
    card.type = type_from(j.at("type"));
    card.rough_prompt = j.at("rough_prompt").get<std::string>();
    card.influencing_fields.clear();
    for (const auto& f : j.at("influencing_fields")) card.influencing_fields.push_back(field_from(f));
    card.status = card_status_from_string(j.at("status").get<std::string>());
    card.revision = j.at("revision").get<std::uint32_t>();
    card.selected = j.at("selected").get<bool>();
    card.reasoning = get_optional<std::string>(j, "reasoning");
    card.enhanced_prompt = get_optional<std::string>(j, "enhanced_prompt");
    card.preview_ref = get_optional<ImageRef>(j, "preview_ref");
    card.parent_id = get_optional<std::string>(j, "parent_id");
    card.error = get_optional<std::string>(j, "error");
}

void to_json(json& j, const SelectionSet& sel) {
    j = json{{"text_ids", sel.text_ids}};
    put_optional(j, "composition_id", sel.composition_id);
    put_optional(j, "object_id", sel.object_id);
    put_optional(j, "background_id", sel.background_id);
    put_optional(j, "typography_id", sel.typography_id);
}

void from_json(const json& j, SelectionSet& sel) {
    sel.composition_id = get_optional<CardId>(j, "composition_id");
    sel.object_id = get_optional<CardId>(j, "object_id");
    sel.background_id = get_optional<CardId>(j, "background_id");
    sel.typography_id = get_optional<CardId>(j, "typography_id");
    sel.text_ids = j.value("text_ids", std::vector<CardId>{});
}

void to_json(json& j, const ValidatedSelection& sel) {
    j = json{{"selection", sel.ids}, {"composition", sel.composition}, {"texts", sel.texts}};
    put_optional(j, "object", sel.object);
    put_optional(j, "background", sel.background);
    put_optional(j, "typography", sel.typography);
}

void to_json(json& j, const SelectedElementSnapshot& s) {
    j = json{{"card_id", s.card_id},
             {"type", key(s.type)},
             {"revision", s.revision},
             {"rough_prompt", s.rough_prompt}};
    put_optional(j, "enhanced_prompt", s.enhanced_prompt);
}

void from_json(const json& j, SelectedElementSnapshot& s) {
    s.card_id = j.at("card_id").get<CardId>();
    s.type = type_from(j.at("type"));
    s.revision = j.at("revision").get<std::uint32_t>();
    s.rough_prompt = j.at("rough_prompt").get<std::string>();
    s.enhanced_prompt = get_optional<std::string>(j, "enhanced_prompt");
}

void to_json(json& j, const SelectionSnapshot& s) {
    j = json{{"selection", s.selection}, {"elements", s.elements}};
}

void from_json(const json& j, SelectionSnapshot& s) {
    s.selection = j.at("selection").get<SelectionSet>();
    s.elements = j.at("elements").get<std::vector<SelectedElementSnapshot>>();
}

void to_json(json& j, const IntegratedPrompt& p) {
    j = json{{"id", p.id},
             {"text", p.text},
             {"selection_snapshot", p.selection_snapshot},
             {"created_at", format_iso8601(p.created_at)}};
}

void from_json(const json& j, IntegratedPrompt& p) {
    p.id = j.at("id").get<PromptId>();
    p.text = j.at("text").get<std::string>();
    p.selection_snapshot = j.at("selection_snapshot").get<SelectionSnapshot>();
    p.created_at = parse_iso8601(j.at("created_at").get<std::string>());
}

void to_json(json& j, const DesignArtifact& a) {
    j = json{{"id", a.id},
             {"image_ref", a.image_ref},
             {"integrated_prompt_id", a.integrated_prompt_id},
             {"duration_ms", a.duration_ms},
             {"created_at", format_iso8601(a.created_at)}};
}

void from_json(const json& j, DesignArtifact& a) {
    a.id = j.at("id").get<ArtifactId>();
    a.image_ref = j.at("image_ref").get<ImageRef>();
    a.integrated_prompt_id = j.at("integrated_prompt_id").get<PromptId>();
    a.duration_ms = j.at("duration_ms").get<std::int64_t>();
    a.created_at = parse_iso8601(j.at("created_at").get<std::string>());
}

void to_json(json& j, const DeliverableContext& c) {
    j = json{{"deliverable_format", c.deliverable_format}};
    j["orientation"] = c.orientation ? json(to_string(*c.orientation)) : json(nullptr);
}

void from_json(const json& j, DeliverableContext& c) {
    c.deliverable_format = j.value("deliverable_format", std::string{});
    c.orientation.reset();
    if (auto o = get_optional<std::string>(j, "orientation")) {
        c.orientation = orientation_from_string(*o);
        if (!c.orientation) throw Error(Errc::invalid_argument, "unknown orientation: " + *o);
    }
}

void to_json(json& j, const Session& s) {
    json cards = json::object();
    for (auto type : kElementTypes) {
        auto it = s.element_cards.find(type);
        cards[std::string(key(type))] =
            it == s.element_cards.end() ? json::array() : json(it->second);
    }
    j = json{{"id", s.id},
             {"brief_text", s.brief_text},
             {"output_language", s.output_language},
             {"deliverable_context", s.deliverable_context},
             {"requirement_cards", s.requirement_cards},
             {"element_cards", std::move(cards)},
             {"integrated_prompts", s.integrated_prompts},
             {"history", s.history},
             {"created_at", format_iso8601(s.created_at)},
             {"next_serial", s.next_serial}};
    put_optional(j, "selection", s.selection);
}

void from_json(const json& j, Session& s) {
    s.id = j.at("id").get<SessionId>();
    s.brief_text = j.at("brief_text").get<std::string>();
    s.output_language = j.at("output_language").get<std::string>();
    s.deliverable_context = j.at("deliverable_context").get<DeliverableContext>();
    s.requirement_cards = j.at("requirement_cards").get<RequirementCardSet>();
    s.element_cards.clear();
    for (auto type : kElementTypes) {
        auto cards = j.at("element_cards").value(std::string(key(type)), std::vector<ElementCard>{});
        for (const auto& c : cards) {
            if (c.type != type) {
                throw Error(Errc::corrupt_record, "card " + c.id.str() + " filed under wrong type");
            }
        }
        s.element_cards[type] = std::move(cards);
    }
    s.selection = get_optional<SelectionSet>(j, "selection");
    s.integrated_prompts = j.at("integrated_prompts").get<std::vector<IntegratedPrompt>>();
    s.history = j.at("history").get<std::vector<DesignArtifact>>();
    s.created_at = parse_iso8601(j.at("created_at").get<std::string>());
    s.next_serial = j.at("next_serial").get<std::uint64_t>();
}

}  // namespace designflow
