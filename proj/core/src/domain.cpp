#include "designflow/domain.hpp"

#include "designflow/error.hpp"
#include "designflow/text.hpp"

#include <algorithm>
#include <set>

namespace designflow {

namespace {

struct FieldInfo {
    RequirementField field;
    std::string_view label;
    std::string_view key;
    std::string_view description;
};

constexpr std::array<FieldInfo, 8> kFieldInfo = {{
    {RequirementField::DeliverableFormat, "Deliverable Format", "deliverable_format",
     "Medium, format, size, and orientation of the deliverable"},
    {RequirementField::BusinessContext, "Business Context", "business_context",
     "Client, brand, product or event, and the business goal behind the design"},
    {RequirementField::TargetAudience, "Target Audience", "target_audience",
     "Who the design is meant to reach and what they care about"},
    {RequirementField::CreativeDirection, "Creative Direction", "creative_direction",
     "Overall concept and visual direction of the design"},
    {RequirementField::ToneAndManner, "Tone and Manner", "tone_and_manner",
     "Mood, atmosphere, and emotional tone the design should convey"},
    {RequirementField::KeywordsAndMotifs, "Keywords and Motifs", "keywords_and_motifs",
     "Key phrases, copy, symbols, and motifs to feature"},
    {RequirementField::DesignSpecifications, "Design Specifications", "design_specifications",
     "Concrete requirements such as colors, copy, dates, and mandatory elements"},
    {RequirementField::Restrictions, "Restrictions", "restrictions",
     "Things to avoid and constraints that must be respected"},
}};

const FieldInfo& info(RequirementField field) {
    return kFieldInfo[static_cast<std::size_t>(field)];
}

struct TypeInfo {
    ElementType type;
    std::string_view label;
    std::string_view key;
};

constexpr std::array<TypeInfo, 5> kTypeInfo = {{
    {ElementType::Object, "Object", "object"},
    {ElementType::Background, "Background", "background"},
    {ElementType::Text, "Text", "text"},
    {ElementType::Typography, "Typography", "typography"},
    {ElementType::Composition, "Composition", "composition"},
}};

const std::vector<RequirementEntry> kNoEntries;

}  // namespace

std::string_view label(RequirementField field) noexcept { return info(field).label; }
std::string_view key(RequirementField field) noexcept { return info(field).key; }
std::string_view description(RequirementField field) noexcept { return info(field).description; }

std::optional<RequirementField> requirement_field_from_key(std::string_view k) noexcept {
    for (const auto& fi : kFieldInfo) {
        if (fi.key == k) return fi.field;
    }
    return std::nullopt;
}

std::string_view to_string(EntryOrigin origin) noexcept {
    switch (origin) {
        case EntryOrigin::extracted: return "extracted";
        case EntryOrigin::recommended: return "recommended";
        case EntryOrigin::manual: return "manual";
    }
    return "manual";
}

EntryOrigin entry_origin_from_string(std::string_view s) {
    if (s == "extracted") return EntryOrigin::extracted;
    if (s == "recommended") return EntryOrigin::recommended;
    if (s == "manual") return EntryOrigin::manual;
    throw Error(Errc::invalid_argument, "unknown entry origin: " + std::string(s));
}

// ---------------------------------------------------------------------------

const std::vector<RequirementEntry>& RequirementCardSet::entries(RequirementField field) const {
    auto it = by_field_.find(field);
    return it == by_field_.end() ? kNoEntries : it->second;
}

std::size_t RequirementCardSet::size() const noexcept {
    std::size_t n = 0;
    for (const auto& [field, list] : by_field_) n += list.size();
    return n;
}

bool RequirementCardSet::contains_key(RequirementField field, std::string_view text,
                                      const EntryId* except) const {
    const std::string k = dedup_key(text);
    for (const auto& e : entries(field)) {
        if (except && e.id == *except) continue;
        if (dedup_key(e.text) == k) return true;
    }
    return false;
}

const RequirementEntry* RequirementCardSet::find(const EntryId& id) const {
    for (const auto& [field, list] : by_field_) {
        for (const auto& e : list) {
            if (e.id == id) return &e;
        }
    }
    return nullptr;
}

const RequirementEntry& RequirementCardSet::add(RequirementEntry entry) {
    entry.text = normalize_entry_text(entry.text);
    if (find(entry.id)) {
        throw Error(Errc::invalid_argument, "entry id already in use: " + entry.id.str());
    }
    if (contains_key(entry.field, entry.text)) {
        throw Error(Errc::duplicate_entry,
                    "\"" + entry.text + "\" already exists in " + std::string(label(entry.field)),
                    {{"field", key(entry.field)}, {"text", entry.text}});
    }
    auto& list = by_field_[entry.field];
    list.push_back(std::move(entry));
    return list.back();
}

const RequirementEntry& RequirementCardSet::edit(const EntryId& id, std::string_view new_text) {
    for (auto& [field, list] : by_field_) {
        for (auto& e : list) {
            if (e.id != id) continue;
            std::string text = normalize_entry_text(new_text);
            if (contains_key(field, text, &id)) {
                throw Error(Errc::duplicate_entry,
                            "\"" + text + "\" already exists in " + std::string(label(field)),
                            {{"field", key(field)}, {"text", text}});
            }
            e.text = std::move(text);
            return e;
        }
    }
    throw Error(Errc::unknown_entry, "unknown requirement entry: " + id.str());
}

RequirementEntry RequirementCardSet::remove(const EntryId& id) {
    for (auto it = by_field_.begin(); it != by_field_.end(); ++it) {
        auto& list = it->second;
        auto pos = std::find_if(list.begin(), list.end(), [&](const auto& e) { return e.id == id; });
        if (pos == list.end()) continue;
        RequirementEntry removed = std::move(*pos);
        list.erase(pos);
        if (list.empty()) by_field_.erase(it);
        return removed;
    }
    throw Error(Errc::unknown_entry, "unknown requirement entry: " + id.str());
}

// ---------------------------------------------------------------------------

std::string_view label(ElementType type) noexcept {
    return kTypeInfo[static_cast<std::size_t>(type)].label;
}

std::string_view key(ElementType type) noexcept {
    return kTypeInfo[static_cast<std::size_t>(type)].key;
}

std::optional<ElementType> element_type_from_key(std::string_view k) noexcept {
    for (const auto& ti : kTypeInfo) {
        if (ti.key == k) return ti.type;
    }
    return std::nullopt;
}

std::optional<ElementType> element_type_from_label(std::string_view l) noexcept {
    for (const auto& ti : kTypeInfo) {
        if (ti.label == l) return ti.type;
    }
    return std::nullopt;
}

std::string_view to_string(CardStatus status) noexcept {
    switch (status) {
        case CardStatus::drafted: return "drafted";
        case CardStatus::enhanced: return "enhanced";
        case CardStatus::previewed: return "previewed";
        case CardStatus::failed: return "failed";
    }
    return "drafted";
}

CardStatus card_status_from_string(std::string_view s) {
    if (s == "drafted") return CardStatus::drafted;
    if (s == "enhanced") return CardStatus::enhanced;
    if (s == "previewed") return CardStatus::previewed;
    if (s == "failed") return CardStatus::failed;
    throw Error(Errc::invalid_argument, "unknown card status: " + std::string(s));
}

std::optional<std::string> card_invariant_violation(const ElementCard& card) {
    if (trim(card.rough_prompt).empty()) return "rough_prompt is empty";
    if (card.type == ElementType::Text) {
        if (card.enhanced_prompt) return "Text card carries an enhanced prompt";
        if (card.preview_ref) return "Text card carries a preview image";
        try {
            parse_text_entry(card.rough_prompt);
        } catch (const Error& e) {
            return std::string("Text rough prompt is not \"Role: content\": ") + e.what();
        }
    } else if (card.status == CardStatus::previewed && (!card.enhanced_prompt || !card.preview_ref)) {
        return "previewed card lacks enhanced prompt or preview";
    }
    if (card.enhanced_prompt &&
        card.enhanced_prompt->find_first_of("\r\n") != std::string::npos) {
        return "enhanced prompt contains a newline";
    }
    return std::nullopt;
}

void validate_rough_prompt(ElementType type, std::string_view rough) {
    if (trim(rough).empty()) {
        throw Error(Errc::invalid_text_format, "rough prompt must not be empty");
    }
    if (type == ElementType::Text) {
        try {
            parse_text_entry(trim(rough));
        } catch (const Error& e) {
            throw Error(Errc::invalid_text_format,
                        std::string("Text elements use the \"Role: content\" format: ") + e.what(),
                        {{"cause", code_name(e.code())}});
        }
    }
}

// ---------------------------------------------------------------------------

std::string_view to_string(Orientation o) noexcept {
    switch (o) {
        case Orientation::portrait: return "portrait";
        case Orientation::landscape: return "landscape";
        case Orientation::square: return "square";
    }
    return "portrait";
}

std::optional<Orientation> orientation_from_string(std::string_view s) noexcept {
    if (s == "portrait") return Orientation::portrait;
    if (s == "landscape") return Orientation::landscape;
    if (s == "square") return Orientation::square;
    return std::nullopt;
}

const ElementCard* Session::find_card(const CardId& id) const {
    for (const auto& [type, cards] : element_cards) {
        for (const auto& c : cards) {
            if (c.id == id) return &c;
        }
    }
    return nullptr;
}

ElementCard* Session::find_card(const CardId& id) {
    return const_cast<ElementCard*>(std::as_const(*this).find_card(id));
}

const IntegratedPrompt* Session::find_prompt(const PromptId& id) const {
    for (const auto& p : integrated_prompts) {
        if (p.id == id) return &p;
    }
    return nullptr;
}

std::size_t Session::card_count() const noexcept {
    std::size_t n = 0;
    for (const auto& [type, cards] : element_cards) n += cards.size();
    return n;
}

namespace {

bool same_cards(const std::map<ElementType, std::vector<ElementCard>>& a,
                const std::map<ElementType, std::vector<ElementCard>>& b) {
    static const std::vector<ElementCard> none;
    for (auto type : kElementTypes) {
        const auto ia = a.find(type);
        const auto ib = b.find(type);
        if ((ia == a.end() ? none : ia->second) != (ib == b.end() ? none : ib->second)) return false;
    }
    return true;
}

}  // namespace

bool operator==(const Session& a, const Session& b) {
    return a.id == b.id && a.brief_text == b.brief_text && a.output_language == b.output_language &&
           a.deliverable_context == b.deliverable_context && a.requirement_cards == b.requirement_cards &&
           same_cards(a.element_cards, b.element_cards) && a.selection == b.selection &&
           a.integrated_prompts == b.integrated_prompts && a.history == b.history && a.created_at == b.created_at &&
           a.next_serial == b.next_serial;
}

std::string Session::next_id(std::string_view prefix) {
    return std::string(prefix) + "-" + std::to_string(next_serial++);
}

// ---------------------------------------------------------------------------

namespace {

const ElementCard& bind_slot(const Session& session, const CardId& id, ElementType expected) {
    const ElementCard* card = session.find_card(id);
    if (!card) {
        throw Error(Errc::unknown_card, "unknown element card: " + id.str(), {{"card_id", id.str()}});
    }
    if (card->type != expected) {
        throw Error(Errc::type_mismatch,
                    "card " + id.str() + " is a " + std::string(label(card->type)) + " card, expected " +
                        std::string(label(expected)),
                    {{"card_id", id.str()},
                     {"expected", label(expected)},
                     {"actual", label(card->type)}});
    }
    if (!card->selected) {
        throw Error(Errc::not_selected, "card " + id.str() + " is not marked selected",
                    {{"card_id", id.str()}});
    }
    return *card;
}

}  // namespace

ValidatedSelection validate_selection(const Session& session, const SelectionSet& sel) {
    if (!sel.composition_id) {
        throw Error(Errc::missing_composition, "a Composition element must be selected");
    }

    std::set<CardId> seen;
    auto note = [&](const CardId& id) {
        if (!seen.insert(id).second) {
            throw Error(Errc::duplicate_selection, "card selected twice: " + id.str(),
                        {{"card_id", id.str()}});
        }
    };

    ValidatedSelection out;
    out.ids = sel;
    note(*sel.composition_id);
    out.composition = bind_slot(session, *sel.composition_id, ElementType::Composition);
    if (sel.object_id) {
        note(*sel.object_id);
        out.object = bind_slot(session, *sel.object_id, ElementType::Object);
    }
    if (sel.background_id) {
        note(*sel.background_id);
        out.background = bind_slot(session, *sel.background_id, ElementType::Background);
    }
    if (sel.typography_id) {
        note(*sel.typography_id);
        out.typography = bind_slot(session, *sel.typography_id, ElementType::Typography);
    }
    for (const auto& id : sel.text_ids) {
        note(id);
        out.texts.push_back(bind_slot(session, id, ElementType::Text));
    }
    if (out.texts.empty()) {
        throw Error(Errc::no_text, "at least one Text element must be selected");
    }
    return out;
}

}  // namespace designflow
