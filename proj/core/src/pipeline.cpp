#include "designflow/pipeline.hpp"

#include "designflow/domain_json.hpp"
#include "designflow/error.hpp"
#include "designflow/hashing.hpp"
#include "designflow/prompts.hpp"
#include "designflow/text.hpp"

#include <algorithm>
#include <atomic>
#include <set>

namespace designflow {

using nlohmann::json;

ImageSize final_image_size(std::optional<Orientation> orientation) noexcept {
    if (!orientation) return {1024, 1024};
    switch (*orientation) {
        case Orientation::portrait: return {768, 1152};
        case Orientation::landscape: return {1152, 768};
        case Orientation::square: return {1024, 1024};
    }
    return {1024, 1024};
}

void to_json(json& j, const MetricsSummary& m) {
    j = m.metrics;
    j["prompt_diversity"] = m.prompt_diversity ? json(*m.prompt_diversity) : json(nullptr);
}

namespace {

// Event details avoid timestamps so logs of equivalent runs compare equal.
json entry_detail(const RequirementEntry& e) {
    return {{"id", e.id}, {"field", key(e.field)}, {"text", e.text}, {"origin", to_string(e.origin)}};
}

json selection_detail(const std::optional<SelectionSet>& sel) {
    if (!sel || sel->empty()) return nullptr;
    return *sel;
}

std::uint64_t preview_nonce(const ElementCard& card) {
    return fnv1a64(card.id.str() + "@" + std::to_string(card.revision));
}

std::optional<std::string> nonempty(const std::string& s) {
    if (trim(s).empty()) return std::nullopt;
    return s;
}

ElementCard& card_ref(Session& s, const CardId& id) {
    ElementCard* c = s.find_card(id);
    if (!c) throw Error(Errc::unknown_card, "unknown element card: " + id.str(), {{"card_id", id.str()}});
    return *c;
}

std::optional<CardId>* slot_for(SelectionSet& sel, ElementType type) {
    switch (type) {
        case ElementType::Composition: return &sel.composition_id;
        case ElementType::Object: return &sel.object_id;
        case ElementType::Background: return &sel.background_id;
        case ElementType::Typography: return &sel.typography_id;
        case ElementType::Text: return nullptr;
    }
    return nullptr;
}

void sync_selected_flags(Session& s) {
    std::set<CardId> chosen;
    if (s.selection) {
        for (const auto* slot : {&s.selection->composition_id, &s.selection->object_id,
                                 &s.selection->background_id, &s.selection->typography_id}) {
            if (*slot) chosen.insert(**slot);
        }
        chosen.insert(s.selection->text_ids.begin(), s.selection->text_ids.end());
        if (s.selection->empty()) s.selection.reset();
    }
    for (auto& [type, cards] : s.element_cards) {
        for (auto& c : cards) c.selected = chosen.contains(c.id);
    }
}

std::vector<RequirementField> parse_fields(const json& list) {
    std::vector<RequirementField> out;
    for (const auto& f : list) {
        if (auto field = requirement_field_from_key(f.get<std::string>())) {
            if (std::find(out.begin(), out.end(), *field) == out.end()) out.push_back(*field);
        }
    }
    return out;
}

SelectionSnapshot snapshot_of(const ValidatedSelection& v) {
    SelectionSnapshot snap;
    snap.selection = v.ids;
    auto add = [&](const ElementCard& c) {
        snap.elements.push_back({c.id, c.type, c.revision, c.rough_prompt, c.enhanced_prompt});
    };
    add(v.composition);
    if (v.background) add(*v.background);
    for (const auto& t : v.texts) add(t);
    if (v.typography) add(*v.typography);
    if (v.object) add(*v.object);
    return snap;
}

}  // namespace

Pipeline::Pipeline(ProviderSet providers, Store& store, PipelineConfig config, Clock clock)
    : providers_(std::move(providers)), store_(store), config_(std::move(config)), clock_(std::move(clock)) {
    if (!providers_.chat || !providers_.image || !providers_.embedder) {
        throw Error(Errc::invalid_argument, "provider set is incomplete");
    }
    if (config_.element_candidates < 1 || config_.requirement_candidates < 1) {
        throw Error(Errc::invalid_argument, "candidate counts must be at least 1");
    }
    if (config_.preview_size.width <= 0 || config_.preview_size.height <= 0) {
        throw Error(Errc::invalid_argument, "preview size must be positive");
    }
    if (!clock_) clock_ = now_utc;
}

std::shared_ptr<Pipeline::Slot> Pipeline::slot(const SessionId& id) {
    std::lock_guard lock(slots_mutex_);
    auto& s = slots_[id];
    if (!s) s = std::make_shared<Slot>();
    return s;
}

template <class Fn>
auto Pipeline::with_session(const SessionId& id, Fn&& fn) {
    auto s = slot(id);
    std::lock_guard lock(s->mutex);
    if (!s->session) s->session = store_.load_session(id);
    try {
        return fn(*s->session);
    } catch (...) {
        s->session.reset();  // drop uncommitted changes; next use reloads
        throw;
    }
}

void Pipeline::log(const SessionId& id, std::string_view kind, json detail,
                   std::optional<std::int64_t> duration_ms) {
    EventRecord e;
    e.timestamp = clock_();
    e.session_id = id;
    e.kind = std::string(kind);
    e.detail = std::move(detail);
    e.duration_ms = duration_ms;
    store_.append_event(std::move(e));
}

void Pipeline::commit(const Session& session) { store_.save_session(session); }

ProviderGateway Pipeline::gateway(const SessionId& id) {
    return ProviderGateway(
        providers_, store_,
        [this, id](const CallRecord& r) { log(id, r.kind, r.detail, r.duration.count()); }, config_.retry);
}

// ---------------------------------------------------------------------------
// Sessions

Session Pipeline::create_session(std::string_view brief_text, SessionOptions options) {
    static std::atomic<std::uint64_t> counter{0};
    Session s;
    if (options.id) {
        if (options.id->empty()) throw Error(Errc::invalid_argument, "session id must not be empty");
        if (store_.has_session(*options.id)) {
            throw Error(Errc::id_collision, "session already exists: " + options.id->str());
        }
        s.id = *options.id;
    } else {
        do {
            const std::string material = std::string(brief_text) + "|" +
                                         format_iso8601(clock_()) + "|" + std::to_string(counter++);
            s.id = SessionId("s-" + sha256_hex(material).substr(0, 12));
        } while (store_.has_session(s.id));
    }
    s.brief_text = std::string(brief_text);
    s.output_language = options.output_language.value_or(config_.output_language);
    if (trim(s.output_language).empty()) throw Error(Errc::invalid_argument, "output language must not be empty");
    s.deliverable_context = std::move(options.deliverable_context);
    s.created_at = clock_();

    auto sl = slot(s.id);
    std::lock_guard lock(sl->mutex);
    commit(s);
    sl->session = s;
    log(s.id, event_kind::session_opened,
        {{"brief_digest", sha256_hex(s.brief_text)},
         {"output_language", s.output_language},
         {"deliverable_context", s.deliverable_context}});
    return s;
}

Session Pipeline::session(const SessionId& id) {
    return with_session(id, [](Session& s) { return s; });
}

std::vector<EventRecord> Pipeline::events(const SessionId& id) const { return store_.read_events(id); }

void Pipeline::set_deliverable_context(const SessionId& id, DeliverableContext context) {
    with_session(id, [&](Session& s) {
        s.deliverable_context = std::move(context);
        commit(s);
        log(s.id, event_kind::deliverable_context_changed, {{"deliverable_context", s.deliverable_context}});
    });
}

void Pipeline::close_session(const SessionId& id) {
    with_session(id, [&](Session& s) { log(s.id, event_kind::session_closed, json::object()); });
}

// ---------------------------------------------------------------------------
// Requirements

RequirementCardSet Pipeline::extract_requirements(const SessionId& id, std::optional<std::string> brief_text) {
    return with_session(id, [&](Session& s) {
        const std::string brief = brief_text.value_or(s.brief_text);
        if (trim(brief).empty()) throw Error(Errc::empty_brief, "the design brief is empty");
        const auto descriptions = canonical_field_descriptions();
        const auto rendered = render_requirement_extractor(s.output_language, descriptions, brief);
        if (brief_text) s.brief_text = brief;
        log(s.id, event_kind::render_prompt,
            {{"template", to_string(rendered.kind)}, {"prompt_digest", prompt_digest(rendered.text)}});
        auto gw = gateway(s.id);
        const json payload = gw.complete_structured(rendered, StructuredSchema::extracted_requirements());

        json added = json::array();
        for (auto f : kRequirementFields) {
            for (const auto& v : payload.at(std::string(key(f)))) {
                const auto& text = v.get_ref<const std::string&>();
                if (trim(text).empty() || s.requirement_cards.contains_key(f, text)) continue;
                RequirementEntry e;
                e.id = EntryId(s.next_id("req"));
                e.field = f;
                e.text = text;
                e.origin = EntryOrigin::extracted;
                e.created_at = clock_();
                added.push_back(entry_detail(s.requirement_cards.add(std::move(e))));
            }
        }
        commit(s);
        log(s.id, event_kind::requirements_extracted, {{"entries", added}});
        return s.requirement_cards;
    });
}

std::vector<RequirementEntry> Pipeline::recommend_requirements(const SessionId& id, RequirementField field,
                                                               std::size_t n) {
    if (n < 1) throw Error(Errc::invalid_argument, "n must be at least 1");
    return with_session(id, [&](Session& s) {
        const auto rendered = render_requirement_recommender(static_cast<int>(n), s.output_language,
                                                             s.requirement_cards, field, description(field));
        log(s.id, event_kind::render_prompt,
            {{"template", to_string(rendered.kind)}, {"prompt_digest", prompt_digest(rendered.text)}});
        auto gw = gateway(s.id);
        const json payload = gw.complete_structured(rendered, StructuredSchema::requirement_candidates(n));

        std::vector<RequirementEntry> out;
        std::set<std::string> seen;
        json values = json::array();
        for (const auto& c : payload.at("candidates")) {
            const auto& value = c.at("value").get_ref<const std::string&>();
            if (trim(value).empty() || s.requirement_cards.contains_key(field, value)) continue;
            if (!seen.insert(dedup_key(value)).second) continue;
            RequirementEntry e;
            e.field = field;
            e.text = normalize_entry_text(value);
            e.origin = EntryOrigin::recommended;
            values.push_back(e.text);
            out.push_back(std::move(e));
        }
        log(s.id, event_kind::requirements_recommended, {{"field", key(field)}, {"values", values}});
        return out;
    });
}

RequirementEntry Pipeline::add_entry(const SessionId& id, RequirementField field, std::string_view text,
                                     EntryOrigin origin) {
    return with_session(id, [&](Session& s) {
        RequirementEntry e;
        e.field = field;
        e.text = normalize_entry_text(text);
        e.origin = origin;
        e.created_at = clock_();
        if (s.requirement_cards.contains_key(field, e.text)) {
            throw Error(Errc::duplicate_entry, "\"" + e.text + "\" is already listed under " +
                                                   std::string(label(field)),
                        {{"field", key(field)}});
        }
        e.id = EntryId(s.next_id("req"));
        RequirementEntry added = s.requirement_cards.add(std::move(e));
        commit(s);
        log(s.id, event_kind::requirement_added, {{"entry", entry_detail(added)}});
        return added;
    });
}

RequirementEntry Pipeline::edit_entry(const SessionId& id, const EntryId& entry, std::string_view text) {
    return with_session(id, [&](Session& s) {
        RequirementEntry edited = s.requirement_cards.edit(entry, text);
        commit(s);
        log(s.id, event_kind::requirement_edited, {{"entry", entry_detail(edited)}});
        return edited;
    });
}

void Pipeline::delete_entry(const SessionId& id, const EntryId& entry) {
    with_session(id, [&](Session& s) {
        const RequirementEntry removed = s.requirement_cards.remove(entry);
        commit(s);
        log(s.id, event_kind::requirement_deleted, {{"entry_id", removed.id}});
    });
}

// ---------------------------------------------------------------------------
// Elements

std::vector<ElementCard> Pipeline::recommend_locked(Session& s, ElementType type, std::size_t n) {
    if (n < 1) throw Error(Errc::invalid_argument, "n must be at least 1");
    std::vector<std::string> existing;
    for (const auto& c : s.element_cards[type]) existing.push_back(c.rough_prompt);
    const auto today = std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(clock_())};
    const auto rendered = render_element_recommender(type, static_cast<int>(n), s.output_language, today,
                                                     s.requirement_cards, existing);
    log(s.id, event_kind::render_prompt,
        {{"template", to_string(rendered.kind)}, {"prompt_digest", prompt_digest(rendered.text)}});
    auto gw = gateway(s.id);
    const json payload = gw.complete_structured(rendered, StructuredSchema::element_candidates(type, n));

    std::vector<ElementCard> created;
    for (const auto& c : payload.at("candidates")) {
        ElementCard card;
        card.type = type;
        card.rough_prompt = trim(c.at("value").get<std::string>());
        try {
            validate_rough_prompt(type, card.rough_prompt);
        } catch (const Error&) {
            continue;  // e.g. a Text value without a role
        }
        if (type == ElementType::Text) card.rough_prompt = format_text_entry(parse_text_entry(card.rough_prompt));
        card.reasoning = c.at("reasoning").get<std::string>();
        card.influencing_fields = parse_fields(c.at("influencing_fields"));
        card.id = CardId(s.next_id("el"));
        created.push_back(card);
    }
    auto& list = s.element_cards[type];
    list.insert(list.end(), created.begin(), created.end());
    commit(s);
    log(s.id, event_kind::cards_created, {{"type", key(type)}, {"cards", created}});
    return created;
}

std::vector<ElementCard> Pipeline::recommend_elements(const SessionId& id, ElementType type, std::size_t n) {
    return with_session(id, [&](Session& s) { return recommend_locked(s, type, n); });
}

std::vector<ElementCard> Pipeline::recommend_and_preview(const SessionId& id, ElementType type, std::size_t n) {
    return with_session(id, [&](Session& s) {
        auto created = recommend_locked(s, type, n);
        if (!is_visual(type)) return created;
        std::exception_ptr first_error;
        for (auto& c : created) {
            try {
                c = enhance_locked(s, c.id);
            } catch (const Error&) {
                if (!first_error) first_error = std::current_exception();
                c = *s.find_card(c.id);
            }
        }
        if (first_error) std::rethrow_exception(first_error);
        return created;
    });
}

ElementCard Pipeline::add_manual_element(const SessionId& id, ElementType type, std::string_view rough_prompt) {
    validate_rough_prompt(type, rough_prompt);
    return with_session(id, [&](Session& s) {
        ElementCard card;
        card.type = type;
        card.rough_prompt = trim(rough_prompt);
        if (type == ElementType::Text) card.rough_prompt = format_text_entry(parse_text_entry(card.rough_prompt));
        card.id = CardId(s.next_id("el"));
        s.element_cards[type].push_back(card);
        commit(s);
        log(s.id, event_kind::cards_created, {{"type", key(type)}, {"cards", json::array({card})}});
        return card;
    });
}

void Pipeline::enhance_card(Session& s, ElementCard& card, ProviderGateway& gw) {
    EnhancerContext ctx;
    ctx.output_language = s.output_language;
    ctx.deliverable_format = nonempty(s.deliverable_context.deliverable_format);
    ctx.orientation = s.deliverable_context.orientation;
    try {
        const auto rendered = render_enhancer(*enhancer_for(card.type), card.rough_prompt, ctx);
        log(s.id, event_kind::render_prompt,
            {{"template", to_string(rendered.kind)}, {"prompt_digest", prompt_digest(rendered.text)}});
        const json payload = gw.complete_structured(rendered, StructuredSchema::enhanced_line());
        card.enhanced_prompt = trim(collapse_newlines(payload.at("text").get<std::string>()));
        card.status = CardStatus::enhanced;
        card.error.reset();
        card.preview_ref = gw.generate_image(*card.enhanced_prompt, config_.preview_size, preview_nonce(card));
        card.status = CardStatus::previewed;
    } catch (const Error& e) {
        card.status = CardStatus::failed;
        card.preview_ref.reset();
        card.error = std::string(code_name(e.code())) + ": " + e.what();
        commit(s);
        log(s.id, event_kind::card_failed,
            {{"card_id", card.id}, {"revision", card.revision}, {"code", code_name(e.code())}});
        throw;
    }
    commit(s);
    log(s.id, event_kind::card_previewed,
        {{"card_id", card.id},
         {"revision", card.revision},
         {"enhanced_prompt", *card.enhanced_prompt},
         {"content_hash", card.preview_ref->content_hash}});
}

ElementCard Pipeline::enhance_locked(Session& s, const CardId& id) {
    ElementCard& card = card_ref(s, id);
    if (!is_visual(card.type)) return card;
    if (card.status == CardStatus::previewed) {
        throw Error(Errc::invalid_state, "card " + id.str() + " already has a preview; regenerate it instead",
                    {{"card_id", id.str()}, {"status", to_string(card.status)}});
    }
    auto gw = gateway(s.id);
    enhance_card(s, card, gw);
    return card;
}

ElementCard Pipeline::enhance_and_preview(const SessionId& id, const CardId& card) {
    return with_session(id, [&](Session& s) { return enhance_locked(s, card); });
}

ElementCard Pipeline::edit_rough(const SessionId& id, const CardId& card_id, std::string_view rough_prompt) {
    return with_session(id, [&](Session& s) {
        ElementCard& card = card_ref(s, card_id);
        validate_rough_prompt(card.type, rough_prompt);
        card.parent_id = card.id.str() + "@" + std::to_string(card.revision);
        card.rough_prompt = trim(rough_prompt);
        if (card.type == ElementType::Text) card.rough_prompt = format_text_entry(parse_text_entry(card.rough_prompt));
        ++card.revision;
        card.enhanced_prompt.reset();
        card.preview_ref.reset();
        card.error.reset();
        card.status = CardStatus::drafted;
        commit(s);
        log(s.id, event_kind::card_edited,
            {{"card_id", card.id}, {"revision", card.revision}, {"rough_prompt", card.rough_prompt}});
        if (is_visual(card.type)) {
            auto gw = gateway(s.id);
            enhance_card(s, card, gw);
        }
        return card;
    });
}

ElementCard Pipeline::regenerate_preview(const SessionId& id, const CardId& card_id) {
    return with_session(id, [&](Session& s) {
        ElementCard& card = card_ref(s, card_id);
        if (!is_visual(card.type)) {
            throw Error(Errc::unsupported_for_text, "Text cards have no preview to regenerate",
                        {{"card_id", card_id.str()}});
        }
        if (card.status == CardStatus::drafted) {
            throw Error(Errc::invalid_state, "card " + card_id.str() + " has not been enhanced yet",
                        {{"card_id", card_id.str()}, {"status", to_string(card.status)}});
        }
        card.parent_id = card.id.str() + "@" + std::to_string(card.revision);
        ++card.revision;
        commit(s);
        log(s.id, event_kind::preview_regenerated, {{"card_id", card.id}, {"revision", card.revision}});
        auto gw = gateway(s.id);
        enhance_card(s, card, gw);
        return card;
    });
}

void Pipeline::delete_card(const SessionId& id, const CardId& card_id) {
    with_session(id, [&](Session& s) {
        const ElementCard& card = card_ref(s, card_id);
        const ElementType type = card.type;
        if (card.selected || s.selection) {
            bool changed = false;
            if (s.selection) {
                auto& sel = *s.selection;
                if (auto* slot = slot_for(sel, type); slot && *slot == card_id) {
                    slot->reset();
                    changed = true;
                }
                const auto before = sel.text_ids.size();
                std::erase(sel.text_ids, card_id);
                changed = changed || before != sel.text_ids.size();
            }
            if (changed) {
                sync_selected_flags(s);
                commit(s);
                log(s.id, event_kind::selection_changed, {{"selection", selection_detail(s.selection)}});
            }
        }
        std::erase_if(s.element_cards[type], [&](const ElementCard& c) { return c.id == card_id; });
        commit(s);
        log(s.id, event_kind::card_deleted, {{"card_id", card_id}});
    });
}

// ---------------------------------------------------------------------------
// Selection

SelectionSet Pipeline::set_selected(const SessionId& id, const CardId& card_id, bool selected) {
    return with_session(id, [&](Session& s) {
        const ElementCard& card = card_ref(s, card_id);
        SelectionSet sel = s.selection.value_or(SelectionSet{});
        if (auto* slot = slot_for(sel, card.type)) {
            if (selected) {
                *slot = card_id;
            } else if (*slot == card_id) {
                slot->reset();
            }
        } else {
            std::erase(sel.text_ids, card_id);
            if (selected) sel.text_ids.push_back(card_id);
        }
        s.selection = sel;
        sync_selected_flags(s);
        commit(s);
        log(s.id, event_kind::selection_changed, {{"selection", selection_detail(s.selection)}});
        return s.selection.value_or(SelectionSet{});
    });
}

SelectionSet Pipeline::set_selection(const SessionId& id, const SelectionSet& selection) {
    return with_session(id, [&](Session& s) {
        std::set<CardId> seen;
        auto check = [&](const CardId& cid, ElementType expected) {
            const ElementCard& c = card_ref(s, cid);
            if (c.type != expected) {
                throw Error(Errc::type_mismatch,
                            "card " + cid.str() + " is " + std::string(label(c.type)) + ", not " +
                                std::string(label(expected)),
                            {{"card_id", cid.str()}, {"expected", label(expected)}, {"actual", label(c.type)}});
            }
            if (!seen.insert(cid).second) {
                throw Error(Errc::duplicate_selection, "card selected twice: " + cid.str(), {{"card_id", cid.str()}});
            }
        };
        if (selection.composition_id) check(*selection.composition_id, ElementType::Composition);
        if (selection.object_id) check(*selection.object_id, ElementType::Object);
        if (selection.background_id) check(*selection.background_id, ElementType::Background);
        if (selection.typography_id) check(*selection.typography_id, ElementType::Typography);
        for (const auto& t : selection.text_ids) check(t, ElementType::Text);

        s.selection = selection;
        sync_selected_flags(s);
        commit(s);
        log(s.id, event_kind::selection_changed, {{"selection", selection_detail(s.selection)}});
        return s.selection.value_or(SelectionSet{});
    });
}

ValidatedSelection Pipeline::check_selection(const SessionId& id) {
    return with_session(id, [&](Session& s) { return validate_selection(s, s.selection.value_or(SelectionSet{})); });
}

// ---------------------------------------------------------------------------
// Integration

DesignArtifact Pipeline::integrate_locked(Session& s) {
    const auto started = std::chrono::steady_clock::now();
    const ValidatedSelection validated = validate_selection(s, s.selection.value_or(SelectionSet{}));
    const auto rendered = render_integrator(validated, s.output_language);
    log(s.id, event_kind::render_prompt,
        {{"template", to_string(rendered.kind)}, {"prompt_digest", prompt_digest(rendered.text)}});
    auto gw = gateway(s.id);
    const json payload = gw.complete_structured(rendered, StructuredSchema::integrated_paragraph());

    IntegratedPrompt prompt;
    prompt.id = PromptId(s.next_id("ip"));
    prompt.text = trim(collapse_newlines(payload.at("text").get<std::string>()));
    prompt.selection_snapshot = snapshot_of(validated);
    prompt.created_at = clock_();
    s.integrated_prompts.push_back(prompt);
    commit(s);
    log(s.id, event_kind::integrated_prompt_created, {{"prompt_id", prompt.id}, {"text", prompt.text}});

    const std::uint64_t nonce = fnv1a64("design@" + std::to_string(s.history.size()));
    const ImageRef image = gw.generate_image(prompt.text, final_image_size(s.deliverable_context.orientation), nonce);

    DesignArtifact artifact;
    artifact.id = ArtifactId(s.next_id("art"));
    artifact.image_ref = image;
    artifact.integrated_prompt_id = prompt.id;
    artifact.duration_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
    artifact.created_at = clock_();
    s.history.push_back(artifact);
    commit(s);
    log(s.id, event_kind::design_generated,
        {{"artifact_id", artifact.id}, {"prompt_id", prompt.id}, {"content_hash", image.content_hash}},
        artifact.duration_ms);
    return artifact;
}

DesignArtifact Pipeline::integrate_and_generate(const SessionId& id) {
    return with_session(id, [&](Session& s) { return integrate_locked(s); });
}

DesignArtifact Pipeline::regenerate_design(const SessionId& id) {
    return with_session(id, [&](Session& s) {
        if (s.history.empty()) {
            throw Error(Errc::no_prior_design, "there is no earlier design to regenerate");
        }
        return integrate_locked(s);
    });
}

MetricsSummary Pipeline::metrics(const SessionId& id) {
    return with_session(id, [&](Session& s) {
        MetricsSummary out;
        const auto evs = store_.read_events(s.id);
        out.metrics = session_metrics(s, evs);
        if (s.history.size() >= 2) {
            auto gw = gateway(s.id);
            std::vector<EmbeddingVector> vs;
            std::vector<std::string> ids;
            for (const auto& a : s.history) {
                const IntegratedPrompt* p = s.find_prompt(a.integrated_prompt_id);
                if (!p) throw Error(Errc::corrupt_record, "artifact references a missing prompt");
                vs.push_back(gw.embed_text(p->text));
                ids.push_back(a.id.str());
            }
            out.prompt_diversity = diversity(vs, ids);
        }
        return out;
    });
}

// ---------------------------------------------------------------------------
// Batch

Session Pipeline::run_auto(std::string_view brief_text, const AutoRunOptions& options) {
    if (trim(brief_text).empty()) throw Error(Errc::empty_brief, "the design brief is empty");
    if (options.n < 1) throw Error(Errc::invalid_argument, "n must be at least 1");

    SessionOptions so;
    so.output_language = options.output_language;
    so.deliverable_context.orientation = options.orientation;
    if (options.session_id) {
        so.id = options.session_id;
    } else {
        const std::string base =
            "run-" + sha256_hex(std::to_string(options.seed) + "|" + std::string(brief_text)).substr(0, 12);
        SessionId candidate(base);
        for (int k = 2; store_.has_session(candidate); ++k) candidate = SessionId(base + "-" + std::to_string(k));
        so.id = candidate;
    }
    const Session created = create_session(brief_text, so);
    const SessionId& id = created.id;

    const auto cards = extract_requirements(id);
    DeliverableContext ctx;
    ctx.orientation = options.orientation;
    if (options.deliverable_format) {
        ctx.deliverable_format = *options.deliverable_format;
    } else if (const auto& formats = cards.entries(RequirementField::DeliverableFormat); !formats.empty()) {
        ctx.deliverable_format = formats.front().text;
    } else {
        ctx.deliverable_format = config_.default_deliverable_format;
    }
    set_deliverable_context(id, ctx);

    std::map<ElementType, std::vector<ElementCard>> recommended;
    for (auto type : kElementTypes) recommended[type] = recommend_elements(id, type, options.n);
    for (auto type : kElementTypes) {
        if (!is_visual(type)) continue;
        for (const auto& c : recommended[type]) enhance_and_preview(id, c.id);
    }

    SelectionSet sel;
    auto first = [&](ElementType t) -> std::optional<CardId> {
        if (recommended[t].empty()) return std::nullopt;
        return recommended[t].front().id;
    };
    sel.composition_id = first(ElementType::Composition);
    sel.object_id = first(ElementType::Object);
    sel.background_id = first(ElementType::Background);
    sel.typography_id = first(ElementType::Typography);
    for (const auto& c : recommended[ElementType::Text]) sel.text_ids.push_back(c.id);
    set_selection(id, sel);

    integrate_and_generate(id);
    close_session(id);
    return session(id);
}

}  // namespace designflow
