#include "designflow/mock_providers.hpp"
#include "designflow/pipeline.hpp"

#include "support.hpp"
#include "test_util.hpp"

#include <regex>

using namespace designflow;
using namespace designflow::testing;
using nlohmann::json;

namespace {

class PipelineTest : public ::testing::Test {
protected:
    TempDir dir;
    Store store{dir.path()};
    MockProviders mocks = make_mock_providers(1);
    PipelineConfig config = [] {
        PipelineConfig c;
        c.retry.initial_backoff = std::chrono::milliseconds(1);
        return c;
    }();
    Pipeline pipeline{mocks.providers(), store, config, step_clock(fixed_time(), std::chrono::seconds(1))};

    SessionId open(std::string format = "poster") {
        SessionOptions o;
        o.deliverable_context.deliverable_format = std::move(format);
        return pipeline.create_session("Launch poster for a new cafe. Warm and friendly tone.", o).id;
    }

    std::vector<std::string> kinds(const SessionId& id, std::size_t from = 0) {
        std::vector<std::string> out;
        const auto evs = pipeline.events(id);
        for (std::size_t i = from; i < evs.size(); ++i) out.push_back(evs[i].kind);
        return out;
    }

    /// Composition, Object, Background, Typography previewed, two Text cards, all selected.
    SessionId ready_session() {
        const auto id = open();
        for (auto t : {ElementType::Composition, ElementType::Object, ElementType::Background, ElementType::Typography}) {
            const auto cards = pipeline.recommend_and_preview(id, t, 1);
            pipeline.set_selected(id, cards.front().id, true);
        }
        for (const auto& c : pipeline.recommend_elements(id, ElementType::Text, 2)) pipeline.set_selected(id, c.id, true);
        return id;
    }
};

std::size_t index_of(const std::vector<std::string>& v, const std::string& k, std::size_t from = 0) {
    for (std::size_t i = from; i < v.size(); ++i)
        if (v[i] == k) return i;
    return v.size();
}

}  // namespace

TEST(FinalSize, FollowsOrientation) {
    EXPECT_EQ(final_image_size(Orientation::portrait), (ImageSize{768, 1152}));
    EXPECT_EQ(final_image_size(Orientation::landscape), (ImageSize{1152, 768}));
    EXPECT_EQ(final_image_size(Orientation::square), (ImageSize{1024, 1024}));
    EXPECT_EQ(final_image_size(std::nullopt), (ImageSize{1024, 1024}));
}

TEST_F(PipelineTest, CreateSessionLogsOpeningWithoutTimestamps) {
    const auto id = open();
    EXPECT_TRUE(std::regex_match(id.str(), std::regex("s-[0-9a-f]{12}")));
    const auto evs = pipeline.events(id);
    ASSERT_EQ(evs.size(), 1u);
    EXPECT_EQ(evs[0].kind, "session_opened");
    EXPECT_EQ(evs[0].detail["output_language"], "en");
    EXPECT_FALSE(evs[0].detail.dump().find("2025-") != std::string::npos);
    SessionOptions o;
    o.id = id;
    EXPECT_ERRC(pipeline.create_session("x", o), Errc::id_collision);
    EXPECT_ERRC(pipeline.session(SessionId("s-missing")), Errc::session_not_found);
}

TEST_F(PipelineTest, ExtractionSkipsDuplicatesOnRepeat) {
    const auto id = open();
    const auto cards = pipeline.extract_requirements(id);
    EXPECT_EQ(cards.entries(RequirementField::DeliverableFormat).front().text, "Launch poster for a new cafe");
    EXPECT_EQ(cards.entries(RequirementField::BusinessContext).front().text, "Warm and friendly tone");
    EXPECT_EQ(cards.size(), 2u);
    EXPECT_EQ(pipeline.extract_requirements(id).size(), 2u);
    EXPECT_EQ(pipeline.extract_requirements(id, "Something new.").size(), 3u);
    EXPECT_EQ(pipeline.session(id).brief_text, "Something new.");
    EXPECT_ERRC(pipeline.extract_requirements(id, "   "), Errc::empty_brief);
    EXPECT_EQ(kinds(id, 1),
              (std::vector<std::string>{"render_prompt", "complete_structured", "requirements_extracted",
                                        "render_prompt", "complete_structured", "requirements_extracted",
                                        "render_prompt", "complete_structured", "requirements_extracted"}));
}

TEST_F(PipelineTest, RecommendedRequirementsAreNotStoredAndSkipExisting) {
    const auto id = open();
    pipeline.add_entry(id, RequirementField::TargetAudience, "MOCK-TA-1");
    const auto recs = pipeline.recommend_requirements(id, RequirementField::TargetAudience, 3);
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0].text, "mock-ta-2");
    EXPECT_TRUE(recs[0].id.empty());
    EXPECT_EQ(recs[0].origin, EntryOrigin::recommended);
    EXPECT_EQ(pipeline.session(id).requirement_cards.size(), 1u);
    EXPECT_ERRC(pipeline.recommend_requirements(id, RequirementField::TargetAudience, 0), Errc::invalid_argument);
}

TEST_F(PipelineTest, EntryCrud) {
    const auto id = open();
    const auto a = pipeline.add_entry(id, RequirementField::Restrictions, "  No   red ");
    EXPECT_EQ(a.text, "No red");
    EXPECT_EQ(a.origin, EntryOrigin::manual);
    EXPECT_ERRC(pipeline.add_entry(id, RequirementField::Restrictions, "no RED"), Errc::duplicate_entry);
    EXPECT_ERRC(pipeline.add_entry(id, RequirementField::Restrictions, " "), Errc::empty_after_trim);
    EXPECT_EQ(pipeline.edit_entry(id, a.id, "No green").text, "No green");
    EXPECT_ERRC(pipeline.edit_entry(id, EntryId("req-99"), "x"), Errc::unknown_entry);
    pipeline.delete_entry(id, a.id);
    EXPECT_ERRC(pipeline.delete_entry(id, a.id), Errc::unknown_entry);
    EXPECT_TRUE(pipeline.session(id).requirement_cards.empty());
    EXPECT_EQ(kinds(id, 1), (std::vector<std::string>{"requirement_added", "requirement_edited", "requirement_deleted"}));
}

TEST_F(PipelineTest, TextCardsNeverReachTheImageModel) {
    const auto id = open();
    const auto cards = pipeline.recommend_and_preview(id, ElementType::Text, 3);
    ASSERT_EQ(cards.size(), 3u);
    EXPECT_EQ(cards[0].rough_prompt, "Headline: mock-text-1 no stated requirements");
    EXPECT_EQ(pipeline.enhance_and_preview(id, cards[0].id), cards[0]);
    EXPECT_EQ(mocks.image->calls(), 0u);
    EXPECT_ERRC(pipeline.regenerate_preview(id, cards[0].id), Errc::unsupported_for_text);
    EXPECT_ERRC(pipeline.add_manual_element(id, ElementType::Text, "no role"), Errc::invalid_text_format);
    EXPECT_EQ(pipeline.add_manual_element(id, ElementType::Text, " Date :  May 1 ").rough_prompt, "Date: May 1");
    EXPECT_EQ(index_of(kinds(id), "generate_image"), kinds(id).size());
}

TEST_F(PipelineTest, RecommendationsNumberOnAfterExistingValues) {
    const auto id = open();
    pipeline.recommend_elements(id, ElementType::Object, 2);
    const auto more = pipeline.recommend_elements(id, ElementType::Object, 1);
    EXPECT_EQ(more[0].rough_prompt.rfind("mock-object-3:", 0), 0u);
    EXPECT_EQ(more[0].status, CardStatus::drafted);
    EXPECT_EQ(more[0].influencing_fields, std::vector<RequirementField>{RequirementField::CreativeDirection});
}

TEST_F(PipelineTest, VisualCardsAreEnhancedBeforePreview) {
    const auto id = open();
    const auto start = pipeline.events(id).size();
    const auto cards = pipeline.recommend_and_preview(id, ElementType::Object, 2);
    for (const auto& c : cards) {
        EXPECT_EQ(c.status, CardStatus::previewed);
        EXPECT_EQ(*c.enhanced_prompt, "ENHANCED[EnhanceObject]: " + c.rough_prompt);
        EXPECT_EQ(c.preview_ref->width, 512);
        EXPECT_FALSE(card_invariant_violation(c));
    }
    EXPECT_NE(cards[0].preview_ref->content_hash, cards[1].preview_ref->content_hash);
    EXPECT_EQ(kinds(id, start),
              (std::vector<std::string>{"render_prompt", "complete_structured", "cards_created",
                                        "render_prompt", "complete_structured", "generate_image", "card_previewed",
                                        "render_prompt", "complete_structured", "generate_image", "card_previewed"}));
    EXPECT_ERRC(pipeline.enhance_and_preview(id, cards[0].id), Errc::invalid_state);
}

TEST_F(PipelineTest, CompositionWithoutDeliverableFormatFailsThenRecovers) {
    const auto id = open("");
    const auto cards = pipeline.recommend_elements(id, ElementType::Composition, 1);
    EXPECT_ERRC(pipeline.enhance_and_preview(id, cards[0].id), Errc::missing_context);
    const auto failed = *pipeline.session(id).find_card(cards[0].id);
    EXPECT_EQ(failed.status, CardStatus::failed);
    EXPECT_EQ(failed.error->rfind("missing_context: ", 0), 0u);
    EXPECT_EQ(kinds(id).back(), "card_failed");

    pipeline.set_deliverable_context(id, {"flyer", Orientation::square});
    const auto ok = pipeline.enhance_and_preview(id, cards[0].id);
    EXPECT_EQ(ok.status, CardStatus::previewed);
    EXPECT_FALSE(ok.error);
}

TEST_F(PipelineTest, ProviderFaultMarksCardFailed) {
    const auto id = open();
    mocks.image->faults().timeout = true;
    EXPECT_ERRC(pipeline.recommend_and_preview(id, ElementType::Background, 2), Errc::timeout);
    const auto s = pipeline.session(id);
    ASSERT_EQ(s.element_cards.at(ElementType::Background).size(), 2u);
    for (const auto& c : s.element_cards.at(ElementType::Background)) {
        EXPECT_EQ(c.status, CardStatus::failed);
        EXPECT_FALSE(c.preview_ref);
    }
    EXPECT_EQ(mocks.image->calls(), 4u);  // two cards, two attempts each
    mocks.image->faults().timeout = false;
    EXPECT_EQ(pipeline.regenerate_preview(id, s.element_cards.at(ElementType::Background)[0].id).status,
              CardStatus::previewed);
}

TEST_F(PipelineTest, EditAndRegenerateBumpRevision) {
    const auto id = open();
    const auto card = pipeline.recommend_and_preview(id, ElementType::Typography, 1).front();
    const auto edited = pipeline.edit_rough(id, card.id, "Chunky slab serif");
    EXPECT_EQ(edited.revision, 1u);
    EXPECT_EQ(edited.parent_id, card.id.str() + "@0");
    EXPECT_EQ(*edited.enhanced_prompt, "ENHANCED[EnhanceTypography]: Chunky slab serif");
    EXPECT_EQ(edited.status, CardStatus::previewed);

    const auto regen = pipeline.regenerate_preview(id, card.id);
    EXPECT_EQ(regen.revision, 2u);
    EXPECT_EQ(regen.parent_id, card.id.str() + "@1");
    EXPECT_EQ(regen.enhanced_prompt, edited.enhanced_prompt);
    EXPECT_NE(regen.preview_ref->content_hash, edited.preview_ref->content_hash);

    const auto drafted = pipeline.recommend_elements(id, ElementType::Object, 1).front();
    EXPECT_ERRC(pipeline.regenerate_preview(id, drafted.id), Errc::invalid_state);
    EXPECT_ERRC(pipeline.edit_rough(id, drafted.id, "  "), Errc::invalid_text_format);
    EXPECT_ERRC(pipeline.edit_rough(id, CardId("el-404"), "x"), Errc::unknown_card);

    const auto text = pipeline.add_manual_element(id, ElementType::Text, "Body: old");
    const auto t2 = pipeline.edit_rough(id, text.id, "Body:new");
    EXPECT_EQ(t2.rough_prompt, "Body: new");
    EXPECT_EQ(t2.status, CardStatus::drafted);
}

TEST_F(PipelineTest, SelectionEditing) {
    const auto id = open();
    const auto objs = pipeline.recommend_elements(id, ElementType::Object, 2);
    const auto texts = pipeline.recommend_elements(id, ElementType::Text, 2);
    pipeline.set_selected(id, objs[0].id, true);
    auto sel = pipeline.set_selected(id, objs[1].id, true);
    EXPECT_EQ(sel.object_id, objs[1].id);
    pipeline.set_selected(id, texts[0].id, true);
    sel = pipeline.set_selected(id, texts[1].id, true);
    EXPECT_EQ(sel.text_ids, (std::vector<CardId>{texts[0].id, texts[1].id}));
    sel = pipeline.set_selected(id, texts[0].id, false);
    EXPECT_EQ(sel.text_ids, std::vector<CardId>{texts[1].id});
    const auto s = pipeline.session(id);
    EXPECT_FALSE(s.find_card(objs[0].id)->selected);
    EXPECT_TRUE(s.find_card(objs[1].id)->selected);

    SelectionSet bad;
    bad.object_id = texts[0].id;
    EXPECT_ERRC(pipeline.set_selection(id, bad), Errc::type_mismatch);
    bad.object_id = CardId("el-77");
    EXPECT_ERRC(pipeline.set_selection(id, bad), Errc::unknown_card);
    bad.object_id.reset();
    bad.text_ids = {texts[0].id, texts[0].id};
    EXPECT_ERRC(pipeline.set_selection(id, bad), Errc::duplicate_selection);
    EXPECT_EQ(pipeline.session(id).selection->object_id, objs[1].id);  // failed calls change nothing

    pipeline.delete_card(id, objs[1].id);
    const auto after = pipeline.session(id);
    EXPECT_FALSE(after.selection->object_id);
    EXPECT_EQ(kinds(id).back(), "card_deleted");
    EXPECT_EQ(kinds(id)[kinds(id).size() - 2], "selection_changed");
    EXPECT_ERRC(pipeline.delete_card(id, objs[1].id), Errc::unknown_card);
}

TEST_F(PipelineTest, IntegrationValidatesThenLogsIntegratorBeforeImage) {
    const auto id = open();
    EXPECT_ERRC(pipeline.integrate_and_generate(id), Errc::missing_composition);
    const auto comp = pipeline.recommend_and_preview(id, ElementType::Composition, 1).front();
    pipeline.set_selected(id, comp.id, true);
    EXPECT_ERRC(pipeline.check_selection(id), Errc::no_text);
    EXPECT_ERRC(pipeline.integrate_and_generate(id), Errc::no_text);
    EXPECT_EQ(mocks.image->calls(), 1u);

    const auto text = pipeline.add_manual_element(id, ElementType::Text, "Headline: Grand opening");
    pipeline.set_selected(id, text.id, true);
    const auto start = pipeline.events(id).size();
    const auto art = pipeline.integrate_and_generate(id);
    EXPECT_EQ(kinds(id, start), (std::vector<std::string>{"render_prompt", "complete_structured",
                                                          "integrated_prompt_created", "generate_image",
                                                          "design_generated"}));
    const auto s = pipeline.session(id);
    ASSERT_EQ(s.history.size(), 1u);
    EXPECT_EQ(s.history[0], art);
    EXPECT_EQ(art.image_ref.width, 768);
    EXPECT_EQ(art.image_ref.height, 1152);
    const auto* prompt = s.find_prompt(art.integrated_prompt_id);
    ASSERT_TRUE(prompt);
    EXPECT_EQ(prompt->text, "Composition: " + *comp.enhanced_prompt + " | Text: - Headline: Grand opening");
    EXPECT_EQ(prompt->selection_snapshot.elements.size(), 2u);
    EXPECT_EQ(prompt->selection_snapshot.elements[0].type, ElementType::Composition);
    const auto evs = pipeline.events(id);
    EXPECT_TRUE(evs.back().duration_ms.has_value());
    EXPECT_EQ(evs[start].detail["template"], "DesignIntegrator");
}

TEST_F(PipelineTest, RegenerateDesignAppendsToHistory) {
    const auto id = ready_session();
    EXPECT_ERRC(pipeline.regenerate_design(id), Errc::no_prior_design);
    const auto first = pipeline.integrate_and_generate(id);
    const auto second = pipeline.regenerate_design(id);
    const auto s = pipeline.session(id);
    ASSERT_EQ(s.history.size(), 2u);
    EXPECT_EQ(s.history[0], first);
    EXPECT_NE(second.image_ref.content_hash, first.image_ref.content_hash);
    EXPECT_EQ(s.integrated_prompts.size(), 2u);

    const auto m = pipeline.metrics(id);
    EXPECT_EQ(m.metrics.images_generated, 2u);
    ASSERT_TRUE(m.prompt_diversity);
    EXPECT_EQ(m.prompt_diversity->pair_count, 1u);
    EXPECT_NEAR(m.prompt_diversity->mean_pairwise_distance, 0.0, 1e-12);  // same selection, same text
    EXPECT_TRUE(m.metrics.completion_time_s.has_value());
}

TEST_F(PipelineTest, FailedImageLeavesHistoryUntouched) {
    const auto id = ready_session();
    mocks.image->faults().transport_error = true;
    EXPECT_ERRC(pipeline.integrate_and_generate(id), Errc::transport_error);
    const auto s = pipeline.session(id);
    EXPECT_TRUE(s.history.empty());
    EXPECT_EQ(s.integrated_prompts.size(), 1u);
    EXPECT_EQ(store.load_session(id), s);
}

TEST_F(PipelineTest, ChatSchemaFaultSurfacesAsSchemaViolation) {
    const auto id = open();
    mocks.chat->faults().schema_violation = true;
    EXPECT_ERRC(pipeline.extract_requirements(id), Errc::schema_violation);
    const auto k = kinds(id, 1);
    EXPECT_EQ(k, (std::vector<std::string>{"render_prompt", "complete_structured", "complete_structured"}));
}

TEST_F(PipelineTest, RunAutoBuildsAClosedSessionWithOneDesign) {
    AutoRunOptions opt;
    opt.seed = 1;
    opt.n = 2;
    const auto s = pipeline.run_auto(brief(3), opt);
    EXPECT_EQ(s.element_cards.size(), 5u);
    for (const auto& [type, cards] : s.element_cards) EXPECT_EQ(cards.size(), 2u) << key(type);
    EXPECT_EQ(s.history.size(), 1u);
    EXPECT_EQ(s.selection->text_ids.size(), 2u);
    EXPECT_EQ(kinds(s.id).back(), "session_closed");
    EXPECT_FALSE(s.deliverable_context.deliverable_format.empty());

    const auto again = pipeline.run_auto(brief(3), opt);
    EXPECT_EQ(again.id.str(), s.id.str() + "-2");
    EXPECT_EQ(again.integrated_prompts[0].text, s.integrated_prompts[0].text);
    EXPECT_EQ(again.history[0].image_ref, s.history[0].image_ref);
    EXPECT_ERRC(pipeline.run_auto("  ", opt), Errc::empty_brief);
}
