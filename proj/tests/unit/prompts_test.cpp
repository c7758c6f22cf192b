#include "designflow/prompts.hpp"

#include "support.hpp"
#include "test_util.hpp"

#include <regex>
#include <set>

using namespace designflow;
using namespace designflow::testing;

namespace {

std::string file_stem(PromptTemplateKind kind) {
    std::string name(to_string(kind));
    std::string out;
    for (char c : name) {
        if (std::isupper(static_cast<unsigned char>(c))) {
            if (!out.empty()) out += '_';
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else {
            out += c;
        }
    }
    return out;
}

std::string golden_template(const std::string& stem) {
    return read_file(source_dir() / "core" / "templates" / (stem + ".txt"));
}

std::set<std::string> placeholders(const std::string& text) {
    static const std::regex re(R"(\{([a-z_]+)\})");
    std::set<std::string> out;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
        out.insert((*it)[1]);
    }
    return out;
}

bool is_enhancer(PromptTemplateKind k) { return enhancer_for(ElementType::Object) == k ||
                                                enhancer_for(ElementType::Background) == k ||
                                                enhancer_for(ElementType::Typography) == k ||
                                                enhancer_for(ElementType::Composition) == k; }

}  // namespace

class RenderedSnapshot : public ::testing::TestWithParam<PromptTemplateKind> {};

TEST_P(RenderedSnapshot, MatchesGoldenFile) {
    const auto kind = GetParam();
    const auto rendered = snapshot_render(kind);
    const auto golden = read_file(source_dir() / "tests" / "snapshots" / (std::string(to_string(kind)) + ".txt"));
    EXPECT_EQ(rendered.text, golden);
    EXPECT_EQ(rendered.kind, kind);
    EXPECT_TRUE(placeholders(rendered.text).empty());
}

INSTANTIATE_TEST_SUITE_P(AllKinds, RenderedSnapshot, ::testing::ValuesIn(kPromptTemplateKinds),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Templates, EmbeddedBodiesMatchTemplateFiles) {
    for (auto kind : kPromptTemplateKinds) {
        EXPECT_EQ(template_body(kind), golden_template(file_stem(kind))) << to_string(kind);
    }
    EXPECT_EQ(shared_enhancer_instructions(), golden_template("enhance_shared"));
    for (auto type : kElementTypes) {
        EXPECT_EQ(guideline_template(type), golden_template("guideline_" + std::string(key(type))));
    }
}

TEST(Templates, DeclaredVariablesAreExactlyThePlaceholders) {
    for (auto kind : kPromptTemplateKinds) {
        std::string body(template_body(kind));
        if (is_enhancer(kind)) body += std::string(shared_enhancer_instructions());
        const auto declared = template_variables(kind);
        EXPECT_EQ(placeholders(body), std::set<std::string>(declared.begin(), declared.end())) << to_string(kind);
    }
}

TEST(Templates, KindNamesRoundTrip) {
    for (auto kind : kPromptTemplateKinds) EXPECT_EQ(prompt_kind_from_string(to_string(kind)), kind);
    EXPECT_FALSE(prompt_kind_from_string("Enhancer"));
    EXPECT_FALSE(enhancer_for(ElementType::Text));
}

TEST(Substitute, SinglePassWithoutRescanning) {
    const std::vector<std::string> declared = {"a", "b"};
    EXPECT_EQ(substitute("{a}-{b}-{c}", declared, {{"a", "{b}"}, {"b", "x"}}), "{b}-x-{c}");
    EXPECT_EQ(substitute("{a}{", declared, {{"a", "1"}, {"b", ""}}), "1{");
    EXPECT_ERRC(substitute("{a}", declared, {{"a", "1"}}), Errc::missing_variable);
}

TEST(RenderErrors, ExtractorNeedsInputAndAllFields) {
    auto fds = canonical_field_descriptions();
    EXPECT_ERRC(render_requirement_extractor("en", fds, " \n "), Errc::empty_brief);
    fds.pop_back();
    EXPECT_ERRC(render_requirement_extractor("en", fds, "brief"), Errc::missing_field);
}

TEST(RenderErrors, CompositionNeedsDeliverableContext) {
    EnhancerContext ctx;
    EXPECT_ERRC(render_enhancer(PromptTemplateKind::EnhanceComposition, "grid", ctx), Errc::missing_context);
    ctx.deliverable_format = "poster";
    ctx.orientation.reset();
    EXPECT_ERRC(render_enhancer(PromptTemplateKind::EnhanceComposition, "grid", ctx), Errc::missing_context);
    EXPECT_ERRC(render_enhancer(PromptTemplateKind::DesignIntegrator, "grid", ctx), Errc::invalid_argument);
    EXPECT_ERRC(render_enhancer(PromptTemplateKind::EnhanceObject, " ", ctx), Errc::invalid_argument);
}

TEST(RenderErrors, RecommendersValidateArguments) {
    RequirementCardSet none;
    EXPECT_ERRC(render_requirement_recommender(0, "en", none, RequirementField::TargetAudience, "d"),
                Errc::invalid_argument);
    using namespace std::chrono;
    EXPECT_ERRC(render_element_recommender(ElementType::Object, 1, "en", year{2025} / February / 30, none, {}),
                Errc::invalid_argument);
}

TEST(Serialization, EmptyRequirementsAndNoPriorValues) {
    RequirementCardSet none;
    const auto text = serialize_requirements(none);
    EXPECT_EQ(text.rfind("Deliverable Format:\n(none)", 0), 0u);
    EXPECT_NE(text.find("Restrictions:\n(none)"), std::string::npos);
    using namespace std::chrono;
    const auto r = render_element_recommender(ElementType::Object, 2, "en", year{2026} / 1 / 1, none, {});
    EXPECT_EQ(r.variables_used.at("predetermined_section"),
              "\n\nExisting Object values:\n" + std::string(kNoPriorRecommendations));
}

TEST(Serialization, SelectionPutsCompositionFirst) {
    const auto r = snapshot_render(PromptTemplateKind::DesignIntegrator);
    const auto& block = r.variables_used.at("selected_elements");
    EXPECT_EQ(block.find("\nComposition: "), 0u);
    EXPECT_LT(block.find("Background:"), block.find("Text:"));
    EXPECT_LT(block.find("Text:"), block.find("Typography:"));
    EXPECT_LT(block.find("Typography:"), block.find("Object:"));
    EXPECT_NE(block.find("- Headline: Big Spring Sale\n"), std::string::npos);
}

TEST(Guidelines, LanguageIsFilledIn) {
    const auto g = guideline_for(ElementType::Typography, "ko");
    EXPECT_NE(g.find("appropriate for ko"), std::string::npos);
    EXPECT_EQ(g.find('{'), std::string::npos);
    EXPECT_NE(g.back(), '\n');
}
