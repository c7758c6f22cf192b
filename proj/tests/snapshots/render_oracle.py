#!/usr/bin/env python3
"""Writes the frozen rendered-template snapshots used by the prompt tests.

Rendering here is a naive str.replace over the template files, kept apart from
the C++ renderer on purpose. The fixture contexts must match
tests/unit/prompt_fixtures.hpp.
"""
import pathlib

ROOT = pathlib.Path(__file__).resolve().parents[2]
TEMPLATES = ROOT / "core" / "templates"
OUT = pathlib.Path(__file__).resolve().parent

LABELS = [
    ("deliverable_format", "Deliverable Format"),
    ("business_context", "Business Context"),
    ("target_audience", "Target Audience"),
    ("creative_direction", "Creative Direction"),
    ("tone_and_manner", "Tone and Manner"),
    ("keywords_and_motifs", "Keywords and Motifs"),
    ("design_specifications", "Design Specifications"),
    ("restrictions", "Restrictions"),
]

KNOWN = {
    "deliverable_format": ["Poster"],
    "target_audience": ["University students", "Young professionals"],
}


def tpl(name):
    return (TEMPLATES / f"{name}.txt").read_text(encoding="utf-8")


def fill(body, values):
    for k, v in values.items():
        body = body.replace("{" + k + "}", v)
    return body


def requirements_block():
    parts = []
    for key, label in LABELS:
        entries = KNOWN.get(key, [])
        lines = [f"{label}:"] + ([f"- {e}" for e in entries] if entries else ["(none)"])
        parts.append("\n".join(lines))
    return "\n\n".join(parts)


def enhancer(name, values):
    return fill(tpl(name) + "\n" + tpl("enhance_shared"), values)


def main():
    snaps = {}
    described = "".join(f"\n- {k} ({l}): what {k} covers" for k, l in LABELS)
    snaps["RequirementExtractor"] = fill(tpl("requirement_extractor"), {
        "output_language": "en",
        "field_descriptions": described,
        "user_input": "Spring poster for a neighbourhood bakery.",
    })
    snaps["RequirementRecommender"] = fill(tpl("requirement_recommender"), {
        "num_candidates": "3",
        "output_language": "ko",
        "known_requirements": "\n" + requirements_block(),
        "target_field": "Target Audience",
        "field_description": "Who the design speaks to",
    })
    guideline = tpl("guideline_typography").rstrip("\n")
    guideline = guideline.replace("{output_language}", "en")
    snaps["ElementRecommender"] = fill(tpl("element_recommender"), {
        "num_candidates": "4",
        "element_type": "Typography",
        "output_language": "en",
        "current_date": "2025-03-07",
        "requirements_text": "\n" + requirements_block(),
        "predetermined_section": "\n\nExisting Typography values:\n- Bold serif headings\n- Clean sans body",
        "element_description": guideline,
    })
    snaps["EnhanceObject"] = enhancer("enhance_object", {"output_language": "en", "rough_prompt": "A red apple"})
    snaps["EnhanceBackground"] = enhancer("enhance_background", {"output_language": "ja", "rough_prompt": "Soft gradient"})
    snaps["EnhanceTypography"] = enhancer("enhance_typography", {"output_language": "en", "rough_prompt": "Bold sans"})
    snaps["EnhanceComposition"] = enhancer("enhance_composition", {
        "deliverable_format": "poster",
        "orientation": "landscape",
        "output_language": "en",
        "rough_prompt": "Hero image on top text below",
    })
    selected = "\n".join([
        "Composition: Hero image on top text below",
        "Background: Soft peach gradient with grain",
        "Text:",
        "- Headline: Big Spring Sale",
        "- Call to Action: Visit us today",
        "Typography: Bold sans headings",
        "Object: A glossy red apple on a white plinth",
    ])
    snaps["DesignIntegrator"] = fill(tpl("design_integrator"), {
        "output_language": "en",
        "selected_elements": "\n" + selected,
    })
    for kind, text in snaps.items():
        (OUT / f"{kind}.txt").write_text(text, encoding="utf-8")


if __name__ == "__main__":
    main()
