#include "designflow/prompts.hpp"

#include <benchmark/benchmark.h>

using namespace designflow;

static void render_extractor(benchmark::State& state) {
    const auto desc = canonical_field_descriptions();
    const std::string brief(static_cast<std::size_t>(state.range(0)), 'x');
    for (auto _ : state) benchmark::DoNotOptimize(render_requirement_extractor("en", desc, brief));
}
BENCHMARK(render_extractor)->Arg(100)->Arg(10000);

static void render_object_enhancer(benchmark::State& state) {
    EnhancerContext ctx;
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_enhancer(PromptTemplateKind::EnhanceObject, "A red apple on a plinth", ctx));
    }
}
BENCHMARK(render_object_enhancer);
