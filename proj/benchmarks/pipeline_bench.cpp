#include "designflow/mock_providers.hpp"
#include "designflow/pipeline.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>

using namespace designflow;
namespace fs = std::filesystem;

static void auto_run(benchmark::State& state) {
    const fs::path root = fs::temp_directory_path() / "designflow-bench";
    fs::remove_all(root);
    Store store(root);
    Pipeline pipeline(make_mock_providers(3).providers(), store);
    AutoRunOptions opt;
    opt.n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(pipeline.run_auto("Poster for a spring market. Fresh and bright.", opt));
    }
    fs::remove_all(root);
}
BENCHMARK(auto_run)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

static void png_encode(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const std::string rgb(static_cast<std::size_t>(side) * side * 3, '\x7f');
    for (auto _ : state) benchmark::DoNotOptimize(encode_png_rgb(side, side, rgb));
}
BENCHMARK(png_encode)->Arg(512)->Arg(1024);
