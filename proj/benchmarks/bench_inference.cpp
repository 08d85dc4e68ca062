#include <benchmark/benchmark.h>

#include "bifurc/pipeline.hpp"
#include "bifurc/synthetic.hpp"

using namespace bifurc;

namespace {

// per-pixel dual-branch throughput on a synthetic frame
MergedModel bench_model(int classes) {
    std::vector<Network<float>> nets;
    for (int i = 0; i < classes; ++i)
        nets.push_back(make_network<float>(ArchitectureSpec::medical(2), 900 + i));
    std::vector<std::string> names;
    for (int i = 0; i < classes; ++i) names.push_back("c" + std::to_string(i));
    return make_merged(nets, names, 1);
}

} // namespace

static void BM_InferDualBranch64(benchmark::State& state) {
    MergedModel model = bench_model(4);
    SyntheticSpec spec;
    Image image = synth_generate(spec, 1, 3)[0].image;
    for (auto _ : state) {
        BranchOutput out = infer(model, image, ChannelMode::Wce3);
        benchmark::DoNotOptimize(out.seg[0].bits.data());
    }
    state.counters["pixels/s"] = benchmark::Counter(
        64.0 * 64.0 * state.iterations(), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_InferDualBranch64);

static void BM_PatchGridExtraction(benchmark::State& state) {
    SyntheticSpec spec;
    Image image = synth_generate(spec, 1, 4)[0].image;
    PatchGrid grid(image, ChannelMode::Wce3);
    std::vector<float> buf(PatchDataset::kVolume);
    for (auto _ : state) {
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x) grid.patch_at(y, x, buf.data());
        benchmark::DoNotOptimize(buf.data());
    }
    state.counters["patches/s"] = benchmark::Counter(
        64.0 * 64.0 * state.iterations(), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_PatchGridExtraction);
