#include <benchmark/benchmark.h>

#include "bifurc/gemm.hpp"
#include "bifurc/layers.hpp"
#include "bifurc/network.hpp"

using namespace bifurc;

namespace {

TensorF random_tensor(std::vector<int> shape, std::uint64_t seed) {
    TensorF t(std::move(shape));
    Rng rng(seed);
    for (auto& v : t.data) v = static_cast<float>(uniform01(rng) - 0.5);
    return t;
}

void flops_counters(benchmark::State& state, double flops_per_iter) {
    state.counters["GFLOP/s"] =
        benchmark::Counter(flops_per_iter * state.iterations() / 1e9, benchmark::Counter::kIsRate);
}

} // namespace

// hot GEMM shapes: digit-net conv2 (NN), FC1 batch forward (NT), FC1 grad (TN)

static void BM_GemmNN_Conv2Shape(benchmark::State& state) {
    const std::size_t M = 32, K = 576, N = 576;
    TensorF a = random_tensor({(int)M, (int)K}, 1);
    TensorF b = random_tensor({(int)K, (int)N}, 2);
    TensorF c({(int)M, (int)N});
    for (auto _ : state) {
        gemm_nn<float>(M, N, K, a.ptr(), K, b.ptr(), N, 0.f, c.ptr(), N);
        benchmark::DoNotOptimize(c.ptr());
    }
    flops_counters(state, 2.0 * M * N * K);
}
BENCHMARK(BM_GemmNN_Conv2Shape);

static void BM_GemmNT_Fc1Batch(benchmark::State& state) {
    const std::size_t M = 32, K = 18432, N = 200;
    TensorF a = random_tensor({(int)M, (int)K}, 3);
    TensorF b = random_tensor({(int)N, (int)K}, 4);
    TensorF c({(int)M, (int)N});
    for (auto _ : state) {
        gemm_nt<float>(M, N, K, a.ptr(), K, b.ptr(), K, 0.f, c.ptr(), N);
        benchmark::DoNotOptimize(c.ptr());
    }
    flops_counters(state, 2.0 * M * N * K);
}
BENCHMARK(BM_GemmNT_Fc1Batch);

static void BM_GemmTN_Fc1Grad(benchmark::State& state) {
    const std::size_t M = 200, K = 32, N = 18432;
    TensorF a = random_tensor({(int)K, (int)M}, 5);
    TensorF b = random_tensor({(int)K, (int)N}, 6);
    TensorF c({(int)M, (int)N});
    for (auto _ : state) {
        gemm_tn<float>(M, N, K, a.ptr(), M, b.ptr(), N, 0.f, c.ptr(), N);
        benchmark::DoNotOptimize(c.ptr());
    }
    flops_counters(state, 2.0 * M * N * K);
}
BENCHMARK(BM_GemmTN_Fc1Grad);

static void BM_ConvForward_DigitConv2(benchmark::State& state) {
    LayerWeights<float> layer = LayerWeights<float>::conv(32, 64, 3);
    Rng rng(7);
    he_init(layer, rng);
    TensorF input = random_tensor({8, 64, 26, 26}, 8);
    for (auto _ : state) {
        TensorF out = conv2d_forward_batch(input, layer);
        benchmark::DoNotOptimize(out.ptr());
    }
    flops_counters(state, 8 * 2.0 * 32 * 24 * 24 * 64 * 9);
}
BENCHMARK(BM_ConvForward_DigitConv2);

static void BM_ConvBackward_DigitConv2(benchmark::State& state) {
    LayerWeights<float> layer = LayerWeights<float>::conv(32, 64, 3);
    Rng rng(9);
    he_init(layer, rng);
    TensorF input = random_tensor({8, 64, 26, 26}, 10);
    TensorF grad = random_tensor({8, 32, 24, 24}, 11);
    for (auto _ : state) {
        LayerGrads<float> g = conv2d_backward_batch(grad, input, layer);
        benchmark::DoNotOptimize(g.input.ptr());
    }
    flops_counters(state, 8 * 3.0 * 2.0 * 32 * 24 * 24 * 64 * 9);
}
BENCHMARK(BM_ConvBackward_DigitConv2);

static void BM_TrainStep_DigitNet(benchmark::State& state) {
    Network<float> net = make_network<float>(ArchitectureSpec::mnist(10), 12);
    TensorF batch = random_tensor({32, 1, 28, 28}, 13);
    std::vector<int> labels(32);
    for (int i = 0; i < 32; ++i) labels[i] = i % 10;
    for (auto _ : state) {
        ForwardCache<float> cache;
        TensorF logits = net.forward_batch(batch, &cache);
        auto [loss, grad] = softmax_cross_entropy_batch(logits, labels);
        NetGradients<float> grads = net.backward_batch(cache, grad);
        net.sgd_update(grads, 0.0f);
        benchmark::DoNotOptimize(loss);
    }
    state.counters["samples/s"] = benchmark::Counter(
        32.0 * state.iterations(), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_TrainStep_DigitNet);

static void BM_TrainStep_PatchNet(benchmark::State& state) {
    Network<float> net = make_network<float>(ArchitectureSpec::medical(2), 14);
    TensorF batch = random_tensor({32, 3, 9, 9}, 15);
    std::vector<int> labels(32);
    for (int i = 0; i < 32; ++i) labels[i] = i % 2;
    for (auto _ : state) {
        ForwardCache<float> cache;
        TensorF logits = net.forward_batch(batch, &cache);
        auto [loss, grad] = softmax_cross_entropy_batch(logits, labels);
        NetGradients<float> grads = net.backward_batch(cache, grad);
        net.sgd_update(grads, 0.0f);
        benchmark::DoNotOptimize(loss);
    }
    state.counters["samples/s"] = benchmark::Counter(
        32.0 * state.iterations(), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_TrainStep_PatchNet);

BENCHMARK_MAIN();
