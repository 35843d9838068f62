// Serial reference kernels against their OpenMP counterparts.
//
//   ./build/kernels_bench --benchmark_filter=Dp
//   OMP_NUM_THREADS=8 ./build/kernels_bench

#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ttok/codec_quant.hpp"
#include "ttok/kernels.hpp"

namespace {

std::vector<double> lognormal_log10(std::size_t n, std::uint64_t seed = 7) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.5);
    std::vector<double> out(n);
    for (auto& v : out) v = std::log10(std::exp(normal(rng)) + 1e-6);
    return out;
}

void BM_BinCountsSerial(benchmark::State& state) {
    const auto u = lognormal_log10(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(ttok::kernels::reference::bin_counts(u, -6.0, 0.05, 256));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BinCountsOmp(benchmark::State& state) {
    const auto u = lognormal_log10(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(ttok::kernels::bin_counts(u, -6.0, 0.05, 256));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<double> centroids(std::size_t k) {
    std::vector<double> c(k);
    for (std::size_t j = 0; j < k; ++j) c[j] = -6.0 + 8.0 * static_cast<double>(j) / static_cast<double>(k);
    return c;
}

void BM_NearestSerial(benchmark::State& state) {
    const auto x = lognormal_log10(static_cast<std::size_t>(state.range(0)));
    const auto c = centroids(256);
    std::vector<std::uint32_t> out(x.size());
    for (auto _ : state) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = ttok::kernels::reference::nearest_centroid(x[i], c);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_NearestOmp(benchmark::State& state) {
    const auto x = lognormal_log10(static_cast<std::size_t>(state.range(0)));
    const auto c = centroids(256);
    for (auto _ : state) benchmark::DoNotOptimize(ttok::kernels::nearest_centroids(x, c));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

struct DpFixture {
    std::vector<double> x, w, prev, cur;
    std::vector<std::uint32_t> arg;
    ttok::kernels::SegmentCost cost;

    explicit DpFixture(std::size_t n)
        : x(sorted(n)), w(n, 1.0), prev(n + 1), cur(n + 1), arg(n + 1), cost(x, w) {
        for (std::size_t j = 1; j <= n; ++j) prev[j] = cost(0, j);
    }

    static std::vector<double> sorted(std::size_t n) {
        auto v = lognormal_log10(n);
        std::sort(v.begin(), v.end());
        return v;
    }
};

void BM_DpLayerSerial(benchmark::State& state) {
    DpFixture f(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        ttok::kernels::reference::dp_layer(f.cost, 1, f.prev, f.cur, f.arg);
        benchmark::DoNotOptimize(f.cur.data());
    }
}

void BM_DpLayerOmp(benchmark::State& state) {
    DpFixture f(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        ttok::kernels::dp_layer(f.cost, 1, f.prev, f.cur, f.arg);
        benchmark::DoNotOptimize(f.cur.data());
    }
}

void BM_RsqFit(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::lognormal_distribution<double> dist(0.0, 1.5);
    std::vector<double> values(static_cast<std::size_t>(state.range(0)));
    for (auto& v : values) v = dist(rng);
    const std::vector<std::size_t> ks{64, 64, 64, 64};
    for (auto _ : state) benchmark::DoNotOptimize(ttok::rsq_fit(values, ttok::ScaleKind::log10(), ks));
}

}  // namespace

BENCHMARK(BM_BinCountsSerial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_BinCountsOmp)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_NearestSerial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_NearestOmp)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_DpLayerSerial)->Arg(1 << 10)->Arg(1 << 12);
BENCHMARK(BM_DpLayerOmp)->Arg(1 << 10)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_RsqFit)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
