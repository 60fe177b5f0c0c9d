#include <benchmark/benchmark.h>

#include <random>

#include "vesselprep/coarse_seg.hpp"
#include "vesselprep/edt.hpp"
#include "vesselprep/projection.hpp"
#include "vesselprep/skeleton.hpp"

using namespace vesselprep;

namespace {

BinaryMask3 random_mask_cube(std::int64_t n, double p) {
    BinaryMask3 m({n, n, n}, {});
    std::mt19937_64 rng(17);
    std::bernoulli_distribution dist(p);
    for (auto& b : m.bits) b = dist(rng) ? 1 : 0;
    return m;
}

}  // namespace

static void BM_ZProjections(benchmark::State& state) {
    const auto n = state.range(0);
    Volume3 v({n, n, n}, {});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (auto& x : v.data) x = u(rng);
    for (auto _ : state) {
        const ProjectionSet p = z_projections(v, 0);
        benchmark::DoNotOptimize(p.aip.pixels.data());
    }
    state.SetItemsProcessed(state.iterations() * v.dims.count());
}
BENCHMARK(BM_ZProjections)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_ConnectedComponents(benchmark::State& state) {
    const BinaryMask3 m = random_mask_cube(state.range(0), 0.2);
    for (auto _ : state) {
        const LabeledComponents c = connected_components_3d(m, 26);
        benchmark::DoNotOptimize(c.labels.data());
    }
    state.SetItemsProcessed(state.iterations() * m.dims.count());
}
BENCHMARK(BM_ConnectedComponents)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_ThresholdTopPercent(benchmark::State& state) {
    Volume3 v({state.range(0), state.range(0), state.range(0)}, {});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (auto& x : v.data) x = u(rng);
    for (auto _ : state) {
        const BinaryMask3 m = threshold_top_percent_3d(v, 0.05);
        benchmark::DoNotOptimize(m.bits.data());
    }
    state.SetItemsProcessed(state.iterations() * v.dims.count());
}
BENCHMARK(BM_ThresholdTopPercent)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_EdtSquared(benchmark::State& state) {
    const BinaryMask3 m = random_mask_cube(state.range(0), 0.01);
    for (auto _ : state) {
        const auto d2 = edt_squared(m, 0);
        benchmark::DoNotOptimize(d2.data());
    }
    state.SetItemsProcessed(state.iterations() * m.dims.count());
}
BENCHMARK(BM_EdtSquared)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_Skeletonize(benchmark::State& state) {
    // Tube-like mask: the realistic workload for clDice.
    const auto n = state.range(0);
    BinaryMask3 m({n, n, n}, {});
    const double c = (static_cast<double>(n) - 1.0) / 2.0;
    for (std::int64_t z = 2; z < n - 2; ++z)
        for (std::int64_t y = 0; y < n; ++y)
            for (std::int64_t x = 0; x < n; ++x) {
                const double dx = static_cast<double>(x) - c;
                const double dy = static_cast<double>(y) - c;
                if (dx * dx + dy * dy <= 9.0) m.set(x, y, z, true);
            }
    for (auto _ : state) {
        const BinaryMask3 s = skeletonize_3d(m);
        benchmark::DoNotOptimize(s.bits.data());
    }
}
BENCHMARK(BM_Skeletonize)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);
