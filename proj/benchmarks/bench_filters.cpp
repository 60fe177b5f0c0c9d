#include <benchmark/benchmark.h>

#include <random>

#include "vesselprep/convolve.hpp"
#include "vesselprep/eigen3.hpp"
#include "vesselprep/frangi.hpp"

using namespace vesselprep;

namespace {

Volume3 random_cube(std::int64_t n) {
    Volume3 v({n, n, n}, {});
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (auto& x : v.data) x = u(rng);
    return v;
}

}  // namespace

static void BM_CorrelateAxis(benchmark::State& state) {
    const auto n = state.range(0);
    const Volume3 v = random_cube(n);
    const Kernel1D k = gaussian_kernel(2.0);
    std::vector<float> out(v.data.size());
    const int threads = static_cast<int>(state.range(1));
    for (auto _ : state) {
        correlate_axis(v.data, out, v.dims, 0, k, threads);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * v.dims.count());
}
BENCHMARK(BM_CorrelateAxis)->Args({64, 1})->Args({128, 1})->Args({128, 2})->Unit(benchmark::kMillisecond);

static void BM_GaussianHessian(benchmark::State& state) {
    const Volume3 v = random_cube(state.range(0));
    const FrangiParams params;
    for (auto _ : state) {
        const HessianField h = gaussian_hessian(v, 2.0, params, 0);
        benchmark::DoNotOptimize(h.ixx.data());
    }
    state.SetItemsProcessed(state.iterations() * v.dims.count());
}
BENCHMARK(BM_GaussianHessian)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_Eigen3Batch(benchmark::State& state) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::array<double, 6>> mats(100000);
    for (auto& m : mats)
        m = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    for (auto _ : state) {
        double acc = 0.0;
        for (const auto& m : mats) {
            const EigenTriple e = eigen3_symmetric(m[0], m[1], m[2], m[3], m[4], m[5]);
            acc += e.lam3;
        }
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mats.size()));
}
BENCHMARK(BM_Eigen3Batch);

static void BM_FrangiMultiscale(benchmark::State& state) {
    const Volume3 v = random_cube(state.range(0));
    FrangiParams params;
    params.scales = {1.0, 2.0, 4.0};
    for (auto _ : state) {
        const Volume3 vei = frangi_multiscale(v, params, 0);
        benchmark::DoNotOptimize(vei.data.data());
    }
    state.SetItemsProcessed(state.iterations() * v.dims.count());
}
BENCHMARK(BM_FrangiMultiscale)->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);
