#include <benchmark/benchmark.h>

#include "ranklab/initial_law.hpp"
#include "ranklab/pde.hpp"
#include "ranklab/profile.hpp"
#include "ranklab/waves.hpp"

using namespace ranklab;

static void BM_evolve_unit_time(benchmark::State& state) {
    const int nx = static_cast<int>(state.range(0));
    const int order = static_cast<int>(state.range(1));
    const auto mf = MeanFieldProfile({{0.0, 2.0}, {1.0, 0.0}}, {{0.0, 1.0}, {1.0, 1.0}});
    const auto g0 = init_grid(InitialLaw::gaussian(0.0, 1.0), -12.0, 14.0, nx);
    EvolveOptions opts;
    opts.flux_order = order;
    for (auto _ : state) {
        auto g = evolve(g0, mf, 0.05, opts);
        benchmark::DoNotOptimize(g.values.data());
    }
}
BENCHMARK(BM_evolve_unit_time)->Args({500, 1})->Args({500, 2})->Args({2000, 2});

static void BM_wave_cdf(benchmark::State& state) {
    const auto mf = MeanFieldProfile({{0.0, 2.0}, {1.0, 0.0}}, {{0.0, 1.0}, {1.0, 1.0}});
    const WaveProfile wave(mf, 0.0);
    double x = -8.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(wave.cdf(x));
        x += 0.001;
        if (x > 8.0) x = -8.0;
    }
}
BENCHMARK(BM_wave_cdf);

static void BM_psi_quadrature(benchmark::State& state) {
    const auto mf = MeanFieldProfile({{0.0, 2.0}, {1.0, 0.0}}, {{0.0, 1.0}, {1.0, 1.0}});
    double u = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(psi(mf, u));
        u += 0.0107;
        if (u >= 0.99) u = 0.01;
    }
}
BENCHMARK(BM_psi_quadrature);

BENCHMARK_MAIN();
