#include <benchmark/benchmark.h>

#include <vector>

#include "ranklab/profile.hpp"
#include "ranklab/rng.hpp"
#include "ranklab/simulator.hpp"

using namespace ranklab;

static void BM_philox_gaussian_fill(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::vector<double> noise(static_cast<std::size_t>(n));
    std::uint64_t step = 0;
    for (auto _ : state) {
        for (int i = 0; i < n; ++i)
            noise[static_cast<std::size_t>(i)] =
                gaussian_draw(42, static_cast<std::uint64_t>(i), step, RngPurpose::StepNoise);
        ++step;
        benchmark::DoNotOptimize(noise.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_philox_gaussian_fill)->Arg(100)->Arg(4000);

static void BM_euler_step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto mf = MeanFieldProfile({{0.0, 2.0}, {1.0, 0.0}}, {{0.0, 1.0}, {1.0, 1.0}});
    const auto c = discretize_meanfield(mf, n);
    std::vector<double> init(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) init[static_cast<std::size_t>(i)] = 0.001 * i;
    auto s = make_state(std::move(init));
    std::vector<double> noise(static_cast<std::size_t>(n));
    std::uint64_t step_idx = 0;
    for (auto _ : state) {
        for (int i = 0; i < n; ++i)
            noise[static_cast<std::size_t>(i)] = gaussian_draw(
                7, static_cast<std::uint64_t>(i), step_idx, RngPurpose::StepNoise);
        step_in_place(s, c, 1e-3, noise);
        ++step_idx;
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_euler_step)->Arg(2)->Arg(100)->Arg(4000);

BENCHMARK_MAIN();
