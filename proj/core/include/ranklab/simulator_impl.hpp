#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "ranklab/errors.hpp"
#include "ranklab/rng.hpp"

namespace ranklab {

template <typename F>
void simulate_visit(const SimConfig& cfg, const CoefficientProfile& c, F&& on_snapshot) {
    cfg.validate();
    c.validate();
    if (c.n() != cfg.n)
        throw invalid_parameter("simulate: profile size does not match particle count");

    std::vector<double> pos(static_cast<std::size_t>(cfg.n));
    for (int i = 0; i < cfg.n; ++i)
        pos[static_cast<std::size_t>(i)] =
            cfg.initial_law.sample(cfg.seed, static_cast<std::uint64_t>(i));
    ParticleState state = make_state(std::move(pos), 0.0);

    const std::uint64_t total_steps =
        static_cast<std::uint64_t>(std::ceil(cfg.t_end / cfg.dt - 1e-9));

    // map each recording time to the first grid step at or after it
    std::vector<std::uint64_t> record_steps;
    record_steps.reserve(cfg.record_times.size());
    for (double r : cfg.record_times)
        record_steps.push_back(std::min(
            total_steps, static_cast<std::uint64_t>(std::ceil(std::max(0.0, r) / cfg.dt - 1e-9))));
    std::sort(record_steps.begin(), record_steps.end());

    std::vector<double> noise(static_cast<std::size_t>(cfg.n));
    std::size_t next_record = 0;
    for (std::uint64_t k = 0;; ++k) {
        while (next_record < record_steps.size() && record_steps[next_record] == k) {
            on_snapshot(state);
            ++next_record;
        }
        if (k == total_steps || next_record == record_steps.size()) break;
        for (int i = 0; i < cfg.n; ++i)
            noise[static_cast<std::size_t>(i)] =
                gaussian_draw(cfg.seed, static_cast<std::uint64_t>(i), k, RngPurpose::StepNoise);
        try {
            step_in_place(state, c, cfg.dt, noise);
        } catch (const numerical_failure& e) {
            throw numerical_failure(std::string(e.what()) + " at t = " +
                                    std::to_string(static_cast<double>(k) * cfg.dt));
        }
        state.t = static_cast<double>(k + 1) * cfg.dt;  // pin to the grid
    }
}

}  // namespace ranklab
