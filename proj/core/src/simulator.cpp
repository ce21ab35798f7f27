#include "ranklab/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "ranklab/errors.hpp"

namespace ranklab {

void ParticleState::recompute_ranks() {
    const int n_particles = n();
    order.resize(static_cast<std::size_t>(n_particles));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [this](int a, int b) {
        const double pa = positions[static_cast<std::size_t>(a)];
        const double pb = positions[static_cast<std::size_t>(b)];
        return pa < pb || (pa == pb && a < b);
    });
    rank_of.resize(static_cast<std::size_t>(n_particles));
    for (int k = 0; k < n_particles; ++k)
        rank_of[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k;
}

bool ParticleState::ranks_consistent() const {
    const int n_particles = n();
    if (static_cast<int>(rank_of.size()) != n_particles ||
        static_cast<int>(order.size()) != n_particles)
        return false;
    std::vector<bool> seen(static_cast<std::size_t>(n_particles), false);
    for (int i = 0; i < n_particles; ++i) {
        const int k = rank_of[static_cast<std::size_t>(i)];
        if (k < 0 || k >= n_particles || seen[static_cast<std::size_t>(k)]) return false;
        seen[static_cast<std::size_t>(k)] = true;
        if (order[static_cast<std::size_t>(k)] != i) return false;
    }
    for (int k = 1; k < n_particles; ++k)
        if (position_at_rank(k) < position_at_rank(k - 1)) return false;
    return true;
}

ParticleState make_state(std::vector<double> positions, double t) {
    if (positions.empty()) throw invalid_parameter("state needs at least one particle");
    for (double x : positions)
        if (!std::isfinite(x)) throw numerical_failure("non-finite particle position");
    ParticleState s;
    s.t = t;
    s.positions = std::move(positions);
    s.recompute_ranks();
    return s;
}

void SimConfig::validate() const {
    if (n < 1) throw invalid_parameter("sim: n must be >= 1");
    if (!(dt > 0.0)) throw invalid_parameter("sim: dt must be > 0");
    if (!(t_end >= dt)) throw invalid_parameter("sim: t_end must be >= dt");
    for (double r : record_times)
        if (r < 0.0 || r > t_end * (1.0 + 1e-12))
            throw invalid_parameter("sim: recording time outside [0, t_end]");
}

void step_in_place(ParticleState& state, const CoefficientProfile& c, double dt,
                   std::span<const double> noise) {
    const int n = state.n();
    if (c.n() != n) throw invalid_parameter("step: profile size does not match state");
    if (static_cast<int>(noise.size()) != n)
        throw invalid_parameter("step: noise vector size does not match state");
    if (!(dt > 0.0)) throw invalid_parameter("step: dt must be > 0");
    const double sqrt_dt = std::sqrt(dt);
    for (int i = 0; i < n; ++i) {
        const double g = noise[static_cast<std::size_t>(i)];
        if (!std::isfinite(g)) throw numerical_failure("non-finite noise");
        const int k = state.rank_of[static_cast<std::size_t>(i)];
        double& x = state.positions[static_cast<std::size_t>(i)];
        x += c.drifts[static_cast<std::size_t>(k)] * dt +
             c.diffusions[static_cast<std::size_t>(k)] * sqrt_dt * g;
        if (!std::isfinite(x)) throw numerical_failure("non-finite position");
    }
    state.recompute_ranks();
    state.t += dt;
    assert(state.ranks_consistent());
}

ParticleState step(const ParticleState& state, const CoefficientProfile& c, double dt,
                   std::span<const double> noise) {
    ParticleState out = state;
    step_in_place(out, c, dt, noise);
    return out;
}

std::vector<ParticleState> simulate(const SimConfig& cfg, const CoefficientProfile& c) {
    std::vector<ParticleState> snapshots;
    snapshots.reserve(cfg.record_times.size());
    simulate_visit(cfg, c, [&snapshots](const ParticleState& s) { snapshots.push_back(s); });
    return snapshots;
}

double empirical_cdf(const ParticleState& state, double x) {
    int lo = 0, hi = state.n();
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (state.position_at_rank(mid) <= x)
            lo = mid + 1;
        else
            hi = mid;
    }
    return static_cast<double>(lo) / static_cast<double>(state.n());
}

double empirical_quantile(const ParticleState& state, double v) {
    if (!(v > 0.0) || v > 1.0)
        throw std::domain_error("empirical_quantile: order must lie in (0,1]");
    const int n = state.n();
    int k = static_cast<int>(std::ceil(static_cast<double>(n) * v - 1e-9));
    k = std::clamp(k, 1, n);
    return state.position_at_rank(k - 1);
}

Observables observables(const ParticleState& state) {
    Observables o;
    const int n = state.n();
    o.center_of_mass =
        std::accumulate(state.positions.begin(), state.positions.end(), 0.0) / n;
    o.centered_positions.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        o.centered_positions[static_cast<std::size_t>(i)] =
            state.positions[static_cast<std::size_t>(i)] - o.center_of_mass;
    o.gaps.resize(static_cast<std::size_t>(std::max(0, n - 1)));
    for (int k = 0; k + 1 < n; ++k)
        o.gaps[static_cast<std::size_t>(k)] =
            state.position_at_rank(k + 1) - state.position_at_rank(k);
    return o;
}

}  // namespace ranklab
