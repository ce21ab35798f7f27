#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ranklab/initial_law.hpp"
#include "ranklab/profile.hpp"

namespace ranklab {

/// Positions of the n-particle system at one instant, with the current
/// ranking. rank_of[i] is the 0-based rank of particle i; order[k] is the
/// particle holding rank k. Ties rank lower particle indices first.
struct ParticleState {
    double t = 0.0;
    std::vector<double> positions;
    std::vector<int> rank_of;
    std::vector<int> order;

    int n() const { return static_cast<int>(positions.size()); }
    double position_at_rank(int k) const { return positions[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]; }

    /// Reranks from the positions (stable in particle index).
    void recompute_ranks();
    /// True iff rank_of is a permutation consistent with sorted positions.
    bool ranks_consistent() const;
};

ParticleState make_state(std::vector<double> positions, double t = 0.0);

struct SimConfig {
    int n = 1;
    double dt = 1e-3;
    double t_end = 1.0;
    std::uint64_t seed = 0;
    InitialLaw initial_law = InitialLaw::point_mass(0.0);
    std::vector<double> record_times;  // snapshots at first grid time >= each entry

    void validate() const;
};

/// One Euler step: particle at rank k moves by b_k dt + sigma_k sqrt(dt) g,
/// then ranks are recomputed. Throws numerical_failure on non-finite input
/// or output.
ParticleState step(const ParticleState& state, const CoefficientProfile& c, double dt,
                   std::span<const double> noise);

/// In-place variant used by the driver loops.
void step_in_place(ParticleState& state, const CoefficientProfile& c, double dt,
                   std::span<const double> noise);

/// Euler trajectory with Philox noise: draw for particle i at step s is a
/// pure function of (seed, i, s), so runs are reproducible and independent
/// replicas just change the seed. Returns the recorded snapshots.
std::vector<ParticleState> simulate(const SimConfig& cfg, const CoefficientProfile& c);

/// Streaming variant: on_snapshot is called at every recording time.
template <typename F>
void simulate_visit(const SimConfig& cfg, const CoefficientProfile& c, F&& on_snapshot);

/// (1/n) #{i : X_i <= x}.
double empirical_cdf(const ParticleState& state, double x);

/// Smallest position with empirical CDF >= v, v in (0,1].
double empirical_quantile(const ParticleState& state, double v);

struct Observables {
    double center_of_mass = 0.0;
    std::vector<double> centered_positions;
    std::vector<double> gaps;  // nonnegative, length n-1
};

Observables observables(const ParticleState& state);

}  // namespace ranklab

#include "ranklab/simulator_impl.hpp"
