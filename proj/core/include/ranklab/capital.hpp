#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ranklab/profile.hpp"
#include "ranklab/waves.hpp"

namespace ranklab {

/// Ranked market weights of one configuration of log-capitalisations,
/// with the log-log coordinates of the capital distribution curve.
struct CapitalCurve {
    std::vector<double> weights;     // nonincreasing, positive, sum 1
    std::vector<double> log_rank;    // ln p, p = 1..n
    std::vector<double> log_weight;  // ln weights[p-1]

    int n() const { return static_cast<int>(weights.size()); }
};

/// Softmax of the positions (computed with max subtraction), sorted
/// nonincreasing. Adding a constant to every position leaves the curve
/// unchanged.
CapitalCurve market_weights(std::span<const double> positions);

/// CDF of the capital measure sum_p mu[p] delta_{p/n}: the mass held by
/// the largest floor(v n) companies.
double capital_measure_cdf(const CapitalCurve& curve, double v);

enum class Phase { Dilute, Aggregated, Critical };

struct PhaseResult {
    double lhs = 0.0;  // b_bar - b(1)
    double rhs = 0.0;  // sigma2(1) / 2
    Phase label = Phase::Critical;
    std::optional<double> theoretical_slope;  // -rhs / lhs, dilute phase only
};

/// Dilute when lhs > rhs + 1e-9, aggregated when lhs < rhs - 1e-9,
/// critical otherwise. Invariant under adding a constant to the drift.
PhaseResult classify_phase(const MeanFieldProfile& mf);

struct CapitalDensity {
    std::vector<double> v;
    std::vector<double> density;
    double normalizer = 0.0;
};

/// pi(v) = exp(q(1-v)) / int_0^1 exp(q(1-w)) dw for a quantile function q.
/// The normalizer is integrated on a geometric refinement ladder toward
/// w = 0; failure to converge across refinements raises non_integrable.
CapitalDensity meanfield_capital_density(const std::function<double(double)>& quantile_fn,
                                         std::span<const double> v_points);

struct StationaryCapitalDensity {
    bool dirac_at_zero = false;  // aggregated phase
    CapitalDensity density;      // meaningful iff !dirac_at_zero
};

/// Long-time capital density exp(Psi(1-v)) / Z in the dilute phase. The
/// aggregated phase returns the Dirac-at-zero marker; the critical phase
/// is refused with the measured normalizer growth rate attached.
StationaryCapitalDensity stationary_capital_density(const MeanFieldProfile& mf,
                                                    std::span<const double> v_points);

struct SlopeFit {
    double slope = 0.0;
    double std_error = 0.0;
    int points = 0;
};

/// Least-squares slope of the log-log curve over ranks 2..top_fraction*n
/// (rank 1 is excluded as a boundary effect). Needs at least 10 points.
SlopeFit loglog_slope(const CapitalCurve& curve, double top_fraction = 0.1);

}  // namespace ranklab
