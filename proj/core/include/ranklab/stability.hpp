#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ranklab/profile.hpp"

namespace ranklab {

/// Margins alpha_m = sum_{k<=m} b_k - (m/n) sum_k b_k for m = 1..n-1.
/// The system is globally stable iff every margin is strictly positive;
/// margins within 1e-12 of zero count as not stable.
struct StabilityReport {
    bool globally_stable = true;
    std::vector<double> margins;
};

StabilityReport check_global_stability(const CoefficientProfile& c);

/// Consecutive-rank intervals that are internally stable, plus their
/// grouping into clouds of equal average drift.
struct ClusterPartition {
    struct Interval {
        int first = 0;  // 1-based rank, inclusive
        int last = 0;
    };
    std::vector<Interval> clusters;
    std::vector<double> cluster_avg_drifts;  // nondecreasing
    std::vector<Interval> clouds;            // intervals of cluster indices, 1-based
    std::vector<double> cloud_avg_drifts;    // strictly increasing
};

ClusterPartition cluster_partition(const CoefficientProfile& c, double drift_tol = 1e-9);

enum class GapLawKind { EqualVariance, SkewSymmetric };

/// Rates of the independent exponential stationary gaps,
/// lambda_k = 4 alpha_k / (sigma_k^2 + sigma_{k+1}^2).
struct GapLaw {
    std::vector<double> rates;
    GapLawKind kind = GapLawKind::EqualVariance;
};

/// Throws no_stationary_law if unstable, unsupported_variance when the
/// diffusions are neither all equal nor skew-symmetric.
GapLaw stationary_gap_law(const CoefficientProfile& c);

/// V(x) = -sum_k b_k x^(k) over the sorted coordinates; permutation invariant.
double potential_V(const CoefficientProfile& c, std::span<const double> x);

/// Unnormalized stationary density exp(-(2/sigma^2) V) on the zero-sum
/// hyperplane. Requires equal diffusions and global stability; coordinates
/// must sum to zero within 1e-9 * n.
double stationary_centered_density(const CoefficientProfile& c, std::span<const double> x_tilde);

/// Monte Carlo estimate of the normalizing constant of the centered
/// stationary density (no closed form is implemented). Importance-samples
/// gap vectors from widened exponentials; the result pairs the estimate
/// with its standard error.
struct NormalizerEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

NormalizerEstimate mc_normalizer(const CoefficientProfile& c, int samples, std::uint64_t seed);

enum class Recurrence { Ergodic, NullRecurrent };

struct CloudReport {
    int first_rank = 0;
    int last_rank = 0;
    double avg_drift = 0.0;
    int cluster_count = 0;
    Recurrence recurrence = Recurrence::Ergodic;
};

/// Long-time classification: each cloud is ergodic (single cluster) or
/// null recurrent (several); distinct clouds separate after an a.s.
/// finite time.
struct LongTimeReport {
    std::vector<CloudReport> clouds;
    bool clouds_separate = false;  // true iff more than one cloud
};

LongTimeReport classify_long_time(const CoefficientProfile& c, double drift_tol = 1e-9);

/// One line per cloud: "first..last avg_drift label".
std::string format_long_time_report(const LongTimeReport& r);

}  // namespace ranklab
