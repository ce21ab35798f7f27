#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ranklab/pde.hpp"
#include "ranklab/profile.hpp"

namespace ranklab {

struct OleinikResult {
    bool holds = false;
    double min_margin = 0.0;
};

/// Entropy condition B(u) > b_bar * u on (0,1). Evaluates the margin on a
/// uniform probe grid plus every knot and interior quadratic vertex, so
/// the reported minimum is exact for tabulated profiles up to probe
/// resolution. Endpoints are excluded (the margin vanishes there).
OleinikResult check_oleinik(const MeanFieldProfile& mf, int probe_count = 10000);

/// Psi(u) = int_{1/2}^u sigma2(v) / (2 (B(v) - b_bar v)) dv, the inverse
/// travelling-wave profile. Diverges logarithmically at 0 and 1.
double psi(const MeanFieldProfile& mf, double u);

/// Travelling wave phi(x) = Psi^{-1}(x + c) moving at speed b_bar, with c
/// chosen so the wave law has the requested mean. Holds a tabulation of
/// Psi refined geometrically toward 0 and 1; beyond the last knots the
/// logarithmic tail asymptote is used.
class WaveProfile {
  public:
    WaveProfile(const MeanFieldProfile& mf, double target_mean);

    double speed() const { return speed_; }
    double shift() const { return shift_; }
    double mean() const { return mean_; }

    /// Psi at u in (0,1) via the tabulation (tail asymptotes outside it).
    double psi_at(double u) const;
    /// Psi(1 - w) evaluated stably for w far below the resolution of
    /// double(1 - w).
    double psi_at_one_minus(double w) const;
    /// Psi^{-1}(y): monotone bracketing on the tabulation, bisection to
    /// 1e-12 in u; extreme y saturates toward 0/1 on the tail asymptotes.
    double psi_inverse(double y) const;

    /// The wave CDF phi(x) = Psi^{-1}(x + c).
    double cdf(double x) const;
    /// Quantile of the wave law: Psi(u) - c.
    double quantile(double u) const;

    const std::vector<double>& table_u() const { return u_; }
    const std::vector<double>& table_psi() const { return psi_; }

    const MeanFieldProfile& profile() const { return mf_; }

  private:
    MeanFieldProfile mf_;
    double speed_ = 0.0;
    double shift_ = 0.0;  // c
    double mean_ = 0.0;
    std::vector<double> u_;
    std::vector<double> psi_;
    std::vector<double> deriv_;   // exact d psi / du at the knots
    double tail_slope_lo_ = 0.0;  // d psi / d ln u near 0
    double tail_slope_hi_ = 0.0;  // d psi / d ln(1-u) near 1 (negated)
};

WaveProfile wave_profile(const MeanFieldProfile& mf, double target_mean);

struct WaveStabilityPoint {
    double t = 0.0;
    double l1 = 0.0;
};

/// Evolves the law m under the conservation law and reports the L1
/// distance to the translated wave at each recording time. The wave is
/// selected by matching means; a mismatch beyond 1e-6 is refused.
std::vector<WaveStabilityPoint> stability_experiment(
    const MeanFieldProfile& mf, const std::function<double(double)>& m_cdf, double m_mean,
    double horizon, double x_min, double x_max, int nx,
    const std::vector<double>& record_times, const EvolveOptions& opts = {},
    std::optional<double> wave_mean = std::nullopt);

}  // namespace ranklab
