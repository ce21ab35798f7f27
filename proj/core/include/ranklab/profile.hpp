#pragma once

#include <cstddef>
#include <vector>

namespace ranklab {

/// Per-rank drift and diffusion coefficients of a finite system.
/// Rank k (1-based in formulas) lives at index k-1.
struct CoefficientProfile {
    std::vector<double> drifts;      // position / time
    std::vector<double> diffusions;  // position / sqrt(time), all > 0

    int n() const { return static_cast<int>(drifts.size()); }

    /// Throws invalid_profile unless sizes match, n >= 1 and diffusions > 0.
    void validate() const;
};

/// Lowest-ranked particle gets drift n*gamma, everyone diffuses with unit
/// coefficient.
CoefficientProfile make_atlas(int n, double gamma);

/// Continuous drift/squared-diffusion profiles on [0,1], stored as
/// piecewise-linear tables. Knot abscissae are strictly increasing and
/// cover both endpoints; evaluation between knots interpolates linearly
/// and integrals are computed exactly segment by segment.
class MeanFieldProfile {
  public:
    /// Knot pairs (u, value). sigma2 must be strictly positive at every knot.
    MeanFieldProfile(std::vector<std::pair<double, double>> b_knots,
                     std::vector<std::pair<double, double>> sigma2_knots);

    double b(double u) const;
    double sigma2(double u) const;

    /// B(u) = integral of b over [0,u]; exact for the tabulated profile.
    double flux_B(double u) const;
    /// A(u) = half the integral of sigma2 over [0,u].
    double viscosity_A(double u) const;
    /// Integral of max(b,0) over [0,u]; used by flux splitting.
    double flux_B_plus(double u) const;
    /// Integral of min(b,0) over [0,u].
    double flux_B_minus(double u) const;

    /// b_bar = B(1), the constant transport speed of the limit law.
    double mean_drift() const { return flux_B(1.0); }

    double max_abs_drift() const { return max_abs_b_; }
    double max_sigma2() const { return max_sigma2_; }
    double min_sigma2() const { return min_sigma2_; }

    /// Largest |slope| over the drift table (Lipschitz constant).
    double drift_lipschitz() const;

    const std::vector<std::pair<double, double>>& b_knots() const { return b_knots_; }
    const std::vector<std::pair<double, double>>& sigma2_knots() const { return sigma2_knots_; }

  private:
    std::vector<std::pair<double, double>> b_knots_;
    std::vector<std::pair<double, double>> sigma2_knots_;
    // cumulative exact integrals at knot abscissae
    std::vector<double> cum_b_;
    std::vector<double> cum_b_plus_;
    std::vector<double> cum_b_minus_;
    std::vector<double> cum_a_;
    double max_abs_b_ = 0.0;
    double max_sigma2_ = 0.0;
    double min_sigma2_ = 0.0;
};

/// drifts[k-1] = b(k/n), diffusions[k-1] = sqrt(sigma2(k/n)).
CoefficientProfile discretize_meanfield(const MeanFieldProfile& mf, int n);

/// Free-function forms of the profile integrals.
double flux_B(const MeanFieldProfile& mf, double u);
double viscosity_A(const MeanFieldProfile& mf, double u);
double mean_drift(const MeanFieldProfile& mf);

/// Mean-field stand-in for the Atlas model: a triangular drift spike of
/// integral gamma supported on [0, width], unit squared diffusion. The
/// width is a modelling choice with no canonical value.
MeanFieldProfile make_smoothed_atlas(double gamma, double width);

}  // namespace ranklab
