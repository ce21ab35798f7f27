#include "ranklab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ranklab/errors.hpp"

namespace ranklab {

void CoefficientProfile::validate() const {
    if (drifts.empty())
        throw invalid_profile("coefficient profile needs at least one rank");
    if (drifts.size() != diffusions.size())
        throw invalid_profile("drift and diffusion arrays differ in length");
    for (double s : diffusions)
        if (!(s > 0.0)) throw invalid_profile("diffusion coefficients must be > 0");
    for (double b : drifts)
        if (!std::isfinite(b)) throw invalid_profile("non-finite drift coefficient");
}

CoefficientProfile make_atlas(int n, double gamma) {
    if (n < 1) throw invalid_parameter("atlas: n must be >= 1");
    if (!(gamma > 0.0)) throw invalid_parameter("atlas: gamma must be > 0");
    CoefficientProfile c;
    c.drifts.assign(static_cast<std::size_t>(n), 0.0);
    c.drifts[0] = static_cast<double>(n) * gamma;
    c.diffusions.assign(static_cast<std::size_t>(n), 1.0);
    return c;
}

namespace {

void check_knots(const std::vector<std::pair<double, double>>& knots, const char* what) {
    if (knots.size() < 2)
        throw invalid_profile(std::string(what) + ": need at least two knots");
    if (knots.front().first != 0.0 || knots.back().first != 1.0)
        throw invalid_profile(std::string(what) + ": knots must cover u = 0 and u = 1");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i].first > knots[i - 1].first))
            throw invalid_profile(std::string(what) + ": knot abscissae must be strictly increasing");
    for (const auto& [u, v] : knots)
        if (!std::isfinite(u) || !std::isfinite(v))
            throw invalid_profile(std::string(what) + ": non-finite knot");
}

double interp(const std::vector<std::pair<double, double>>& knots, double u) {
    if (u < 0.0 || u > 1.0)
        throw std::domain_error("profile evaluated outside [0,1]");
    auto it = std::upper_bound(knots.begin(), knots.end(), u,
                               [](double x, const auto& k) { return x < k.first; });
    if (it == knots.begin()) return knots.front().second;
    if (it == knots.end()) return knots.back().second;
    const auto& [u1, v1] = *it;
    const auto& [u0, v0] = *(it - 1);
    const double w = (u - u0) / (u1 - u0);
    return v0 + w * (v1 - v0);
}

// Exact integral of the linear segment (u0,v0)-(u1,v1) over [u0, t].
double segment_integral(double u0, double v0, double u1, double v1, double t) {
    const double w = (t - u0) / (u1 - u0);
    const double vt = v0 + w * (v1 - v0);
    return 0.5 * (v0 + vt) * (t - u0);
}

// Same, but of max(v,0): splits at the sign crossing when there is one.
double segment_integral_plus(double u0, double v0, double u1, double v1, double t) {
    const double w = (t - u0) / (u1 - u0);
    const double vt = v0 + w * (v1 - v0);
    if (v0 >= 0.0 && vt >= 0.0) return 0.5 * (v0 + vt) * (t - u0);
    if (v0 <= 0.0 && vt <= 0.0) return 0.0;
    const double uz = u0 + (u1 - u0) * (0.0 - v0) / (v1 - v0);  // sign change
    if (v0 > 0.0) return 0.5 * v0 * (uz - u0);
    return 0.5 * vt * (t - uz);
}

double segment_integral_minus(double u0, double v0, double u1, double v1, double t) {
    return segment_integral(u0, v0, u1, v1, t) - segment_integral_plus(u0, v0, u1, v1, t);
}

double eval_cumulative(const std::vector<std::pair<double, double>>& knots,
                       const std::vector<double>& cum, double u,
                       double (*partial)(double, double, double, double, double)) {
    if (u < 0.0 || u > 1.0)
        throw std::domain_error("profile integral evaluated outside [0,1]");
    auto it = std::upper_bound(knots.begin(), knots.end(), u,
                               [](double x, const auto& k) { return x < k.first; });
    if (it == knots.begin()) return 0.0;
    const std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
    if (i + 1 >= knots.size()) return cum.back();
    return cum[i] + partial(knots[i].first, knots[i].second,
                            knots[i + 1].first, knots[i + 1].second, u);
}

}  // namespace

MeanFieldProfile::MeanFieldProfile(std::vector<std::pair<double, double>> b_knots,
                                   std::vector<std::pair<double, double>> sigma2_knots)
    : b_knots_(std::move(b_knots)), sigma2_knots_(std::move(sigma2_knots)) {
    check_knots(b_knots_, "b");
    check_knots(sigma2_knots_, "sigma2");
    for (const auto& [u, v] : sigma2_knots_)
        if (!(v > 0.0)) throw invalid_profile("sigma2 must be strictly positive");

    cum_b_.assign(b_knots_.size(), 0.0);
    cum_b_plus_.assign(b_knots_.size(), 0.0);
    cum_b_minus_.assign(b_knots_.size(), 0.0);
    for (std::size_t i = 1; i < b_knots_.size(); ++i) {
        const auto& [u0, v0] = b_knots_[i - 1];
        const auto& [u1, v1] = b_knots_[i];
        cum_b_[i] = cum_b_[i - 1] + segment_integral(u0, v0, u1, v1, u1);
        cum_b_plus_[i] = cum_b_plus_[i - 1] + segment_integral_plus(u0, v0, u1, v1, u1);
        cum_b_minus_[i] = cum_b_minus_[i - 1] + segment_integral_minus(u0, v0, u1, v1, u1);
    }
    cum_a_.assign(sigma2_knots_.size(), 0.0);
    for (std::size_t i = 1; i < sigma2_knots_.size(); ++i) {
        const auto& [u0, v0] = sigma2_knots_[i - 1];
        const auto& [u1, v1] = sigma2_knots_[i];
        cum_a_[i] = cum_a_[i - 1] + 0.5 * segment_integral(u0, v0, u1, v1, u1);
    }

    max_abs_b_ = 0.0;
    for (const auto& [u, v] : b_knots_) max_abs_b_ = std::max(max_abs_b_, std::abs(v));
    max_sigma2_ = sigma2_knots_.front().second;
    min_sigma2_ = sigma2_knots_.front().second;
    for (const auto& [u, v] : sigma2_knots_) {
        max_sigma2_ = std::max(max_sigma2_, v);
        min_sigma2_ = std::min(min_sigma2_, v);
    }
}

double MeanFieldProfile::b(double u) const { return interp(b_knots_, u); }
double MeanFieldProfile::sigma2(double u) const { return interp(sigma2_knots_, u); }

double MeanFieldProfile::flux_B(double u) const {
    return eval_cumulative(b_knots_, cum_b_, u, segment_integral);
}

double MeanFieldProfile::flux_B_plus(double u) const {
    return eval_cumulative(b_knots_, cum_b_plus_, u, segment_integral_plus);
}

double MeanFieldProfile::flux_B_minus(double u) const {
    return eval_cumulative(b_knots_, cum_b_minus_, u, segment_integral_minus);
}

double MeanFieldProfile::viscosity_A(double u) const {
    if (u < 0.0 || u > 1.0)
        throw std::domain_error("profile integral evaluated outside [0,1]");
    auto it = std::upper_bound(sigma2_knots_.begin(), sigma2_knots_.end(), u,
                               [](double x, const auto& k) { return x < k.first; });
    if (it == sigma2_knots_.begin()) return 0.0;
    const std::size_t i = static_cast<std::size_t>(it - sigma2_knots_.begin()) - 1;
    if (i + 1 >= sigma2_knots_.size()) return cum_a_.back();
    return cum_a_[i] + 0.5 * segment_integral(sigma2_knots_[i].first, sigma2_knots_[i].second,
                                              sigma2_knots_[i + 1].first,
                                              sigma2_knots_[i + 1].second, u);
}

double MeanFieldProfile::drift_lipschitz() const {
    double lip = 0.0;
    for (std::size_t i = 1; i < b_knots_.size(); ++i) {
        const double slope = (b_knots_[i].second - b_knots_[i - 1].second) /
                             (b_knots_[i].first - b_knots_[i - 1].first);
        lip = std::max(lip, std::abs(slope));
    }
    return lip;
}

CoefficientProfile discretize_meanfield(const MeanFieldProfile& mf, int n) {
    if (n < 1) throw invalid_parameter("discretize_meanfield: n must be >= 1");
    CoefficientProfile c;
    c.drifts.resize(static_cast<std::size_t>(n));
    c.diffusions.resize(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(n);
        const double s2 = mf.sigma2(u);
        if (!(s2 > 0.0)) throw invalid_profile("sigma2 non-positive at k/n");
        c.drifts[static_cast<std::size_t>(k - 1)] = mf.b(u);
        c.diffusions[static_cast<std::size_t>(k - 1)] = std::sqrt(s2);
    }
    return c;
}

double flux_B(const MeanFieldProfile& mf, double u) { return mf.flux_B(u); }
double viscosity_A(const MeanFieldProfile& mf, double u) { return mf.viscosity_A(u); }
double mean_drift(const MeanFieldProfile& mf) { return mf.mean_drift(); }

MeanFieldProfile make_smoothed_atlas(double gamma, double width) {
    if (!(gamma > 0.0)) throw invalid_parameter("smoothed_atlas: gamma must be > 0");
    if (!(width > 0.0) || width >= 1.0)
        throw invalid_parameter("smoothed_atlas: width must lie in (0,1)");
    // triangle of height 2*gamma/width on [0,width]: area gamma
    const double peak = 2.0 * gamma / width;
    return MeanFieldProfile({{0.0, peak}, {width, 0.0}, {1.0, 0.0}},
                            {{0.0, 1.0}, {1.0, 1.0}});
}

}  // namespace ranklab
