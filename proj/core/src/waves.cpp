#include "ranklab/waves.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ranklab/errors.hpp"

namespace ranklab {

namespace {

using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;

double wave_margin(const MeanFieldProfile& mf, double u) {
    return mf.flux_B(u) - mf.mean_drift() * u;
}

// Exact positivity of the margin on (0,1): the margin is piecewise
// quadratic, so it suffices to inspect knots, vertices and the one-sided
// behaviour at the endpoints where the margin vanishes identically.
bool oleinik_exact(const MeanFieldProfile& mf) {
    const double b_bar = mf.mean_drift();
    const auto& knots = mf.b_knots();
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double u0 = knots[i].first, u1 = knots[i + 1].first;
        const double g0 = wave_margin(mf, u0), g1 = wave_margin(mf, u1);
        const bool left_end = u0 == 0.0, right_end = u1 == 1.0;
        if (!left_end && !(g0 > 0.0)) return false;
        if (!right_end && !(g1 > 0.0)) return false;
        // margin' = b(u) - b_bar, linear on the segment; an interior
        // stationary point is a candidate minimum
        const double d0 = knots[i].second - b_bar;
        const double d1 = knots[i + 1].second - b_bar;
        if (d0 * d1 < 0.0) {
            const double uv = u0 + (u1 - u0) * (0.0 - d0) / (d1 - d0);
            if (uv > 0.0 && uv < 1.0 && !(wave_margin(mf, uv) > 0.0)) return false;
        }
        // endpoint with vanishing margin: positivity nearby needs the
        // one-sided derivative to point inward, or a positive curvature
        // when the derivative vanishes
        if (left_end) {
            if (d0 < 0.0) return false;
            if (d0 == 0.0 && d1 <= 0.0) return false;
        }
        if (right_end) {
            if (d1 > 0.0) return false;
            if (d1 == 0.0 && d0 >= 0.0) return false;
        }
    }
    return true;
}

double psi_integrand(const MeanFieldProfile& mf, double b_bar, double v) {
    return mf.sigma2(v) / (2.0 * (mf.flux_B(v) - b_bar * v));
}

// Quadrature of the wave integrand over [from, to]. Intervals that are
// short relative to their distance from the singular endpoints carry a
// nearly constant integrand; handling them non-adaptively avoids driving
// the subdivision to its depth limit chasing a relative tolerance on a
// near-zero value.
double psi_segment(const MeanFieldProfile& mf, double b_bar, double from, double to) {
    const double span = to - from;
    if (span == 0.0) return 0.0;
    const double lo = std::min(from, to), hi = std::max(from, to);
    const double scale = std::min(lo, 1.0 - hi);
    if (std::abs(span) < 1e-6 * scale)
        return span * psi_integrand(mf, b_bar, 0.5 * (from + to));
    double err = 0.0;
    return Quad::integrate([&](double v) { return psi_integrand(mf, b_bar, v); }, from, to,
                           12, 1e-10, &err);
}

}  // namespace

OleinikResult check_oleinik(const MeanFieldProfile& mf, int probe_count) {
    if (probe_count < 2) throw invalid_parameter("check_oleinik: probe_count too small");
    const double b_bar = mf.mean_drift();
    OleinikResult r;
    r.min_margin = INFINITY;
    auto consider = [&](double u) {
        if (u <= 0.0 || u >= 1.0) return;
        r.min_margin = std::min(r.min_margin, wave_margin(mf, u));
    };
    for (int i = 1; i <= probe_count; ++i)
        consider(static_cast<double>(i) / (probe_count + 1));
    const auto& knots = mf.b_knots();
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        consider(knots[i].first);
        const double d0 = knots[i].second - b_bar;
        const double d1 = knots[i + 1].second - b_bar;
        if (d0 * d1 < 0.0)
            consider(knots[i].first +
                     (knots[i + 1].first - knots[i].first) * (0.0 - d0) / (d1 - d0));
    }
    r.holds = r.min_margin > 0.0;
    return r;
}

double psi(const MeanFieldProfile& mf, double u) {
    if (u <= 0.0 || u >= 1.0)
        throw std::domain_error("psi: diverges at u = 0 and u = 1");
    if (!oleinik_exact(mf))
        throw undefined_wave("psi: the entropy condition fails, no travelling wave exists");
    return psi_segment(mf, mf.mean_drift(), 0.5, u);
}

WaveProfile::WaveProfile(const MeanFieldProfile& mf, double target_mean) : mf_(mf) {
    if (!oleinik_exact(mf_))
        throw undefined_wave(
            "wave_profile: the entropy condition fails, no travelling wave exists");
    speed_ = mf_.mean_drift();

    // u-grid: uniform core, geometric refinement toward both endpoints
    std::vector<double> lower, core, upper;
    for (double u = 0.1 * 0.85; u > 1e-12; u *= 0.85) lower.push_back(u);
    std::sort(lower.begin(), lower.end());
    for (int i = 0; i <= 320; ++i) core.push_back(0.1 + 0.8 * i / 320.0);
    for (double w = 0.1 * 0.85; w > 1e-12; w *= 0.85) upper.push_back(1.0 - w);
    std::sort(upper.begin(), upper.end());
    u_.clear();
    u_.insert(u_.end(), lower.begin(), lower.end());
    u_.insert(u_.end(), core.begin(), core.end());
    u_.insert(u_.end(), upper.begin(), upper.end());

    deriv_.resize(u_.size());
    for (std::size_t i = 0; i < u_.size(); ++i)
        deriv_[i] = psi_integrand(mf_, speed_, u_[i]);

    // integrate outward from 1/2
    const std::size_t mid =
        static_cast<std::size_t>(std::lower_bound(u_.begin(), u_.end(), 0.5) - u_.begin());
    psi_.assign(u_.size(), 0.0);
    psi_[mid] = psi_segment(mf_, speed_, 0.5, u_[mid]);
    for (std::size_t i = mid + 1; i < u_.size(); ++i)
        psi_[i] = psi_[i - 1] + psi_segment(mf_, speed_, u_[i - 1], u_[i]);
    for (std::size_t i = mid; i-- > 0;)
        psi_[i] = psi_[i + 1] - psi_segment(mf_, speed_, u_[i], u_[i + 1]);
    for (std::size_t i = 1; i < u_.size(); ++i)
        if (!(psi_[i] > psi_[i - 1]))
            throw numerical_failure("wave_profile: tabulated psi is not strictly increasing");

    // Tail slopes of psi against ln(u) resp. ln(1-u). The limits
    // sigma2(0) / (2 (b(0) - b_bar)) and sigma2(1) / (2 (b_bar - b(1)))
    // are exact when the margin has a simple zero; the tabulated
    // derivative there is useless, B(u) - b_bar u cancels catastrophically
    // within 1e-12 of the endpoints. Degenerate margins fall back to a
    // finite difference on the deepest knots.
    {
        const double dlo = mf_.b(0.0) - speed_;
        const double dhi = speed_ - mf_.b(1.0);
        tail_slope_lo_ = dlo > 1e-9 ? mf_.sigma2(0.0) / (2.0 * dlo)
                                    : u_.front() * deriv_.front();
        const std::size_t last = u_.size() - 1;
        tail_slope_hi_ = dhi > 1e-9 ? mf_.sigma2(1.0) / (2.0 * dhi)
                                    : (1.0 - u_[last]) * deriv_[last];
    }

    // Mean of the c = 0 law: int_0^1 psi du over the table plus the
    // logarithmic tail stubs.
    {
        const std::size_t k = u_.size();
        // u * psi must vanish at the ends; a logarithmic tail leaves
        // ~1e-10 at the last knots while a divergent one leaves O(1)
        if (std::abs(u_[0] * psi_[0]) > 1e-6)
            throw non_integrable("wave_profile: lower tail has no finite mean");
        if (std::abs((1.0 - u_[k - 1]) * psi_[k - 1]) > 1e-6)
            throw non_integrable("wave_profile: upper tail has no finite mean");
        double m = 0.0;
        for (std::size_t i = 1; i < k; ++i)
            m += 0.5 * (psi_[i] + psi_[i - 1]) * (u_[i] - u_[i - 1]);
        // stub below u_[0]: psi ~ psi_0 + s ln(u/u_0)
        m += u_[0] * (psi_[0] - tail_slope_lo_);
        // stub above the last knot: psi ~ psi_last + s ln(w_last/(1-u))
        m += (1.0 - u_[k - 1]) * (psi_[k - 1] + tail_slope_hi_);
        mean_ = m;
    }
    shift_ = mean_ - target_mean;
    mean_ = target_mean;
}

// Cubic Hermite between knots. The tabulated derivative is exact, so the
// core (uniform in u) and the tails (interpolated in log coordinates,
// where psi is nearly linear) are both accurate to ~1e-6 psi units or
// better; the construction quadrature pins the knot values themselves.
double WaveProfile::psi_at(double u) const {
    if (u <= 0.0 || u >= 1.0)
        throw std::domain_error("psi_at: diverges at u = 0 and u = 1");
    if (u < u_.front()) return psi_.front() + tail_slope_lo_ * std::log(u / u_.front());
    if (u > u_.back())
        return psi_.back() + tail_slope_hi_ * std::log((1.0 - u_.back()) / (1.0 - u));
    const auto it = std::lower_bound(u_.begin(), u_.end(), u);
    std::size_t j = static_cast<std::size_t>(it - u_.begin());
    if (u_[j] == u) return psi_[j];
    const std::size_t i = j - 1;

    double t0, t1, t, d0, d1;
    if (u_[i] >= 0.1 && u_[j] <= 0.9) {  // linear coordinate
        t0 = u_[i];
        t1 = u_[j];
        t = u;
        d0 = deriv_[i];
        d1 = deriv_[j];
    } else if (u_[j] <= 0.5) {  // log(u) coordinate
        t0 = std::log(u_[i]);
        t1 = std::log(u_[j]);
        t = std::log(u);
        d0 = u_[i] * deriv_[i];
        d1 = u_[j] * deriv_[j];
    } else {  // log(1-u) coordinate, decreasing in u: flip the sign
        t0 = -std::log(1.0 - u_[i]);
        t1 = -std::log(1.0 - u_[j]);
        t = -std::log(1.0 - u);
        d0 = (1.0 - u_[i]) * deriv_[i];
        d1 = (1.0 - u_[j]) * deriv_[j];
    }
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * psi_[i] + (s3 - 2.0 * s2 + s) * h * d0 +
           (-2.0 * s3 + 3.0 * s2) * psi_[j] + (s3 - s2) * h * d1;
}

double WaveProfile::psi_at_one_minus(double w) const {
    if (w <= 0.0 || w >= 1.0)
        throw std::domain_error("psi_at_one_minus: diverges at w = 0 and w = 1");
    const double w_last = 1.0 - u_.back();
    if (w < w_last) return psi_.back() + tail_slope_hi_ * std::log(w_last / w);
    return psi_at(1.0 - w);
}

double WaveProfile::psi_inverse(double y) const {
    if (y <= psi_.front()) {
        // tail asymptote, saturating toward 0
        const double u = u_.front() * std::exp((y - psi_.front()) / tail_slope_lo_);
        return std::max(u, 1e-300);
    }
    if (y >= psi_.back()) {
        const double w = (1.0 - u_.back()) * std::exp(-(y - psi_.back()) / tail_slope_hi_);
        return 1.0 - std::max(w, 1e-300);
    }
    const auto it = std::lower_bound(psi_.begin(), psi_.end(), y);
    const std::size_t j = static_cast<std::size_t>(it - psi_.begin());
    double lo = u_[j - 1];
    double hi = u_[j];
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (psi_at(mid) < y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double WaveProfile::cdf(double x) const { return psi_inverse(x + shift_); }

double WaveProfile::quantile(double u) const { return psi_at(u) - shift_; }

WaveProfile wave_profile(const MeanFieldProfile& mf, double target_mean) {
    return WaveProfile(mf, target_mean);
}

std::vector<WaveStabilityPoint> stability_experiment(
    const MeanFieldProfile& mf, const std::function<double(double)>& m_cdf, double m_mean,
    double horizon, double x_min, double x_max, int nx,
    const std::vector<double>& record_times, const EvolveOptions& opts,
    std::optional<double> wave_mean) {
    const WaveProfile wave(mf, wave_mean.value_or(m_mean));
    if (std::abs(m_mean - wave.mean()) > 1e-6)
        throw invalid_parameter("stability_experiment: initial mean does not match the wave");
    std::vector<double> times = record_times;
    std::sort(times.begin(), times.end());
    if (!times.empty() && (times.front() < 0.0 || times.back() > horizon))
        throw invalid_parameter("stability_experiment: recording times outside [0, horizon]");

    GridCDF g = init_grid_from_cdf(m_cdf, x_min, x_max, nx);
    std::vector<WaveStabilityPoint> series;
    series.reserve(times.size());
    for (double t : times) {
        g = evolve(g, mf, t, opts);
        const double speed = wave.speed();
        const double d =
            l1_distance(g, [&wave, speed, t](double x) { return wave.cdf(x - speed * t); });
        series.push_back({t, d});
    }
    return series;
}

}  // namespace ranklab
