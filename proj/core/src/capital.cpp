#include "ranklab/capital.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ranklab/errors.hpp"

namespace ranklab {

CapitalCurve market_weights(std::span<const double> positions) {
    if (positions.empty()) throw invalid_parameter("market_weights: no positions");
    for (double x : positions)
        if (!std::isfinite(x)) throw invalid_parameter("market_weights: non-finite position");
    const double xmax = *std::max_element(positions.begin(), positions.end());
    CapitalCurve c;
    c.weights.resize(positions.size());
    double total = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        c.weights[i] = std::exp(positions[i] - xmax);
        total += c.weights[i];
    }
    for (double& w : c.weights) w /= total;
    std::sort(c.weights.begin(), c.weights.end(), std::greater<>());
    c.log_rank.resize(c.weights.size());
    c.log_weight.resize(c.weights.size());
    for (std::size_t p = 0; p < c.weights.size(); ++p) {
        c.log_rank[p] = std::log(static_cast<double>(p + 1));
        c.log_weight[p] = std::log(c.weights[p]);
    }
    return c;
}

double capital_measure_cdf(const CapitalCurve& curve, double v) {
    if (v < 0.0 || v > 1.0)
        throw std::domain_error("capital_measure_cdf: v must lie in [0,1]");
    const int n = curve.n();
    const int k = std::clamp(
        static_cast<int>(std::floor(v * static_cast<double>(n) + 1e-12)), 0, n);
    return std::accumulate(curve.weights.begin(), curve.weights.begin() + k, 0.0);
}

PhaseResult classify_phase(const MeanFieldProfile& mf) {
    constexpr double tol = 1e-9;
    PhaseResult r;
    r.lhs = mf.mean_drift() - mf.b(1.0);
    r.rhs = 0.5 * mf.sigma2(1.0);
    if (r.lhs > r.rhs + tol) {
        r.label = Phase::Dilute;
        r.theoretical_slope = -r.rhs / r.lhs;
    } else if (r.lhs < r.rhs - tol) {
        r.label = Phase::Aggregated;
    } else {
        r.label = Phase::Critical;
    }
    return r;
}

namespace {

// Adaptive Simpson, recursion on absolute tolerance.
double simpson_rec(const std::function<double(double)>& f, double a, double fa, double b,
                   double fb, double fm, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

double simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, fa, b, fb, fm, whole, tol, 30);
}

struct LadderResult {
    bool converged = false;
    double value = 0.0;
    double growth = 0.0;  // last segment-to-segment ratio
};

// integral over (0, 1] of f with a possible power singularity at 0:
// segments [2^-(j+1), 2^-j]; a stable segment ratio < 1 is extrapolated
// geometrically, a ratio that refuses to fall below 1 means divergence.
LadderResult ladder_integral(const std::function<double(double)>& f, int max_depth) {
    LadderResult r;
    double total = simpson(f, 0.5, 1.0, 1e-12);
    double prev = -1.0;
    int flat = 0;
    for (int j = 1; j <= max_depth; ++j) {
        const double hi = std::ldexp(1.0, -j);
        const double lo = 0.5 * hi;
        const double seg = simpson(f, lo, hi, 1e-14);
        total += seg;
        const double ratio = prev > 0.0 ? seg / prev : 0.0;
        r.growth = ratio;
        if (prev > 0.0 && ratio >= 0.98) {
            if (++flat >= 4) return r;  // not converging
        } else {
            flat = 0;
        }
        if (prev > 0.0 && ratio < 0.95 && seg <= 1e-13 * total) {
            total += seg * ratio / (1.0 - ratio);  // geometric remainder
            r.converged = true;
            r.value = total;
            return r;
        }
        prev = seg;
    }
    // ran out of depth with a decaying but slow tail: extrapolate if sane
    if (prev > 0.0 && r.growth < 0.98) {
        total += prev * r.growth / (1.0 - r.growth);
        r.converged = true;
        r.value = total;
    }
    return r;
}

}  // namespace

CapitalDensity meanfield_capital_density(const std::function<double(double)>& quantile_fn,
                                         std::span<const double> v_points) {
    for (double v : v_points)
        if (!(v > 0.0) || !(v < 1.0))
            throw std::domain_error("meanfield_capital_density: v must lie in (0,1)");
    // w is the distance from the top rank; double(1 - w) resolves w down
    // to ~1e-13, which bounds the ladder depth here. The w = 1 endpoint is
    // nudged inside the open interval.
    auto f = [&quantile_fn](double w) {
        const double v = std::max(1.0 - w, 1e-12);
        return std::exp(quantile_fn(v));
    };
    const auto ladder = ladder_integral(f, 42);
    if (!ladder.converged) {
        std::ostringstream os;
        os << "meanfield_capital_density: normalizer does not converge under refinement "
              "(segment growth rate "
           << ladder.growth << ")";
        throw non_integrable(os.str());
    }
    CapitalDensity d;
    d.normalizer = ladder.value;
    d.v.assign(v_points.begin(), v_points.end());
    d.density.resize(d.v.size());
    for (std::size_t i = 0; i < d.v.size(); ++i)
        d.density[i] = std::exp(quantile_fn(1.0 - d.v[i])) / d.normalizer;
    return d;
}

StationaryCapitalDensity stationary_capital_density(const MeanFieldProfile& mf,
                                                    std::span<const double> v_points) {
    const auto phase = classify_phase(mf);
    if (phase.label == Phase::Aggregated) {
        StationaryCapitalDensity out;
        out.dirac_at_zero = true;
        return out;
    }
    const WaveProfile wave(mf, 0.0);  // needs the entropy condition
    auto f = [&wave](double w) {
        return std::exp(wave.psi_at_one_minus(std::min(w, 1.0 - 1e-12)));
    };
    if (phase.label == Phase::Critical) {
        const auto probe = ladder_integral(f, 60);
        std::ostringstream os;
        os << "stationary_capital_density: critical phase (lhs = " << phase.lhs
           << ", rhs = " << phase.rhs
           << "); integrability is undecided here, normalizer segment growth rate "
           << probe.growth;
        throw needs_detailed_analysis(os.str());
    }
    const auto ladder = ladder_integral(f, 60);
    if (!ladder.converged) {
        std::ostringstream os;
        os << "stationary_capital_density: normalizer does not converge (growth rate "
           << ladder.growth << ")";
        throw non_integrable(os.str());
    }
    StationaryCapitalDensity out;
    out.density.normalizer = ladder.value;
    out.density.v.assign(v_points.begin(), v_points.end());
    out.density.density.resize(out.density.v.size());
    for (std::size_t i = 0; i < out.density.v.size(); ++i) {
        const double v = out.density.v[i];
        if (!(v > 0.0) || !(v < 1.0))
            throw std::domain_error("stationary_capital_density: v must lie in (0,1)");
        out.density.density[i] = std::exp(wave.psi_at_one_minus(v)) / ladder.value;
    }
    return out;
}

SlopeFit loglog_slope(const CapitalCurve& curve, double top_fraction) {
    if (!(top_fraction > 0.0) || !(top_fraction < 1.0))
        throw invalid_parameter("loglog_slope: top_fraction must lie in (0,1)");
    const int n = curve.n();
    const int p_max = static_cast<int>(std::floor(top_fraction * static_cast<double>(n)));
    const int count = p_max - 1;  // ranks 2..p_max
    if (count < 10)
        throw invalid_parameter("loglog_slope: insufficient data in the selected top fraction");
    double sx = 0.0, sy = 0.0;
    for (int p = 2; p <= p_max; ++p) {
        sx += curve.log_rank[static_cast<std::size_t>(p - 1)];
        sy += curve.log_weight[static_cast<std::size_t>(p - 1)];
    }
    const double mx = sx / count, my = sy / count;
    double sxx = 0.0, sxy = 0.0;
    for (int p = 2; p <= p_max; ++p) {
        const double dx = curve.log_rank[static_cast<std::size_t>(p - 1)] - mx;
        const double dy = curve.log_weight[static_cast<std::size_t>(p - 1)] - my;
        sxx += dx * dx;
        sxy += dx * dy;
    }
    SlopeFit fit;
    fit.points = count;
    fit.slope = sxy / sxx;
    double ssr = 0.0;
    for (int p = 2; p <= p_max; ++p) {
        const double dx = curve.log_rank[static_cast<std::size_t>(p - 1)] - mx;
        const double dy = curve.log_weight[static_cast<std::size_t>(p - 1)] - my;
        const double resid = dy - fit.slope * dx;
        ssr += resid * resid;
    }
    fit.std_error = std::sqrt(ssr / (count - 2) / sxx);
    return fit;
}

}  // namespace ranklab
