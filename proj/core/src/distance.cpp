#include "ranklab/distance.hpp"

#include <algorithm>
#include <cmath>

#include "ranklab/errors.hpp"

namespace ranklab {

namespace {

bool is_sorted_span(std::span<const double> v) {
    return std::is_sorted(v.begin(), v.end());
}

// Adaptive Simpson for a smooth integrand on [a, b].
double simpson(const std::function<double(double)>& f, double a, double fa, double b,
               double fb, double fm, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, fa, b, fb, fm, whole, tol, 40);
}

// x with cdf(x) = level inside [lo, hi]; cdf nondecreasing.
double bisect_level(const std::function<double(double)>& cdf, double level, double lo,
                    double hi) {
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < level)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double wasserstein1(std::span<const double> sorted_a, std::span<const double> sorted_b) {
    if (sorted_a.empty() || sorted_b.empty())
        throw invalid_parameter("wasserstein1: empty sample");
    if (!is_sorted_span(sorted_a) || !is_sorted_span(sorted_b))
        throw invalid_parameter("wasserstein1: samples must be sorted");

    const double na = static_cast<double>(sorted_a.size());
    const double nb = static_cast<double>(sorted_b.size());
    std::size_t i = 0, j = 0;
    double total = 0.0;
    double x_prev = std::min(sorted_a.front(), sorted_b.front());
    while (i < sorted_a.size() || j < sorted_b.size()) {
        const double xa = i < sorted_a.size() ? sorted_a[i] : INFINITY;
        const double xb = j < sorted_b.size() ? sorted_b[j] : INFINITY;
        const double x = std::min(xa, xb);
        total += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) *
                 (x - x_prev);
        while (i < sorted_a.size() && sorted_a[i] == x) ++i;
        while (j < sorted_b.size() && sorted_b[j] == x) ++j;
        x_prev = x;
    }
    return total;
}

double wasserstein1(std::span<const double> sorted_a,
                    const std::function<double(double)>& cdf, double abs_tol) {
    if (sorted_a.empty()) throw invalid_parameter("wasserstein1: empty sample");
    if (!is_sorted_span(sorted_a))
        throw invalid_parameter("wasserstein1: sample must be sorted");
    const std::size_t n = sorted_a.size();
    const double dn = static_cast<double>(n);
    const double seg_tol = abs_tol / static_cast<double>(n + 2);

    double total = 0.0;

    // left tail: F_A = 0, integrate cdf down to negligible mass
    {
        double x_lo = sorted_a.front();
        double span = 1.0;
        while (cdf(x_lo) > 1e-13 && span < 1e12) {
            x_lo -= span;
            span *= 2.0;
        }
        total += integrate(cdf, x_lo, sorted_a.front(), seg_tol);
    }
    // between consecutive sample points the empirical CDF is constant
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double lo = sorted_a[i], hi = sorted_a[i + 1];
        if (!(hi > lo)) continue;
        const double level = static_cast<double>(i + 1) / dn;
        const double flo = cdf(lo), fhi = cdf(hi);
        auto abs_diff = [&](double x) { return std::abs(cdf(x) - level); };
        if (flo < level && fhi > level) {
            const double xc = bisect_level(cdf, level, lo, hi);
            total += integrate(abs_diff, lo, xc, seg_tol);
            total += integrate(abs_diff, xc, hi, seg_tol);
        } else {
            total += integrate(abs_diff, lo, hi, seg_tol);
        }
    }
    // right tail: F_A = 1
    {
        double x_hi = sorted_a.back();
        double span = 1.0;
        while (1.0 - cdf(x_hi) > 1e-13 && span < 1e12) {
            x_hi += span;
            span *= 2.0;
        }
        total += integrate([&](double x) { return 1.0 - cdf(x); }, sorted_a.back(), x_hi,
                           seg_tol);
    }
    return total;
}

}  // namespace ranklab
