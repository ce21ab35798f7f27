#include "ranklab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ranklab/errors.hpp"
#include "ranklab/rng.hpp"

namespace ranklab {

namespace {
constexpr double kZeroMarginTol = 1e-12;

std::vector<double> prefix_sums(const std::vector<double>& v) {
    std::vector<double> s(v.size() + 1, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) s[i + 1] = s[i] + v[i];
    return s;
}
}  // namespace

StabilityReport check_global_stability(const CoefficientProfile& c) {
    c.validate();
    const int n = c.n();
    StabilityReport r;
    if (n == 1) return r;  // vacuously stable, no margins
    const auto s = prefix_sums(c.drifts);
    r.margins.resize(static_cast<std::size_t>(n - 1));
    for (int m = 1; m < n; ++m) {
        const double alpha = s[static_cast<std::size_t>(m)] -
                             (static_cast<double>(m) / n) * s[static_cast<std::size_t>(n)];
        r.margins[static_cast<std::size_t>(m - 1)] = alpha;
        if (!(alpha > kZeroMarginTol)) r.globally_stable = false;
    }
    return r;
}

ClusterPartition cluster_partition(const CoefficientProfile& c, double drift_tol) {
    c.validate();
    if (drift_tol < 0.0) throw invalid_parameter("cluster_partition: drift_tol must be >= 0");
    const int n = c.n();
    const auto s = prefix_sums(c.drifts);

    // Pool-adjacent-violators on the prefix-sum polygon: merge while the
    // incoming block average is strictly below the previous one. The
    // surviving blocks are the faces of the greatest convex minorant with
    // collinear contact points kept separate, which is exactly the maximal
    // locally-stable interval of every rank. Block sums are taken as
    // prefix-sum differences so comparisons reproduce the brute-force
    // oracle bit for bit.
    struct Block {
        int first;  // 1-based
        int last;
    };
    std::vector<Block> blocks;
    blocks.reserve(static_cast<std::size_t>(n));
    auto block_sum = [&s](const Block& b) {
        return s[static_cast<std::size_t>(b.last)] - s[static_cast<std::size_t>(b.first - 1)];
    };
    auto len = [](const Block& b) { return static_cast<double>(b.last - b.first + 1); };
    for (int k = 1; k <= n; ++k) {
        Block cur{k, k};
        while (!blocks.empty()) {
            const Block& prev = blocks.back();
            // avg(cur) < avg(prev), cross-multiplied
            if (block_sum(cur) * len(prev) < block_sum(prev) * len(cur)) {
                cur.first = prev.first;
                blocks.pop_back();
            } else {
                break;
            }
        }
        blocks.push_back(cur);
    }

    ClusterPartition p;
    p.clusters.reserve(blocks.size());
    p.cluster_avg_drifts.reserve(blocks.size());
    for (const Block& b : blocks) {
        p.clusters.push_back({b.first, b.last});
        p.cluster_avg_drifts.push_back(block_sum(b) / len(b));
    }

    // clouds: consecutive clusters whose averages differ by at most drift_tol
    std::size_t start = 0;
    while (start < p.clusters.size()) {
        std::size_t end = start;
        while (end + 1 < p.clusters.size() &&
               std::abs(p.cluster_avg_drifts[end + 1] - p.cluster_avg_drifts[end]) <= drift_tol)
            ++end;
        const Block whole{p.clusters[start].first, p.clusters[end].last};
        p.clouds.push_back({static_cast<int>(start) + 1, static_cast<int>(end) + 1});
        p.cloud_avg_drifts.push_back(block_sum(whole) / len(whole));
        start = end + 1;
    }
    for (std::size_t i = 1; i < p.cloud_avg_drifts.size(); ++i)
        if (!(p.cloud_avg_drifts[i] > p.cloud_avg_drifts[i - 1]))
            throw invalid_parameter(
                "cluster_partition: drift_tol groups clouds with non-increasing averages");
    return p;
}

GapLaw stationary_gap_law(const CoefficientProfile& c) {
    const auto report = check_global_stability(c);
    if (!report.globally_stable)
        throw no_stationary_law("gap law: the system is not globally stable");
    const int n = c.n();
    GapLaw law;
    if (n == 1) return law;

    std::vector<double> s2(c.diffusions.size());
    std::transform(c.diffusions.begin(), c.diffusions.end(), s2.begin(),
                   [](double s) { return s * s; });
    const double scale = *std::max_element(s2.begin(), s2.end());
    bool equal = true;
    for (double v : s2) equal = equal && std::abs(v - s2[0]) <= 1e-12 * scale;
    bool skew = true;
    if (n >= 3) {
        const double d0 = s2[1] - s2[0];
        for (int k = 1; k + 1 < n; ++k)
            skew = skew && std::abs((s2[static_cast<std::size_t>(k + 1)] -
                                     s2[static_cast<std::size_t>(k)]) -
                                    d0) <= 1e-12 * scale;
    }
    if (!equal && !skew)
        throw unsupported_variance(
            "gap law: diffusions are neither equal nor skew-symmetric; "
            "the stationary law exists but is not explicit here");

    law.kind = equal ? GapLawKind::EqualVariance : GapLawKind::SkewSymmetric;
    law.rates.resize(static_cast<std::size_t>(n - 1));
    for (int k = 0; k + 1 < n; ++k)
        law.rates[static_cast<std::size_t>(k)] =
            4.0 * report.margins[static_cast<std::size_t>(k)] /
            (s2[static_cast<std::size_t>(k)] + s2[static_cast<std::size_t>(k + 1)]);
    return law;
}

double potential_V(const CoefficientProfile& c, std::span<const double> x) {
    c.validate();
    if (static_cast<int>(x.size()) != c.n())
        throw invalid_parameter("potential_V: dimension mismatch");
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    double v = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) v -= c.drifts[k] * sorted[k];
    return v;
}

double stationary_centered_density(const CoefficientProfile& c,
                                   std::span<const double> x_tilde) {
    c.validate();
    const int n = c.n();
    if (static_cast<int>(x_tilde.size()) != n)
        throw invalid_parameter("stationary_centered_density: dimension mismatch");
    const double s2 = c.diffusions[0] * c.diffusions[0];
    for (double s : c.diffusions)
        if (std::abs(s * s - s2) > 1e-12 * s2)
            throw unsupported_variance("stationary_centered_density: diffusions must be equal");
    if (!check_global_stability(c).globally_stable)
        throw no_stationary_law("stationary_centered_density: normalizer is infinite");
    const double sum = std::accumulate(x_tilde.begin(), x_tilde.end(), 0.0);
    if (std::abs(sum) > 1e-9 * n)
        throw std::domain_error("stationary_centered_density: coordinates must sum to zero");
    return std::exp(-(2.0 / s2) * potential_V(c, x_tilde));
}

NormalizerEstimate mc_normalizer(const CoefficientProfile& c, int samples, std::uint64_t seed) {
    if (samples < 2) throw invalid_parameter("mc_normalizer: need at least 2 samples");
    const auto law = stationary_gap_law(c);  // enforces stability + explicit family
    const int n = c.n();
    if (n == 1) return {1.0, 0.0};
    const int m = n - 1;

    // Gram determinant of the gap -> centered-configuration map. Column k
    // of the map sends gap z_k to d x_tilde = (-(n-k)/n repeated k times,
    // k/n repeated n-k times) in sorted coordinates.
    std::vector<std::vector<double>> g(static_cast<std::size_t>(m),
                                       std::vector<double>(static_cast<std::size_t>(m), 0.0));
    for (int a = 1; a <= m; ++a)
        for (int b = 1; b <= m; ++b) {
            const int lo = std::min(a, b), hi = std::max(a, b);
            // dot product of columns a and b
            g[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] =
                static_cast<double>(lo) * static_cast<double>(n - hi) / n;
        }
    // Cholesky-free determinant via Gaussian elimination (m is small).
    double det = 1.0;
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(g[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                std::abs(g[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)]))
                pivot = r;
        if (pivot != col) {
            std::swap(g[static_cast<std::size_t>(pivot)], g[static_cast<std::size_t>(col)]);
            det = -det;
        }
        det *= g[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        for (int r = col + 1; r < m; ++r) {
            const double f = g[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                             g[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
            for (int cc = col; cc < m; ++cc)
                g[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
                    f * g[static_cast<std::size_t>(col)][static_cast<std::size_t>(cc)];
        }
    }
    const double jac = std::sqrt(det);
    double factorial = 1.0;
    for (int k = 2; k <= n; ++k) factorial *= k;

    const double s2 = c.diffusions[0] * c.diffusions[0];
    std::vector<double> theta(law.rates);
    for (double& t : theta) t *= 0.5;  // heavier-tailed proposal, bounded weights

    double sum_w = 0.0, sum_w2 = 0.0;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < samples; ++i) {
        double q = 1.0;  // proposal density
        // build sorted configuration from the gaps, then center it
        x[0] = 0.0;
        for (int k = 0; k < m; ++k) {
            const double u = uniform_open_closed(Philox4x64::block(
                {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(k),
                 static_cast<std::uint64_t>(RngPurpose::Generic), 0},
                seed, 0xC0FFEEull)[0]);
            const double z = -std::log(u) / theta[static_cast<std::size_t>(k)];
            q *= theta[static_cast<std::size_t>(k)] *
                 std::exp(-theta[static_cast<std::size_t>(k)] * z);
            x[static_cast<std::size_t>(k + 1)] = x[static_cast<std::size_t>(k)] + z;
        }
        const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
        for (double& xi : x) xi -= mean;
        const double target = std::exp(-(2.0 / s2) * potential_V(c, x));
        const double w = target / q;
        sum_w += w;
        sum_w2 += w * w;
    }
    const double mean_w = sum_w / samples;
    const double var_w = std::max(0.0, sum_w2 / samples - mean_w * mean_w);
    NormalizerEstimate est;
    est.value = factorial * jac * mean_w;
    est.std_error = factorial * jac * std::sqrt(var_w / samples);
    return est;
}

LongTimeReport classify_long_time(const CoefficientProfile& c, double drift_tol) {
    const auto p = cluster_partition(c, drift_tol);
    LongTimeReport r;
    for (std::size_t i = 0; i < p.clouds.size(); ++i) {
        const auto& cl = p.clouds[i];
        CloudReport cr;
        cr.first_rank = p.clusters[static_cast<std::size_t>(cl.first - 1)].first;
        cr.last_rank = p.clusters[static_cast<std::size_t>(cl.last - 1)].last;
        cr.avg_drift = p.cloud_avg_drifts[i];
        cr.cluster_count = cl.last - cl.first + 1;
        cr.recurrence = cr.cluster_count == 1 ? Recurrence::Ergodic : Recurrence::NullRecurrent;
        r.clouds.push_back(cr);
    }
    r.clouds_separate = r.clouds.size() > 1;
    return r;
}

std::string format_long_time_report(const LongTimeReport& r) {
    std::ostringstream os;
    for (const auto& c : r.clouds) {
        os << c.first_rank << ".." << c.last_rank << " avg_drift=" << c.avg_drift << " "
           << (c.recurrence == Recurrence::Ergodic ? "ergodic" : "null-recurrent") << "\n";
    }
    if (r.clouds_separate)
        os << "clouds separate after an almost-surely finite time\n";
    return os.str();
}

}  // namespace ranklab
