#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ranklab/errors.hpp"
#include "ranklab/profile.hpp"

using namespace ranklab;

namespace {
MeanFieldProfile linear_drift_profile(double kappa) {
    // b(u) = kappa (1 - u), sigma2 = 1
    return MeanFieldProfile({{0.0, kappa}, {1.0, 0.0}}, {{0.0, 1.0}, {1.0, 1.0}});
}

// independent quadrature oracle: trapezoid on a fine grid that includes
// every knot, exact for piecewise-linear integrands
double trapezoid_oracle(const MeanFieldProfile& mf, double upper, bool b_not_sigma) {
    std::vector<double> xs;
    const auto& knots = b_not_sigma ? mf.b_knots() : mf.sigma2_knots();
    for (const auto& [u, v] : knots)
        if (u < upper) xs.push_back(u);
    for (int i = 0; i <= 10000; ++i) xs.push_back(upper * i / 10000.0);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    double acc = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double f0 = b_not_sigma ? mf.b(xs[i - 1]) : mf.sigma2(xs[i - 1]);
        const double f1 = b_not_sigma ? mf.b(xs[i]) : mf.sigma2(xs[i]);
        acc += 0.5 * (f0 + f1) * (xs[i] - xs[i - 1]);
    }
    return acc;
}
}  // namespace

TEST_CASE("atlas coefficients") {
    const auto c3 = make_atlas(3, 1.0);
    CHECK(c3.drifts == std::vector<double>{3.0, 0.0, 0.0});
    CHECK(c3.diffusions == std::vector<double>{1.0, 1.0, 1.0});

    const auto c1 = make_atlas(1, 1.0);
    CHECK(c1.drifts == std::vector<double>{1.0});
    CHECK(c1.diffusions == std::vector<double>{1.0});

    const auto c2 = make_atlas(2, 0.5);
    CHECK(c2.drifts == std::vector<double>{1.0, 0.0});
    CHECK(c2.diffusions == std::vector<double>{1.0, 1.0});

    CHECK_THROWS_AS(make_atlas(0, 1.0), invalid_parameter);
    CHECK_THROWS_AS(make_atlas(3, 0.0), invalid_parameter);
    CHECK_THROWS_AS(make_atlas(3, -1.0), invalid_parameter);
}

TEST_CASE("discretize_meanfield samples b and sigma at k/n") {
    const auto mf = linear_drift_profile(2.0);
    const auto c2 = discretize_meanfield(mf, 2);
    CHECK(c2.drifts[0] == doctest::Approx(1.0));
    CHECK(c2.drifts[1] == doctest::Approx(0.0));
    CHECK(c2.diffusions[0] == doctest::Approx(1.0));

    const MeanFieldProfile identity({{0.0, 0.0}, {1.0, 1.0}}, {{0.0, 1.0}, {1.0, 1.0}});
    const auto c4 = discretize_meanfield(identity, 4);
    CHECK(c4.drifts == std::vector<double>{0.25, 0.5, 0.75, 1.0});

    const auto c1000 = discretize_meanfield(mf, 1000);
    CHECK(c1000.drifts[999] == doctest::Approx(0.0));
    CHECK(c1000.drifts[0] == doctest::Approx(1.998));
}

TEST_CASE("flux and viscosity integrals") {
    const auto mf = linear_drift_profile(2.0);
    CHECK(flux_B(mf, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(flux_B(mf, 0.0) == 0.0);
    CHECK(flux_B(mf, 0.5) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(viscosity_A(mf, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(viscosity_A(mf, 0.3) == doctest::Approx(0.15).epsilon(1e-14));

    const MeanFieldProfile ramp_sigma({{0.0, 0.0}, {1.0, 0.0}},
                                      {{0.0, 1.0}, {1.0, 2.0}});  // sigma2 = 1 + v
    CHECK(viscosity_A(ramp_sigma, 1.0) == doctest::Approx(0.75).epsilon(1e-14));

    CHECK(mean_drift(mf) == doctest::Approx(1.0));
    CHECK(mean_drift(ramp_sigma) == 0.0);
    const MeanFieldProfile identity({{0.0, 0.0}, {1.0, 1.0}}, {{0.0, 1.0}, {1.0, 1.0}});
    CHECK(mean_drift(identity) == doctest::Approx(0.5));

    CHECK_THROWS_AS(flux_B(mf, -0.1), std::domain_error);
    CHECK_THROWS_AS(flux_B(mf, 1.1), std::domain_error);
    CHECK_THROWS_AS(viscosity_A(mf, 2.0), std::domain_error);
}

TEST_CASE("flux matches the trapezoidal oracle exactly") {
    const MeanFieldProfile mf({{0.0, -1.0}, {0.3, 2.0}, {0.7, -0.5}, {1.0, 1.0}},
                              {{0.0, 0.5}, {0.4, 2.0}, {1.0, 1.0}});
    for (double u : {0.1, 0.25, 0.3, 0.5, 0.77, 1.0}) {
        CHECK(std::abs(flux_B(mf, u) - trapezoid_oracle(mf, u, true)) <= 1e-12);
        CHECK(std::abs(viscosity_A(mf, u) - 0.5 * trapezoid_oracle(mf, u, false)) <= 1e-12);
    }
    // splitting identity: B = B_plus + B_minus, B_plus nondecreasing
    double prev_plus = 0.0;
    for (int i = 0; i <= 50; ++i) {
        const double u = i / 50.0;
        CHECK(mf.flux_B_plus(u) + mf.flux_B_minus(u) ==
              doctest::Approx(mf.flux_B(u)).epsilon(1e-13));
        CHECK(mf.flux_B_plus(u) >= prev_plus - 1e-15);
        prev_plus = mf.flux_B_plus(u);
    }
}

TEST_CASE("viscosity is strictly increasing, flux nondecreasing for b >= 0") {
    const auto mf = linear_drift_profile(1.5);
    double prev_a = -1.0, prev_b = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double u = i / 100.0;
        const double a = viscosity_A(mf, u);
        const double b = flux_B(mf, u);
        if (i > 0) {
            CHECK(a > prev_a);
            CHECK(b >= prev_b);
        }
        prev_a = a;
        prev_b = b;
    }
}

TEST_CASE("riemann sums of b converge to the mean drift at rate 1/n") {
    const MeanFieldProfile mf({{0.0, 2.0}, {0.5, -1.0}, {1.0, 0.5}},
                              {{0.0, 1.0}, {1.0, 1.0}});
    const double lipschitz = mf.drift_lipschitz();
    const double exact = mean_drift(mf);
    for (int n : {10, 100, 1000}) {
        const auto c = discretize_meanfield(mf, n);
        double avg = 0.0;
        for (double b : c.drifts) avg += b;
        avg /= n;
        CHECK(std::abs(avg - exact) <= lipschitz / n);
    }
}

TEST_CASE("profile validation") {
    CHECK_THROWS_AS(MeanFieldProfile({{0.0, 1.0}}, {{0.0, 1.0}, {1.0, 1.0}}),
                    invalid_profile);
    CHECK_THROWS_AS(MeanFieldProfile({{0.1, 1.0}, {1.0, 0.0}}, {{0.0, 1.0}, {1.0, 1.0}}),
                    invalid_profile);
    CHECK_THROWS_AS(
        MeanFieldProfile({{0.0, 1.0}, {0.5, 1.0}, {0.5, 2.0}, {1.0, 0.0}},
                         {{0.0, 1.0}, {1.0, 1.0}}),
        invalid_profile);
    CHECK_THROWS_AS(MeanFieldProfile({{0.0, 1.0}, {1.0, 0.0}}, {{0.0, 0.0}, {1.0, 1.0}}),
                    invalid_profile);

    CoefficientProfile bad;
    bad.drifts = {1.0, 2.0};
    bad.diffusions = {1.0};
    CHECK_THROWS_AS(bad.validate(), invalid_profile);
    bad.diffusions = {1.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), invalid_profile);
}

TEST_CASE("smoothed atlas spike integrates to gamma") {
    const auto mf = make_smoothed_atlas(1.5, 0.05);
    CHECK(flux_B(mf, 1.0) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(mean_drift(mf) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(mf.b(0.05) == 0.0);
    CHECK(mf.b(0.5) == 0.0);
    CHECK(mf.b(0.0) == doctest::Approx(2.0 * 1.5 / 0.05));
    CHECK_THROWS_AS(make_smoothed_atlas(0.0, 0.1), invalid_parameter);
    CHECK_THROWS_AS(make_smoothed_atlas(1.0, 1.5), invalid_parameter);
}
