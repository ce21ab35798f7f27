#include <doctest.h>

#include <cmath>
#include <vector>

#include "ranklab/errors.hpp"
#include "ranklab/profile.hpp"
#include "ranklab/waves.hpp"

using namespace ranklab;

namespace {
MeanFieldProfile kappa_profile(double kappa) {
    // b(u) = kappa (1 - u), sigma2 = 1: psi(u) = ln(u/(1-u)) / kappa
    return MeanFieldProfile({{0.0, kappa}, {1.0, 0.0}}, {{0.0, 1.0}, {1.0, 1.0}});
}

double psi_closed(double kappa, double u) { return std::log(u / (1.0 - u)) / kappa; }
}  // namespace

TEST_CASE("oleinik condition on the worked examples") {
    const auto good = check_oleinik(kappa_profile(2.0));
    CHECK(good.holds);
    CHECK(good.min_margin > 0.0);
    // margin is u(1-u): probe-grid minimum sits next to the endpoints
    CHECK(good.min_margin <= 1e-3);

    const MeanFieldProfile constant({{0.0, 1.0}, {1.0, 1.0}}, {{0.0, 1.0}, {1.0, 1.0}});
    const auto flat = check_oleinik(constant);
    CHECK(!flat.holds);
    CHECK(flat.min_margin == doctest::Approx(0.0));

    const MeanFieldProfile increasing({{0.0, 0.0}, {1.0, 1.0}}, {{0.0, 1.0}, {1.0, 1.0}});
    const auto bad = check_oleinik(increasing);
    CHECK(!bad.holds);
    CHECK(bad.min_margin < 0.0);
}

TEST_CASE("psi closed form for the linear-drift family") {
    const auto mf = kappa_profile(2.0);
    CHECK(psi(mf, 0.75) == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-10));
    CHECK(psi(mf, 0.5) == 0.0);
    CHECK(psi(mf, 0.25) == doctest::Approx(-0.5 * std::log(3.0)).epsilon(1e-10));

    for (double kappa : {1.5, 2.0, 3.0}) {
        const auto mfk = kappa_profile(kappa);
        for (int i = 1; i <= 100; ++i) {
            const double u = static_cast<double>(i) / 101.0;
            CHECK(std::abs(psi(mfk, u) - psi_closed(kappa, u)) <= 1e-8);
        }
    }

    CHECK_THROWS_AS(psi(mf, 0.0), std::domain_error);
    CHECK_THROWS_AS(psi(mf, 1.0), std::domain_error);
    const MeanFieldProfile constant({{0.0, 1.0}, {1.0, 1.0}}, {{0.0, 1.0}, {1.0, 1.0}});
    CHECK_THROWS_AS(psi(constant, 0.5), undefined_wave);
}

TEST_CASE("wave profile tabulation and inverse") {
    const auto mf = kappa_profile(2.0);
    const WaveProfile wave(mf, 0.0);
    CHECK(wave.speed() == doctest::Approx(1.0));
    CHECK(wave.shift() == doctest::Approx(0.0).epsilon(1e-8));  // symmetric law

    // table strictly increasing
    const auto& tab = wave.table_psi();
    for (std::size_t i = 1; i < tab.size(); ++i) CHECK(tab[i] > tab[i - 1]);

    CHECK(wave.psi_inverse(0.0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(wave.psi_inverse(0.5 * std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-8));

    for (double u : {0.02, 0.2, 0.5, 0.8, 0.97}) {
        CHECK(wave.psi_at(u) == doctest::Approx(psi_closed(2.0, u)).epsilon(1e-7));
        CHECK(wave.psi_inverse(wave.psi_at(u)) == doctest::Approx(u).epsilon(1e-8));
    }

    // cdf is the logistic with scale 1/2
    for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0})
        CHECK(wave.cdf(x) ==
              doctest::Approx(1.0 / (1.0 + std::exp(-2.0 * x))).epsilon(1e-7));

    // stable deep-tail evaluation
    CHECK(wave.psi_at_one_minus(1e-30) > 30.0);
    CHECK(wave.psi_at_one_minus(1e-30) ==
          doctest::Approx(-std::log(1e-30) / 2.0).epsilon(1e-4));
}

TEST_CASE("prescribing the mean translates the wave") {
    const auto mf = kappa_profile(2.0);
    const WaveProfile centered(mf, 0.0);
    const WaveProfile shifted(mf, 2.5);
    CHECK(shifted.mean() == doctest::Approx(2.5));
    CHECK(shifted.shift() == doctest::Approx(centered.shift() - 2.5).epsilon(1e-8));
    for (double x : {-1.0, 0.0, 1.0})
        CHECK(shifted.cdf(x + 2.5) == doctest::Approx(centered.cdf(x)).epsilon(1e-8));
}

TEST_CASE("wave ODE residual vanishes at the tabulation points") {
    const MeanFieldProfile mf({{0.0, 2.0}, {0.4, 1.5}, {1.0, 0.0}},
                              {{0.0, 0.8}, {1.0, 1.2}});
    REQUIRE(check_oleinik(mf).holds);
    const WaveProfile wave(mf, 0.0);
    const double b_bar = mean_drift(mf);
    const double h = 1e-4;
    for (double x : {-2.0, -0.5, 0.0, 0.7, 2.0}) {
        const double phi = wave.cdf(x);
        const double dphi = (wave.cdf(x + h) - wave.cdf(x - h)) / (2.0 * h);
        const double residual =
            0.5 * mf.sigma2(phi) * dphi - (flux_B(mf, phi) - b_bar * phi);
        CHECK(std::abs(residual) <= 1e-6);
    }
}

TEST_CASE("wave CDFs translate: L1 distance equals the shift difference") {
    const auto mf = kappa_profile(2.0);
    const WaveProfile a(mf, 0.0);
    const WaveProfile b(mf, 0.7);
    // integrate |a - b| over a wide grid
    double total = 0.0;
    const double lo = -14.0, hi = 14.0;
    const int n = 20000;
    const double dx = (hi - lo) / n;
    for (int i = 0; i < n; ++i) {
        const double x = lo + (i + 0.5) * dx;
        total += std::abs(a.cdf(x) - b.cdf(x)) * dx;
    }
    CHECK(total == doctest::Approx(0.7).epsilon(1e-4));
}

TEST_CASE("wave existence matches the entropy condition") {
    CHECK_NOTHROW(wave_profile(kappa_profile(1.0), 0.0));
    const MeanFieldProfile constant({{0.0, 1.0}, {1.0, 1.0}}, {{0.0, 1.0}, {1.0, 1.0}});
    CHECK_THROWS_AS(wave_profile(constant, 0.0), undefined_wave);
    const MeanFieldProfile increasing({{0.0, 0.0}, {1.0, 1.0}}, {{0.0, 1.0}, {1.0, 1.0}});
    CHECK_THROWS_AS(wave_profile(increasing, 0.0), undefined_wave);
}

TEST_CASE("degenerate entropy margin gives an infinite-mean wave") {
    // b(0) equals the mean drift exactly (dyadic knots, no rounding): the
    // margin has a double zero at u = 0, psi ~ -c/u there and the wave law
    // has no mean
    const MeanFieldProfile mf({{0.0, 2.0}, {0.5, 3.0}, {1.0, 0.0}},
                              {{0.0, 1.0}, {1.0, 1.0}});
    REQUIRE(mean_drift(mf) == 2.0);
    REQUIRE(check_oleinik(mf).holds);
    CHECK_THROWS_AS(wave_profile(mf, 0.0), non_integrable);
    try {
        wave_profile(mf, 0.0);
    } catch (const non_integrable& e) {
        CHECK(std::string(e.what()).find("lower tail") != std::string::npos);
    }
}

TEST_CASE("stability experiment") {
    const auto mf = kappa_profile(2.0);
    const WaveProfile wave(mf, 0.0);

    // exact wave initial data: the distance stays at scheme-error level
    std::vector<double> times{0.0, 0.5, 1.0, 1.5, 2.0};
    const auto series = stability_experiment(
        mf, [&wave](double x) { return wave.cdf(x); }, 0.0, 2.0, -10.0, 13.0, 1600, times);
    REQUIRE(series.size() == times.size());
    for (const auto& pt : series) CHECK(pt.l1 < 1e-3);
    for (std::size_t i = 1; i < series.size(); ++i)
        CHECK(series[i].l1 <= series[i - 1].l1 + 1e-4);

    // mean mismatch is refused
    CHECK_THROWS_AS(stability_experiment(
                        mf, [&wave](double x) { return wave.cdf(x - 1.0); }, 1.0, 1.0,
                        -10.0, 13.0, 400, times, {}, 0.0),
                    invalid_parameter);

    // no wave, no experiment
    const MeanFieldProfile constant({{0.0, 1.0}, {1.0, 1.0}}, {{0.0, 1.0}, {1.0, 1.0}});
    CHECK_THROWS_AS(stability_experiment(
                        constant, [](double x) { return x >= 0.0 ? 1.0 : 0.0; }, 0.0, 1.0,
                        -10.0, 10.0, 400, times),
                    undefined_wave);
}
