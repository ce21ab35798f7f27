#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ranklab/errors.hpp"
#include "ranklab/rng.hpp"
#include "ranklab/simulator.hpp"
#include "ranklab/stability.hpp"

using namespace ranklab;

namespace {
CoefficientProfile from_drifts(std::vector<double> drifts) {
    CoefficientProfile c;
    c.drifts = std::move(drifts);
    c.diffusions.assign(c.drifts.size(), 1.0);
    return c;
}
}  // namespace

TEST_CASE("single euler step") {
    // one particle: position moves by b dt + sigma sqrt(dt) g
    auto s = make_state({1.0});
    CoefficientProfile c;
    c.drifts = {2.0};
    c.diffusions = {0.5};
    const std::vector<double> g{0.7};
    const auto out = step(s, c, 0.01, g);
    CHECK(out.positions[0] ==
          doctest::Approx(1.0 + 2.0 * 0.01 + 0.5 * std::sqrt(0.01) * 0.7));
    CHECK(out.t == doctest::Approx(0.01));

    // zero noise: pure drift by rank; ranks unchanged for small dt
    auto s2 = make_state({0.0, 1.0});
    const auto atlas = make_atlas(2, 1.0);
    const std::vector<double> zero{0.0, 0.0};
    const auto out2 = step(s2, atlas, 0.1, zero);
    CHECK(out2.positions[0] == doctest::Approx(0.2));
    CHECK(out2.positions[1] == doctest::Approx(1.0));
    CHECK(out2.rank_of[0] == 0);
    CHECK(out2.rank_of[1] == 1);
}

TEST_CASE("ties broken by particle index") {
    auto s = make_state({0.0, 0.0});
    CHECK(s.rank_of[0] == 0);  // lower index gets the lower rank
    CHECK(s.rank_of[1] == 1);
    const auto c = from_drifts({0.0, 1.0});
    const std::vector<double> zero{0.0, 0.0};
    const auto out = step(s, c, 0.25, zero);
    CHECK(out.positions[0] == doctest::Approx(0.0));
    CHECK(out.positions[1] == doctest::Approx(0.25));
}

TEST_CASE("step input validation") {
    auto s = make_state({0.0, 1.0});
    const auto c = make_atlas(2, 1.0);
    const std::vector<double> bad{1.0, NAN};
    CHECK_THROWS_AS(step(s, c, 0.01, bad), numerical_failure);
    const std::vector<double> short_noise{1.0};
    CHECK_THROWS_AS(step(s, c, 0.01, short_noise), invalid_parameter);
    CHECK_THROWS_AS(make_state({0.0, INFINITY}), numerical_failure);
}

TEST_CASE("simulate is deterministic in (seed, config, profile)") {
    SimConfig cfg;
    cfg.n = 4;
    cfg.dt = 1e-2;
    cfg.t_end = 1.0;
    cfg.seed = 99;
    cfg.initial_law = InitialLaw::gaussian(0.0, 1.0);
    cfg.record_times = {0.0, 0.5, 1.0};
    const auto c = make_atlas(4, 1.0);
    const auto a = simulate(cfg, c);
    const auto b = simulate(cfg, c);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].t == b[i].t);
        CHECK(a[i].positions == b[i].positions);  // bitwise
    }
    SimConfig other = cfg;
    other.seed = 100;
    const auto d = simulate(other, c);
    CHECK(d.back().positions != a.back().positions);
}

TEST_CASE("ranks stay consistent along a trajectory") {
    SimConfig cfg;
    cfg.n = 5;
    cfg.dt = 5e-3;
    cfg.t_end = 0.5;
    cfg.seed = 7;
    cfg.initial_law = InitialLaw::uniform(-1.0, 1.0);
    for (int k = 0; k <= 100; ++k) cfg.record_times.push_back(0.005 * k);
    const auto snaps = simulate(cfg, make_atlas(5, 0.5));
    for (const auto& s : snaps) CHECK(s.ranks_consistent());
}

TEST_CASE("driftless unit-diffusion positions spread like brownian motions") {
    SimConfig cfg;
    cfg.n = 1000;
    cfg.dt = 1e-2;
    cfg.t_end = 1.0;
    cfg.seed = 31;
    cfg.initial_law = InitialLaw::point_mass(0.0);
    cfg.record_times = {1.0};
    const auto c = from_drifts(std::vector<double>(1000, 0.0));
    const auto snaps = simulate(cfg, c);
    REQUIRE(snaps.size() == 1);
    const auto& x = snaps[0].positions;
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / cfg.n;
    double var = 0.0;
    for (double xi : x) var += (xi - mean) * (xi - mean);
    var /= cfg.n;
    CHECK(std::abs(var - 1.0) <= 3.0 * std::sqrt(2.0 / cfg.n));
}

TEST_CASE("exchangeability: permuting positions and noise permutes the trajectory") {
    const auto c = from_drifts({0.5, 0.0, -0.5});
    auto s = make_state({0.3, -0.2, 0.9});
    auto sp = make_state({0.9, 0.3, -0.2});  // cyclic relabeling

    const std::vector<std::vector<double>> noises{
        {0.4, -1.1, 0.2}, {-0.3, 0.8, 1.4}, {2.0, -0.6, 0.1}};
    for (const auto& noise : noises) {
        const std::vector<double> noisep{noise[2], noise[0], noise[1]};
        s = step(s, c, 0.01, noise);
        sp = step(sp, c, 0.01, noisep);
        CHECK(sp.positions[0] == s.positions[2]);
        CHECK(sp.positions[1] == s.positions[0]);
        CHECK(sp.positions[2] == s.positions[1]);
    }
}

TEST_CASE("halving dt leaves the stationary gap mean inside the oracle band") {
    // discretization control: the time-step bias at the acceptance dt is
    // invisible next to the analytic value and shrinks under halving
    auto gap_mean = [](double dt, std::uint64_t seed) {
        SimConfig cfg;
        cfg.n = 2;
        cfg.dt = dt;
        cfg.t_end = 2000.0;
        cfg.seed = seed;
        cfg.initial_law = InitialLaw::point_mass(0.0);
        for (double t = 400.0; t <= cfg.t_end; t += 0.1) cfg.record_times.push_back(t);
        double sum = 0.0;
        long count = 0;
        simulate_visit(cfg, make_atlas(2, 1.0), [&](const ParticleState& s) {
            sum += s.position_at_rank(1) - s.position_at_rank(0);
            ++count;
        });
        return sum / static_cast<double>(count);
    };
    const double coarse = gap_mean(2e-3, 1234);
    const double fine = gap_mean(1e-3, 1234);
    // each estimate carries ~9e-3 of monte carlo noise (std)
    CHECK(std::abs(coarse - 0.5) <= 0.04);
    CHECK(std::abs(fine - 0.5) <= 0.04);
    CHECK(std::abs(fine - coarse) <= 0.04);
}

TEST_CASE("constant drift cancels in the gaps") {
    SimConfig cfg;
    cfg.n = 3;
    cfg.dt = 1e-2;
    cfg.t_end = 2.0;
    cfg.seed = 5;
    cfg.initial_law = InitialLaw::uniform(0.0, 1.0);
    for (int k = 0; k <= 200; ++k) cfg.record_times.push_back(0.01 * k);
    const auto base = simulate(cfg, from_drifts({0.0, 0.0, 0.0}));
    const auto shifted = simulate(cfg, from_drifts({0.7, 0.7, 0.7}));
    REQUIRE(base.size() == shifted.size());
    double max_gap_diff = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const auto ga = observables(base[i]).gaps;
        const auto gb = observables(shifted[i]).gaps;
        for (std::size_t k = 0; k < ga.size(); ++k)
            max_gap_diff = std::max(max_gap_diff, std::abs(ga[k] - gb[k]));
    }
    CHECK(max_gap_diff <= 1e-8);
}

TEST_CASE("long-run gap means match the stationary law (n = 3)") {
    const auto c = from_drifts({1.5, 0.5, 0.0});
    const auto law = stationary_gap_law(c);
    SimConfig cfg;
    cfg.n = 3;
    cfg.dt = 5e-3;
    cfg.t_end = 1500.0;
    cfg.seed = 23;
    cfg.initial_law = InitialLaw::point_mass(0.0);
    for (double t = 300.0; t <= cfg.t_end; t += 0.1) cfg.record_times.push_back(t);
    std::vector<double> gap_sum(2, 0.0);
    long count = 0;
    simulate_visit(cfg, c, [&](const ParticleState& s) {
        const auto gaps = observables(s).gaps;
        gap_sum[0] += gaps[0];
        gap_sum[1] += gaps[1];
        ++count;
    });
    for (int k = 0; k < 2; ++k) {
        const double mean = gap_sum[static_cast<std::size_t>(k)] / count;
        const double expected = 1.0 / law.rates[static_cast<std::size_t>(k)];
        CHECK(std::abs(mean - expected) <= 0.05 * expected);
    }
}

TEST_CASE("empirical cdf and quantile") {
    const auto s = make_state({0.0, 1.0, 2.0});
    CHECK(empirical_cdf(s, 1.0) == doctest::Approx(2.0 / 3.0));
    CHECK(empirical_cdf(s, -0.5) == 0.0);
    CHECK(empirical_cdf(s, 2.0) == 1.0);
    CHECK(empirical_cdf(s, 5.0) == 1.0);
    CHECK(empirical_cdf(s, 1.0) == doctest::Approx(2.0 / 3.0));

    CHECK(empirical_quantile(s, 1.0) == 2.0);
    CHECK(empirical_quantile(s, 0.4) == 1.0);
    CHECK(empirical_quantile(s, 1.0 / 3.0) == 0.0);
    CHECK_THROWS_AS(empirical_quantile(s, 0.0), std::domain_error);
    CHECK_THROWS_AS(empirical_quantile(s, 1.5), std::domain_error);

    // order-statistics identity at v = 1 - (p-1)/n
    const auto big = make_state({3.0, -1.0, 0.5, 2.0, -2.0, 1.5, 0.0});
    const int n = big.n();
    for (int p = 1; p <= n; ++p) {
        const double v = 1.0 - static_cast<double>(p - 1) / n;
        CHECK(empirical_quantile(big, v) == big.position_at_rank(n - p));
    }
}

TEST_CASE("observables") {
    const auto s = make_state({0.0, 2.0});
    const auto o = observables(s);
    CHECK(o.center_of_mass == doctest::Approx(1.0));
    CHECK(o.centered_positions[0] == doctest::Approx(-1.0));
    CHECK(o.centered_positions[1] == doctest::Approx(1.0));
    REQUIRE(o.gaps.size() == 1);
    CHECK(o.gaps[0] == doctest::Approx(2.0));

    const auto tied = observables(make_state({1.0, 1.0, 1.0}));
    for (double g : tied.gaps) CHECK(g == 0.0);
}

TEST_CASE("centre of mass drifts at the average coefficient") {
    const auto c = from_drifts({1.2, 0.6, 0.3, -0.1});
    const double b_bar =
        std::accumulate(c.drifts.begin(), c.drifts.end(), 0.0) / c.n();
    SimConfig cfg;
    cfg.n = 4;
    cfg.dt = 1e-2;
    cfg.t_end = 400.0;
    cfg.seed = 77;
    cfg.initial_law = InitialLaw::point_mass(0.0);
    cfg.record_times = {0.0, cfg.t_end};
    const auto snaps = simulate(cfg, c);
    const double com0 = observables(snaps.front()).center_of_mass;
    const double com1 = observables(snaps.back()).center_of_mass;
    const double rate = (com1 - com0) / cfg.t_end;
    // com is a brownian motion with variance sigma^2/n per unit time
    const double mc_std = std::sqrt(1.0 / (cfg.n * cfg.t_end));
    CHECK(std::abs(rate - b_bar) <= 3.0 * mc_std);
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.n = 0;
    CHECK_THROWS_AS(cfg.validate(), invalid_parameter);
    cfg.n = 2;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), invalid_parameter);
    cfg.dt = 0.1;
    cfg.t_end = 0.05;
    CHECK_THROWS_AS(cfg.validate(), invalid_parameter);
    cfg.t_end = 1.0;
    cfg.record_times = {2.0};
    CHECK_THROWS_AS(cfg.validate(), invalid_parameter);
    cfg.record_times = {0.5};
    CHECK_NOTHROW(cfg.validate());
}
