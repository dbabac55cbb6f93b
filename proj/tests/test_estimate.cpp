#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ruinvest/analytic.hpp"
#include "ruinvest/estimate.hpp"
#include "ruinvest/model.hpp"
#include "ruinvest/rng.hpp"

using namespace ruinvest;

namespace {

ModelSpec reference_model() {
    ModelSpec spec;
    spec.regimes.a0 = 1.0;
    spec.regimes.a1 = 2.0;
    spec.regimes.sigma0 = 1.0;
    spec.regimes.sigma1 = 1.0;
    spec.regimes.lambda01 = 1.0;
    spec.regimes.lambda10 = 1.0;
    spec.claims.premium_rate = 1.2;
    spec.claims.alpha1 = 1.0;
    spec.claims.f1 = ClaimDist::exponential(1.0);
    spec.claims.alpha2 = 0.0;
    return spec;
}

// Deterministic quantile samples of a Pareto(1, beta) law: empirical tails
// then follow u^-beta with no Monte Carlo noise.
std::vector<double> pareto_quantiles(double beta, std::size_t n) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        xs[i] = std::pow(1.0 - p, -1.0 / beta);
    }
    return xs;
}

std::vector<double> exponential_quantiles(double rate, std::size_t n) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        xs[i] = -std::log(1.0 - p) / rate;
    }
    return xs;
}

}  // namespace

TEST_CASE("wilson interval matches frozen references and basic properties") {
    auto w = wilson_ci(5, 10);
    CHECK(w.lo == doctest::Approx(0.23659309051256398).epsilon(1e-10));
    CHECK(w.hi == doctest::Approx(0.76340690948743602).epsilon(1e-10));

    auto zero = wilson_ci(0, 50);
    CHECK(zero.lo == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(zero.hi == doctest::Approx(0.07134759913335873).epsilon(1e-10));

    auto full = wilson_ci(50, 50);
    CHECK(full.hi == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(full.lo == doctest::Approx(1.0 - 0.07134759913335873).epsilon(1e-10));

    CHECK_THROWS_AS(wilson_ci(1, 0), EmptyInput);

    // interval always contains the point estimate
    for (std::size_t k : {0u, 1u, 7u, 100u}) {
        auto ci = wilson_ci(k, 100);
        const double phat = static_cast<double>(k) / 100.0;
        CHECK(ci.lo <= phat);
        CHECK(ci.hi >= phat);
    }
}

TEST_CASE("empirical tail counts strictly above each level") {
    const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0, 5.0};
    const std::vector<double> grid = {2.5, 3.0, 4.0};
    auto tail = empirical_tail(xs, grid);
    REQUIRE(tail.u.size() == 3);
    CHECK(tail.g_bar[0] == doctest::Approx(0.6));
    CHECK(tail.g_bar[1] == doctest::Approx(0.4));  // the tie at 3 sits below
    CHECK(tail.g_bar[2] == doctest::Approx(0.2));
    CHECK(tail.n == 5);
    CHECK(tail.ci_half_width[0] > 0.0);

    CHECK_THROWS_AS(empirical_tail(std::vector<double>{}, grid), EmptyInput);
}

TEST_CASE("default grid is geometric with twenty points per decade") {
    auto xs = pareto_quantiles(1.5, 50'000);
    auto grid = default_u_grid(xs);
    REQUIRE(grid.size() >= 21);
    const double ratio = std::pow(10.0, 1.0 / 20.0);
    for (std::size_t i = 1; i < grid.size(); ++i)
        CHECK(grid[i] / grid[i - 1] == doctest::Approx(ratio).epsilon(1e-9));

    // all-nonpositive samples have no usable tail
    std::vector<double> neg(100, -1.0);
    CHECK_THROWS_AS(default_u_grid(neg), InsufficientTailPoints);

    // mostly-negative samples fall back to the positive part
    std::vector<double> mixed(1'000, -2.0);
    for (std::size_t i = 0; i < 200; ++i) mixed[i] = static_cast<double>(i + 1);
    auto g2 = default_u_grid(mixed);
    CHECK(g2.front() > 0.0);
}

TEST_CASE("hill estimator recovers a synthetic pareto index") {
    RngStream rng(13, 0);
    const std::size_t n = 20'000;
    std::vector<double> xs(n);
    const double beta_true = 1.7;
    for (auto& x : xs) x = std::pow(rng.next_uniform(), -1.0 / beta_true);

    auto h = hill_estimate(xs);
    CHECK(h.k == static_cast<std::size_t>(std::pow(static_cast<double>(n), 2.0 / 3.0)));
    CHECK(std::abs(h.beta - beta_true) < 0.1);
    CHECK(h.ci_lo < beta_true);
    CHECK(h.ci_hi > beta_true);

    auto h_small = hill_estimate(xs, 200);
    CHECK(h_small.k == 200);
    CHECK(std::abs(h_small.beta - beta_true) < 0.4);

    CHECK_THROWS_AS(hill_estimate(std::vector<double>{-1.0, -2.0}), InsufficientPositiveSamples);
}

TEST_CASE("loglog fit separates power laws from exponential tails") {
    auto xs = pareto_quantiles(1.5, 100'000);
    auto tail = empirical_tail(xs, default_u_grid(xs));
    auto fit = loglog_fit(tail);
    CHECK(fit.slope == doctest::Approx(-1.5).epsilon(0.02));
    CHECK(fit.r2 > 0.999);
    CHECK_FALSE(fit.curved);
    CHECK(fit.n_points >= 5);

    auto es = exponential_quantiles(1.0, 100'000);
    auto etail = empirical_tail(es, default_u_grid(es));
    auto efit = loglog_fit(etail);
    CHECK(efit.curved);  // exponential decay bends hard in log-log

    EmpiricalTail empty_tail;
    empty_tail.u = {1.0, 2.0};
    empty_tail.g_bar = {0.0, 0.0};
    empty_tail.ci_half_width = {0.0, 0.0};
    empty_tail.n = 10;
    CHECK_THROWS_AS(loglog_fit(empty_tail), InsufficientTailPoints);
}

TEST_CASE("plateau stabilizes exactly for power laws and drifts for exponentials") {
    auto xs = pareto_quantiles(1.5, 100'000);
    auto tail = empirical_tail(xs, default_u_grid(xs));
    auto plat = c_plus_plateau(tail, 1.5);
    CHECK(plat.stable);
    CHECK(plat.max_over_min < 1.5);
    REQUIRE(plat.u.size() >= 2);
    // top decade only
    CHECK(plat.u.front() >= plat.u.back() / 10.0 * (1.0 - 1e-12));

    auto es = exponential_quantiles(1.0, 100'000);
    auto etail = empirical_tail(es, default_u_grid(es));
    auto eplat = c_plus_plateau(etail, 1.5);
    CHECK_FALSE(eplat.stable);
}

TEST_CASE("tail report bundles the estimators consistently") {
    RngStream rng(17, 4);
    const std::size_t n = 60'000;
    std::vector<double> xs(n);
    for (auto& x : xs) {
        // two-sided toy perpetuity: positive pareto tail, light negative side
        const double u = rng.next_uniform();
        x = u < 0.7 ? std::pow(rng.next_uniform(), -1.0 / 1.5) - 1.0
                    : -rng.next_exponential(1.0);
    }
    auto rep = tail_report(xs, 1.5);
    CHECK(rep.beta_analytic == 1.5);
    CHECK(rep.hill_sweep.size() == 3);
    CHECK(rep.hill_sweep[0].k < rep.hill_sweep[1].k);
    CHECK(rep.hill_sweep[1].k < rep.hill_sweep[2].k);
    CHECK(rep.tail.u.size() == rep.tail.g_bar.size());
    CHECK(std::abs(rep.hill.beta - 1.5) < 0.25);
    CHECK(rep.c_minus_estimable);  // 30% of 60k negatives is plenty
}

TEST_CASE("ruin estimates respect their own sandwich pathwise") {
    auto spec = reference_model();
    SimConfig cfg;
    cfg.n_paths = 4'000;
    const std::vector<double> grid = {2.0, 5.0, 10.0};
    auto est = estimate_ruin(spec, cfg, grid, 424242);
    CHECK(est.g_bar_zero_min > 0.0);
    CHECK(est.g_bar_zero_min <=
          std::min(est.regime[0].g_bar_zero, est.regime[1].g_bar_zero) + 1e-15);
    for (int r = 0; r < 2; ++r) {
        const auto& per = est.regime[r];
        REQUIRE(per.psi_hat.size() == grid.size());
        CHECK(per.n_paths == 4'000);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            // lower bound holds sample-by-sample: {Y_inf > u} implies {sup >= u}
            CHECK(per.sandwich_lo[i] <= per.psi_hat[i]);
            CHECK(per.psi_hat[i] <= per.sandwich_hi[i] + 1e-12);
            CHECK(per.ci_lo[i] <= per.psi_hat[i]);
            CHECK(per.ci_hi[i] >= per.psi_hat[i]);
            CHECK(per.trunc_bias[i] < 1e-10);
            if (i > 0) CHECK(per.psi_hat[i] <= per.psi_hat[i - 1]);
        }
    }
}

TEST_CASE("perpetuity moment audit passes on the reference model") {
    auto spec = reference_model();
    SimConfig cfg;
    cfg.n_paths = 50'000;  // cycles for this audit
    const double beta = solve_beta(spec.regimes).beta;
    auto rep = kesten_conditions_report(spec, cfg, beta, 31337);
    CHECK(rep.n_cycles == 50'000);
    CHECK(rep.m_beta_within_4se);
    CHECK(std::abs(rep.m_beta_mean - 1.0) <= 4.0 * rep.m_beta_se);
    CHECK(rep.m_beta.stable);
    CHECK(rep.log_moment.stable);
    CHECK(rep.log_moment.full_mean > 0.0);
    CHECK(rep.q_moment.full_mean > 0.0);
    CHECK(rep.q_moment_finite_analytic);
    CHECK_FALSE(rep.nonarithmetic_note.empty());
}

TEST_CASE("perpetuity moment audit flags an infinite claim moment") {
    auto spec = reference_model();
    spec.claims.f1 = ClaimDist::pareto(1.0, 1.2);  // E|X|^beta = infinity
    const double beta = solve_beta(spec.regimes).beta;
    SimConfig cfg;
    cfg.n_paths = 50'000;
    auto rep = kesten_conditions_report(spec, cfg, beta, 31337);
    CHECK_FALSE(rep.q_moment_finite_analytic);
    // conditional M^beta statistics ignore claims and stay healthy
    CHECK(rep.m_beta_within_4se);

    SimConfig tiny;
    tiny.n_paths = 1;
    CHECK_THROWS_AS(kesten_conditions_report(spec, tiny, beta, 1), EmptyInput);
}
