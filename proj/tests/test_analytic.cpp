#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>

#include "oracles.hpp"
#include "ruinvest/analytic.hpp"
#include "ruinvest/model.hpp"
#include "ruinvest/rng.hpp"

using namespace ruinvest;

namespace {

RegimeParams make_regimes(double a0, double a1, double s0, double s1, double l01, double l10) {
    RegimeParams r;
    r.a0 = a0;
    r.a1 = a1;
    r.sigma0 = s0;
    r.sigma1 = s1;
    r.lambda01 = l01;
    r.lambda10 = l10;
    return r;
}

RegimeParams reference_regimes() { return make_regimes(1.0, 2.0, 1.0, 1.0, 1.0, 1.0); }

// Root frozen from a high-precision solve of q^3 - 4q^2 - q + 8 in ]1, 2[.
constexpr double kBetaReference = 1.64207363248150025;
// Root of q^3 - 2.5q^2 - 5q + 9 in ]0.5, 2[ (lambda01=2, lambda10=1,
// beta0=0.5, beta1=2).
constexpr double kBetaAsymmetric = 1.37468516450032118;

}  // namespace

TEST_CASE("cubic coefficients reduce to the frozen polynomial on reference params") {
    auto c = characteristic_cubic_coeffs(reference_regimes());
    CHECK(c.c3 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.c2 == doctest::Approx(-4.0).epsilon(1e-15));
    CHECK(c.c1 == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(c.c0 == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(characteristic_cubic(1.0, reference_regimes()) == doctest::Approx(4.0));
    CHECK(characteristic_cubic(2.0, reference_regimes()) == doctest::Approx(-2.0));
}

TEST_CASE("solver hits the oracle root on the reference model") {
    auto sol = solve_beta(reference_regimes());
    CHECK(std::abs(sol.beta - kBetaReference) <= 1e-12);
    CHECK(sol.residual_f <= 1e-12);
    CHECK(sol.residual_cubic <= 1e-10);
    CHECK(sol.bracket_lo > 1.0);
    CHECK(sol.bracket_hi < 3.0);

    // Independent confirmation: sign scan + bisection on {8, -1, -4, 1}
    auto roots = oracle::poly_roots_in({8.0, -1.0, -4.0, 1.0}, 1.0, 3.0);
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(sol.beta - roots[0]) <= 1e-10);
}

TEST_CASE("solver hits the oracle root on an asymmetric model") {
    // beta0 = 0.5 (a0 = 0.75), beta1 = 2 (a1 = 1.5), lambda01 = 2, lambda10 = 1
    auto reg = make_regimes(0.75, 1.5, 1.0, 1.0, 2.0, 1.0);
    auto sol = solve_beta(reg);
    CHECK(std::abs(sol.beta - kBetaAsymmetric) <= 1e-12);

    auto roots = oracle::poly_roots_in({9.0, -5.0, -2.5, 1.0}, 0.5, 2.0);
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(sol.beta - roots[0]) <= 1e-10);
}

TEST_CASE("solve is well under a millisecond") {
    auto reg = reference_regimes();
    // warm up
    solve_beta(reg);
    const int reps = 1000;
    auto start = std::chrono::steady_clock::now();
    double acc = 0.0;
    for (int i = 0; i < reps; ++i) acc += solve_beta(reg).beta;
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(acc > 0.0);
    CHECK(elapsed / reps < 1e-3);
}

TEST_CASE("mgf matches quadrature of the defining per-leg integral") {
    auto reg = make_regimes(0.9, 1.7, 1.1, 0.8, 1.4, 0.6);
    for (double q : {0.1, 0.4, 0.8}) {
        auto f0 = mgf_f0(q, reg);
        auto f1 = mgf_f1(q, reg);
        REQUIRE(f0.in_domain);
        REQUIRE(f1.in_domain);
        const double o0 = oracle::leg_mgf(reg.lambda01, reg.sigma0, reg.beta0(), q);
        const double o1 = oracle::leg_mgf(reg.lambda10, reg.sigma1, reg.beta1(), q);
        CHECK(f0.value == doctest::Approx(o0).epsilon(1e-8));
        CHECK(f1.value == doctest::Approx(o1).epsilon(1e-8));
        CHECK(mgf_f(q, reg).value == doctest::Approx(f0.value * f1.value).epsilon(1e-14));
    }
}

TEST_CASE("mgf leaves its domain where a leg denominator vanishes") {
    auto reg = reference_regimes();
    // D0(q) = 1 + q(1-q)/2 vanishes at q = 2 (domain edge for the product)
    CHECK(mgf_f(1.99, reg).in_domain);
    CHECK_FALSE(mgf_f(2.0, reg).in_domain);
    CHECK_FALSE(mgf_f(2.5, reg).in_domain);
    CHECK(mgf_f(2.0, reg).value == std::numeric_limits<double>::infinity());
}

TEST_CASE("f crosses 1 inside ]beta0, beta1[") {
    auto reg = reference_regimes();
    CHECK(mgf_f(reference_regimes().beta0(), reg).value < 1.0);
    // near beta1 from inside the domain the product exceeds 1
    CHECK(mgf_f(1.9, reg).value > 1.0);
    CHECK(mgf_f(0.0, reg).value == doctest::Approx(1.0));
    CHECK(mgf_f(1.0, reg).value == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("cubic identity holds for random admissible parameter draws") {
    RngStream rng(2024, 0);
    int tested = 0;
    while (tested < 200) {
        auto reg = make_regimes(0.6 + 1.4 * rng.next_uniform(), 0.6 + 1.9 * rng.next_uniform(),
                                0.4 + 1.2 * rng.next_uniform(), 0.4 + 1.2 * rng.next_uniform(),
                                0.2 + 2.0 * rng.next_uniform(), 0.2 + 2.0 * rng.next_uniform());
        if (reg.beta0() <= 0.0 || reg.beta1() <= 0.0) continue;
        if (std::abs(reg.beta0() - reg.beta1()) < 1e-3) continue;
        ++tested;

        // 4 (D0 D1 - l01 l10) = q * C(q) for every q
        for (double q : {0.3, 0.9, 1.7, 2.6}) {
            const double s0 = reg.sigma0 * reg.sigma0, s1 = reg.sigma1 * reg.sigma1;
            const double d0 = reg.lambda01 + 0.5 * s0 * q * (reg.beta0() - q);
            const double d1 = reg.lambda10 + 0.5 * s1 * q * (reg.beta1() - q);
            const double lhs = 4.0 * (d0 * d1 - reg.lambda01 * reg.lambda10);
            const double rhs = q * characteristic_cubic(q, reg);
            CHECK(std::abs(lhs - rhs) <=
                  1e-11 * std::max(1.0, std::max(std::abs(lhs), std::abs(rhs))));
        }

        auto canon = canonicalize(reg);
        auto sol = solve_beta(canon.params);
        CHECK(sol.beta > canon.params.beta0());
        CHECK(sol.beta < canon.params.beta1());
        CHECK(sol.residual_f <= 1e-10);

        // the root is where the MGF product equals one, verified off-solver
        auto f = mgf_f(sol.beta, canon.params);
        REQUIRE(f.in_domain);
        CHECK(f.value == doctest::Approx(1.0).epsilon(1e-9));

        // oracle agreement on the raw cubic
        auto cc = characteristic_cubic_coeffs(canon.params);
        auto roots = oracle::poly_roots_in({cc.c0, cc.c1, cc.c2, cc.c3}, canon.params.beta0(),
                                           canon.params.beta1(), 20'000);
        REQUIRE(roots.size() >= 1);
        double best = roots[0];
        for (double r : roots)
            if (std::abs(r - sol.beta) < std::abs(best - sol.beta)) best = r;
        CHECK(std::abs(best - sol.beta) <= 1e-9);

        // positivity identities certify beta sits in dom f
        auto ident = check_positivity_identities(sol.beta, canon.params);
        CHECK(ident.ok());
    }
}

TEST_CASE("solving is invariant under regime relabeling") {
    auto reg = make_regimes(0.75, 1.5, 1.0, 1.0, 2.0, 1.0);
    RegimeParams flipped = reg;
    std::swap(flipped.a0, flipped.a1);
    std::swap(flipped.sigma0, flipped.sigma1);
    std::swap(flipped.lambda01, flipped.lambda10);
    auto sol = solve_beta(canonicalize(reg).params);
    auto sol_flipped = solve_beta(canonicalize(flipped).params);
    CHECK(sol.beta == doctest::Approx(sol_flipped.beta).epsilon(1e-14));
}

TEST_CASE("positivity identities fail away from the root") {
    auto reg = reference_regimes();
    auto at_beta0 = check_positivity_identities(reg.beta0(), reg);
    CHECK_FALSE(at_beta0.ok());
    auto off_root = check_positivity_identities(1.3, reg);
    CHECK_FALSE(off_root.ok());
}

TEST_CASE("solver rejects models with a nonpositive lower exponent") {
    // beta0 = -0.2: ruin is not a power law in this regime mix
    auto reg = make_regimes(0.4, 1.5, 1.0, 1.0, 1.0, 1.0);
    CHECK_THROWS_AS(solve_beta(reg), PreconditionViolated);
}

TEST_CASE("frozen identity values at the reference root") {
    auto reg = reference_regimes();
    auto ident = check_positivity_identities(kBetaReference, reg);
    // lhs01 = lambda01 + s0 beta (beta0 - beta)/2 at the frozen root
    CHECK(ident.lhs01 == doctest::Approx(0.47283390899525555).epsilon(1e-12));
    CHECK(ident.lhs10 == doctest::Approx(2.11490754147675580).epsilon(1e-12));
    CHECK(ident.ok());
}

TEST_CASE("claim moment condition tracks the distribution tail") {
    ClaimModel claims;
    claims.premium_rate = 1.2;
    claims.alpha1 = 1.0;
    claims.f1 = ClaimDist::exponential(1.0);
    auto mc = moment_condition(claims, 1.64);
    CHECK(mc.finite);
    // E|X|^1.64 = Gamma(2.64), digits frozen from a high-precision evaluation
    CHECK(mc.value == doctest::Approx(1.47377292947296724).epsilon(1e-12));

    claims.f1 = ClaimDist::pareto(1.0, 1.2);
    CHECK_FALSE(moment_condition(claims, 1.64).finite);
    CHECK(moment_condition(claims, 1.1).finite);

    // zero-intensity legs contribute nothing even with heavy distributions
    claims.f1 = ClaimDist::exponential(1.0);
    claims.alpha2 = 0.0;
    claims.f2 = ClaimDist::pareto(1.0, 0.5);
    CHECK(moment_condition(claims, 1.64).finite);
}

TEST_CASE("expected discounted time integral matches frozen closed forms") {
    auto reg = reference_regimes();
    // at q = 0 this is just the mean cycle length
    CHECK(expected_discount_integral(0.0, reg).value == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(expected_discount_integral(1.0, reg).value == doctest::Approx(1.5).epsilon(1e-14));
    auto at_beta = expected_discount_integral(kBetaReference, reg);
    REQUIRE(at_beta.in_domain);
    CHECK(at_beta.value == doctest::Approx(3.11490754147675580).epsilon(1e-12));
    // beyond the domain edge the integral diverges
    CHECK_FALSE(expected_discount_integral(2.0, reg).in_domain);
}
