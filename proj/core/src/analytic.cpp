#include "ruinvest/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ruinvest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double denom0(double q, const RegimeParams& r) {
    return r.lambda01 + 0.5 * r.sigma0 * r.sigma0 * q * (r.beta0() - q);
}

double denom1(double q, const RegimeParams& r) {
    return r.lambda10 + 0.5 * r.sigma1 * r.sigma1 * q * (r.beta1() - q);
}

}  // namespace

MgfValue mgf_f0(double q, const RegimeParams& regimes) {
    double d = denom0(q, regimes);
    if (d <= 0.0) return {kInf, false};
    return {regimes.lambda01 / d, true};
}

MgfValue mgf_f1(double q, const RegimeParams& regimes) {
    double d = denom1(q, regimes);
    if (d <= 0.0) return {kInf, false};
    return {regimes.lambda10 / d, true};
}

MgfValue mgf_f(double q, const RegimeParams& regimes) {
    MgfValue a = mgf_f0(q, regimes);
    MgfValue b = mgf_f1(q, regimes);
    if (!a.in_domain || !b.in_domain) return {kInf, false};
    return {a.value * b.value, true};
}

CubicCoeffs characteristic_cubic_coeffs(const RegimeParams& r) {
    double s0 = r.sigma0 * r.sigma0;
    double s1 = r.sigma1 * r.sigma1;
    double b0 = r.beta0();
    double b1 = r.beta1();
    CubicCoeffs c;
    c.c3 = s0 * s1;
    c.c2 = -s0 * s1 * (b0 + b1);
    c.c1 = s0 * s1 * b0 * b1 - 2.0 * (s0 * r.lambda10 + s1 * r.lambda01);
    c.c0 = 2.0 * (s0 * r.lambda10 * b0 + s1 * r.lambda01 * b1);
    return c;
}

double CubicCoeffs::scale() const {
    return std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
}

double characteristic_cubic(double q, const RegimeParams& regimes) {
    CubicCoeffs c = characteristic_cubic_coeffs(regimes);
    return ((c.c3 * q + c.c2) * q + c.c1) * q + c.c0;
}

BetaSolution solve_beta(const RegimeParams& regimes) {
    double b0 = regimes.beta0();
    double b1 = regimes.beta1();
    if (!(b0 > 0.0)) {
        std::ostringstream os;
        os << "solve_beta requires beta0 > 0 (canonical input); got beta0 = " << b0;
        throw PreconditionViolated(os.str());
    }
    if (!(b0 < b1)) {
        std::ostringstream os;
        os << "solve_beta requires beta0 < beta1 (canonical input); got beta0 = " << b0
           << ", beta1 = " << b1;
        throw PreconditionViolated(os.str());
    }

    auto g = [&regimes](double q) { return characteristic_cubic(q, regimes); };

    // C(b0) = 2 s1 l01 (b1-b0) > 0 and C(b1) = 2 s0 l10 (b0-b1) < 0, so the
    // inset bracket can only fail by rounding right at an endpoint; widen to
    // the exact endpoints in that case.
    double inset = 1e-12 * (b1 - b0);
    double lo = b0 + inset, hi = b1 - inset;
    double glo = g(lo), ghi = g(hi);
    if (!(glo > 0.0)) { lo = b0; glo = g(lo); }
    if (!(ghi < 0.0)) { hi = b1; ghi = g(hi); }
    if (!(glo > 0.0 && ghi < 0.0))
        throw IdentityViolated("characteristic cubic lost its sign change on ]beta0, beta1[");

    // Brent: bisection-safeguarded inverse quadratic / secant steps.
    double a = lo, b = hi, fa = glo, fb = ghi;
    double c = a, fc = fa, d = b - a, e = d;
    int iterations = 0;
    constexpr double kTolX = 1e-14;
    for (int it = 0; it < 200; ++it) {
        ++iterations;
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * kTolX;
        double m = 0.5 * (c - b);
        if (fb == 0.0 || std::abs(m) <= tol) break;
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = m; e = m;  // bisection
        } else {
            double s = fb / fa, p, qd;
            if (a == c) {
                p = 2.0 * m * s;
                qd = 1.0 - s;
            } else {
                double qa = fa / fc, r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                qd = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) qd = -qd; else p = -p;
            if (2.0 * p < std::min(3.0 * m * qd - std::abs(tol * qd), std::abs(e * qd))) {
                e = d; d = p / qd;  // accept interpolation
            } else {
                d = m; e = m;
            }
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = g(b);
        if ((fb > 0.0) == (fc > 0.0)) { c = a; fc = fa; d = b - a; e = d; }
    }

    BetaSolution sol;
    sol.beta = b;
    sol.bracket_lo = std::min(b, c);
    sol.bracket_hi = std::max(b, c);
    sol.iterations = iterations;
    sol.residual_cubic = std::abs(g(sol.beta));

    MgfValue f = mgf_f(sol.beta, regimes);
    sol.residual_f = f.in_domain ? std::abs(f.value - 1.0) : kInf;

    // Self-checks: the root must sit inside the convergence domain, which the
    // positivity identities certify. Failure here means a solver bug.
    if (!f.in_domain)
        throw IdentityViolated("solved exponent fell outside the domain of f");
    PositivityIdentityReport idr = check_positivity_identities(sol.beta, regimes);
    if (!idr.ok())
        throw IdentityViolated("positivity identities fail at the solved exponent");
    return sol;
}

PositivityIdentityReport check_positivity_identities(double q, const RegimeParams& r) {
    double s0 = r.sigma0 * r.sigma0;
    double s1 = r.sigma1 * r.sigma1;
    double b0 = r.beta0();
    double b1 = r.beta1();

    PositivityIdentityReport rep;
    rep.lhs01 = 0.5 * s0 * q * (b0 - q) + r.lambda01;
    rep.rhs01 = -(s0 * (b0 - q)) / (s1 * (b1 - q)) * r.lambda10;
    rep.lhs10 = 0.5 * s1 * q * (b1 - q) + r.lambda10;
    rep.rhs10 = -(s1 * (b1 - q)) / (s0 * (b0 - q)) * r.lambda01;

    auto rel = [](double x, double y) {
        double s = std::max({std::abs(x), std::abs(y), 1e-300});
        return std::abs(x - y) / s;
    };
    constexpr double kTol = 1e-9;
    rep.rel_err01 = rel(rep.lhs01, rep.rhs01);
    rep.rel_err10 = rel(rep.lhs10, rep.rhs10);
    rep.ok01 = rep.lhs01 > 0.0 && rep.rhs01 > 0.0 && rep.rel_err01 <= kTol;
    rep.ok10 = rep.lhs10 > 0.0 && rep.rhs10 > 0.0 && rep.rel_err10 <= kTol;
    return rep;
}

MomentCondition moment_condition(const ClaimModel& claims, double q) {
    MomentCondition mc{true, 0.0};
    if (claims.alpha1 > 0.0) {
        double m = claims.f1.fractional_moment(q);
        if (std::isinf(m)) mc.finite = false;
        mc.value += claims.alpha1 * m;
    }
    if (claims.alpha2 > 0.0) {
        double m = claims.f2.fractional_moment(q);
        if (std::isinf(m)) mc.finite = false;
        mc.value += claims.alpha2 * m;
    }
    return mc;
}

MgfValue expected_discount_integral(double q, const RegimeParams& regimes) {
    double d0 = denom0(q, regimes);
    double d1 = denom1(q, regimes);
    if (d0 <= 0.0 || d1 <= 0.0) return {kInf, false};
    return {1.0 / d0 + (regimes.lambda01 / d0) * (1.0 / d1), true};
}

}  // namespace ruinvest
