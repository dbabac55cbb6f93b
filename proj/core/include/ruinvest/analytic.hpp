#pragma once

#include <stdexcept>

#include "ruinvest/model.hpp"

namespace ruinvest {

// Value of a cycle moment E M^q or of the expected discounted time integral.
// in_domain is the authoritative convergence flag; value is set to +infinity
// outside the domain so it can never be mistaken for a finite result.
struct MgfValue {
    double value;
    bool in_domain;
};

// Per-leg moment factors of M = e^{-V(tau2)} over one regime cycle:
//   f0(q) = lambda01 / D0(q),  D0(q) = lambda01 + sigma0^2 q (beta0 - q) / 2
//   f1(q) = lambda10 / D1(q),  D1(q) = lambda10 + sigma1^2 q (beta1 - q) / 2
// and the full-cycle moment f(q) = f0(q) f1(q). Defined while D0, D1 > 0.
MgfValue mgf_f0(double q, const RegimeParams& regimes);
MgfValue mgf_f1(double q, const RegimeParams& regimes);
MgfValue mgf_f(double q, const RegimeParams& regimes);

// f(q) = 1 clears to a cubic: multiplying out D0(q) D1(q) = lambda01 lambda10
// gives q/4 times
//   C(q) = s0 s1 q (b0-q)(b1-q) + 2 s0 l10 (b0-q) + 2 s1 l01 (b1-q),
// with s_k = sigma_k^2. C(b0) > 0 > C(b1), so a root is bracketed in ]b0,b1[.
struct CubicCoeffs {
    double c3, c2, c1, c0;
    double scale() const;  // max |coefficient|, for residual scaling
};
CubicCoeffs characteristic_cubic_coeffs(const RegimeParams& regimes);
double characteristic_cubic(double q, const RegimeParams& regimes);

struct PreconditionViolated : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Signals a solver self-check failure (root reported where the positivity
// identities do not hold); indicates a bug, not bad input.
struct IdentityViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BetaSolution {
    double beta;
    double residual_f;      // |f(beta) - 1|
    double residual_cubic;  // |C(beta)|
    double bracket_lo, bracket_hi;
    int iterations;
};

// Solves C(q) = 0 on ]beta0, beta1[ by bracketed Brent iteration. Requires
// canonical input: throws PreconditionViolated unless 0 < beta0 < beta1.
BetaSolution solve_beta(const RegimeParams& regimes);

// At the root, each rearranged side of D0 D1 = l01 l10 must be positive:
//   s0 q (b0-q)/2 + l01 = -[s0 (b0-q)] / [s1 (b1-q)] * l10  > 0
//   s1 q (b1-q)/2 + l10 = -[s1 (b1-q)] / [s0 (b0-q)] * l01  > 0
// which places the root inside the convergence domain of f. Evaluating at a
// non-root q makes the equalities fail, so this doubles as a root check.
struct PositivityIdentityReport {
    double lhs01, rhs01;
    double lhs10, rhs10;
    double rel_err01, rel_err10;
    bool ok01, ok10;
    bool ok() const { return ok01 && ok10; }
};
PositivityIdentityReport check_positivity_identities(double q, const RegimeParams& regimes);

// alpha1 E_f1 |x|^q + alpha2 E_f2 |x|^q; finite = false when a Pareto moment
// diverges. Terms with zero intensity are skipped.
struct MomentCondition {
    bool finite;
    double value;
};
MomentCondition moment_condition(const ClaimModel& claims, double q);

// E int_0^{tau2} e^{-q V_s} ds = A0(q) + f0(q) A1(q) with A_k = 1/D_k(q),
// by Fubini over the two legs. At q = 0 this is E tau2 = 1/l01 + 1/l10.
MgfValue expected_discount_integral(double q, const RegimeParams& regimes);

}  // namespace ruinvest
