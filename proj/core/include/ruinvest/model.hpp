#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ruinvest {

class RngStream;

// Claim-size distribution. All families produce strictly positive magnitudes;
// the sign of a claim is decided by which intensity fired, not by the draw.
enum class DistFamily { exponential, pareto, constant, lognormal };

struct ClaimDist {
    DistFamily family = DistFamily::exponential;
    double p1 = 1.0;  // rate / scale / value / mu
    double p2 = 0.0;  // unused / shape / unused / sigma

    static ClaimDist exponential(double rate);
    static ClaimDist pareto(double scale, double shape);
    static ClaimDist constant(double value);
    static ClaimDist lognormal(double mu, double sigma);

    double sample(RngStream& rng) const;
    // E |x|^q; +infinity when the moment diverges (Pareto with q >= shape).
    double fractional_moment(double q) const;
    double mean_abs() const { return fractional_moment(1.0); }
    std::string describe() const;
};

// Telegraph-modulated log-price: within regime k the log-price has drift a_k and
// volatility sigma_k; the regime flips 0->1 at rate lambda01 and 1->0 at lambda10.
struct RegimeParams {
    double a0 = 0.0, a1 = 0.0;
    double sigma0 = 1.0, sigma1 = 1.0;
    double lambda01 = 1.0, lambda10 = 1.0;

    double beta0() const { return 2.0 * a0 / (sigma0 * sigma0) - 1.0; }
    double beta1() const { return 2.0 * a1 / (sigma1 * sigma1) - 1.0; }
};

// Raised when beta0 == beta1 exactly: the two-regime analysis collapses to a
// constant-parameter model whose exponent is 2a/sigma^2 - 1.
struct DegenerateRegimes : std::runtime_error {
    explicit DegenerateRegimes(double exponent)
        : std::runtime_error("regime exponents coincide; collapse exponent = " +
                             std::to_string(exponent)),
          collapse_exponent(exponent) {}
    double collapse_exponent;
};

struct CanonicalRegimes {
    RegimeParams params;  // relabeled so beta0 < beta1
    bool swapped;         // true when user labels 0/1 were exchanged
};

// Relabels regimes so beta0 < beta1 (comparison is exact floating-point).
// Throws DegenerateRegimes when beta0 == beta1.
CanonicalRegimes canonicalize(const RegimeParams& regimes);

// Claim flow dP = c dt + dS: premium at rate c, downward claims (against the
// reserve) at Poisson rate alpha1 with magnitudes ~ f1, upward jumps at rate
// alpha2 with magnitudes ~ f2. A distribution field is unused when its
// intensity is zero.
struct ClaimModel {
    double premium_rate = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    ClaimDist f1;
    ClaimDist f2;
};

struct ModelSpec {
    RegimeParams regimes;
    ClaimModel claims;
    int initial_regime = 0;
};

enum class CheckStatus { pass, fail, pending };

struct ValidationCheck {
    std::string name;
    CheckStatus status;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    double beta_lo = 0.0;  // min(beta0, beta1)
    double beta_hi = 0.0;
    bool swapped = false;

    // Pending checks (the claim moment condition needs the solved exponent)
    // do not count against validity.
    bool ok() const {
        for (const auto& c : checks)
            if (c.status == CheckStatus::fail) return false;
        return true;
    }
};

// Audits the standing assumptions; reports rather than throws. The claim
// moment condition is reported as pending since it depends on the solved
// exponent.
ValidationReport validate_model(const ModelSpec& spec);

}  // namespace ruinvest
