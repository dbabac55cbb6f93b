#include "ruinvest/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ruinvest/rng.hpp"

namespace ruinvest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

ClaimDist ClaimDist::exponential(double rate) {
    require(rate > 0.0, "exponential claim: rate must be > 0");
    return {DistFamily::exponential, rate, 0.0};
}

ClaimDist ClaimDist::pareto(double scale, double shape) {
    require(scale > 0.0, "pareto claim: scale must be > 0");
    require(shape > 0.0, "pareto claim: shape must be > 0");
    return {DistFamily::pareto, scale, shape};
}

ClaimDist ClaimDist::constant(double value) {
    require(value > 0.0, "constant claim: value must be > 0");
    return {DistFamily::constant, value, 0.0};
}

ClaimDist ClaimDist::lognormal(double mu, double sigma) {
    require(sigma > 0.0, "lognormal claim: sigma must be > 0");
    return {DistFamily::lognormal, mu, sigma};
}

double ClaimDist::sample(RngStream& rng) const {
    switch (family) {
        case DistFamily::exponential:
            return rng.next_exponential(p1);
        case DistFamily::pareto:
            // survival (scale/x)^shape inverted at a uniform in (0,1)
            return p1 * std::pow(rng.next_uniform(), -1.0 / p2);
        case DistFamily::constant:
            return p1;
        case DistFamily::lognormal:
            return std::exp(p1 + p2 * rng.next_normal());
    }
    return 0.0;  // unreachable
}

double ClaimDist::fractional_moment(double q) const {
    switch (family) {
        case DistFamily::exponential:
            return std::tgamma(q + 1.0) / std::pow(p1, q);
        case DistFamily::pareto:
            if (q >= p2) return kInf;
            return p2 * std::pow(p1, q) / (p2 - q);
        case DistFamily::constant:
            return std::pow(p1, q);
        case DistFamily::lognormal:
            return std::exp(q * p1 + 0.5 * q * q * p2 * p2);
    }
    return 0.0;  // unreachable
}

std::string ClaimDist::describe() const {
    std::ostringstream os;
    switch (family) {
        case DistFamily::exponential: os << "exponential(" << p1 << ")"; break;
        case DistFamily::pareto:      os << "pareto(" << p1 << "," << p2 << ")"; break;
        case DistFamily::constant:    os << "constant(" << p1 << ")"; break;
        case DistFamily::lognormal:   os << "lognormal(" << p1 << "," << p2 << ")"; break;
    }
    return os.str();
}

CanonicalRegimes canonicalize(const RegimeParams& regimes) {
    double b0 = regimes.beta0();
    double b1 = regimes.beta1();
    if (b0 == b1) throw DegenerateRegimes(b0);
    if (b0 < b1) return {regimes, false};
    RegimeParams swapped;
    swapped.a0 = regimes.a1;
    swapped.a1 = regimes.a0;
    swapped.sigma0 = regimes.sigma1;
    swapped.sigma1 = regimes.sigma0;
    swapped.lambda01 = regimes.lambda10;
    swapped.lambda10 = regimes.lambda01;
    return {swapped, true};
}

ValidationReport validate_model(const ModelSpec& spec) {
    ValidationReport report;
    auto add = [&report](std::string name, bool passed, std::string detail) {
        report.checks.push_back(
            {std::move(name), passed ? CheckStatus::pass : CheckStatus::fail, std::move(detail)});
    };
    std::ostringstream os;

    const RegimeParams& r = spec.regimes;
    add("volatilities positive", r.sigma0 > 0.0 && r.sigma1 > 0.0,
        "sigma0 = " + std::to_string(r.sigma0) + ", sigma1 = " + std::to_string(r.sigma1));
    add("switch intensities positive", r.lambda01 > 0.0 && r.lambda10 > 0.0,
        "lambda01 = " + std::to_string(r.lambda01) + ", lambda10 = " + std::to_string(r.lambda10));

    bool sigmas_ok = r.sigma0 > 0.0 && r.sigma1 > 0.0;
    double b0 = sigmas_ok ? r.beta0() : 0.0;
    double b1 = sigmas_ok ? r.beta1() : 0.0;
    report.beta_lo = std::min(b0, b1);
    report.beta_hi = std::max(b0, b1);
    report.swapped = b0 > b1;
    if (sigmas_ok) {
        os.str("");
        os << "beta0 = " << b0 << ", beta1 = " << b1;
        add("regime exponents distinct", b0 != b1, os.str());
        os.str("");
        os << "min(beta0, beta1) = " << report.beta_lo;
        add("beta0 > 0 after relabeling", report.beta_lo > 0.0, os.str());
    } else {
        add("regime exponents distinct", false, "not evaluable: nonpositive volatility");
        add("beta0 > 0 after relabeling", false, "not evaluable: nonpositive volatility");
    }

    const ClaimModel& c = spec.claims;
    add("claim intensities nonnegative", c.alpha1 >= 0.0 && c.alpha2 >= 0.0,
        "alpha1 = " + std::to_string(c.alpha1) + ", alpha2 = " + std::to_string(c.alpha2));
    add("claim flow can decrease the reserve", !(c.premium_rate >= 0.0 && c.alpha1 == 0.0),
        c.premium_rate >= 0.0 && c.alpha1 == 0.0
            ? "premium_rate >= 0 with alpha1 = 0: ruin impossible"
            : "premium_rate = " + std::to_string(c.premium_rate) +
                  ", alpha1 = " + std::to_string(c.alpha1));
    add("initial regime is 0 or 1", spec.initial_regime == 0 || spec.initial_regime == 1,
        "initial_regime = " + std::to_string(spec.initial_regime));

    report.checks.push_back({"claim moment condition at the solved exponent", CheckStatus::pending,
                             "evaluate moment_condition(claims, beta) once beta is solved"});
    return report;
}

}  // namespace ruinvest
