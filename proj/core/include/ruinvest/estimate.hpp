#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ruinvest/model.hpp"
#include "ruinvest/pathsim.hpp"

namespace ruinvest {

struct EmptyInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct InsufficientPositiveSamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InsufficientTailPoints : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WilsonInterval {
    double lo, hi;
    double half() const { return 0.5 * (hi - lo); }
};
// 95% Wilson score interval for a binomial proportion.
WilsonInterval wilson_ci(std::size_t successes, std::size_t n);

// Survival function estimate on a u grid; counting is strict (x > u), ties
// sit below the threshold.
struct EmpiricalTail {
    std::vector<double> u;
    std::vector<double> g_bar;
    std::vector<double> ci_half_width;
    std::size_t n = 0;
};
EmpiricalTail empirical_tail(std::span<const double> samples, std::span<const double> u_grid);

// Geometric grid, 20 points per decade, from the sample median (median of the
// positive part when the full median is not positive) up to the 0.9999
// quantile. Throws InsufficientTailPoints when no positive tail exists.
std::vector<double> default_u_grid(std::span<const double> samples);

// Hill estimator on the top k order statistics of the positive part.
// k = 0 selects floor(n_pos^(2/3)). CI is the asymptotic normal band
// beta_hat (1 -+ 1.96/sqrt(k)).
struct HillEstimate {
    double beta;
    double ci_lo, ci_hi;
    std::size_t k;
};
HillEstimate hill_estimate(std::span<const double> samples, std::size_t k = 0);

// OLS of ln g_bar on ln u over grid points with g_bar in (0, 1-min_tail_quantile].
// Requires >= 5 such points. curvature is the quadratic coefficient of a
// second-order fit in ln u; a genuine power law leaves it near zero while an
// exponential tail bends hard (flagged via `curved`).
struct LoglogFit {
    double slope;      // -beta_hat for a power-law tail
    double intercept;  // ln C at the fitted window
    double r2;
    double curvature;
    bool curved;
    std::size_t n_points;
};
LoglogFit loglog_fit(const EmpiricalTail& tail, double min_tail_quantile = 0.9);

// u^beta g_bar(u) over the top decade of u with nonzero counts. Stable when
// all values are positive and max/min <= 2 (the tail constant has flattened).
struct PlateauSeries {
    std::vector<double> u;
    std::vector<double> value;
    double max_over_min = 0.0;
    bool stable = false;
};
PlateauSeries c_plus_plateau(const EmpiricalTail& tail, double beta);

// Convenience bundle for a two-sided tail study of Y_inf samples. hill_k = 0
// keeps the default order-statistic count; an empty u_grid selects
// default_u_grid(samples).
struct TailReport {
    double beta_analytic;
    EmpiricalTail tail;                   // positive-side tail on the study grid
    HillEstimate hill;                    // at the requested (or default) k
    std::vector<HillEstimate> hill_sweep; // k in {n^0.5, n^(2/3), n^0.8}
    LoglogFit ols;
    PlateauSeries plateau;
    bool c_minus_estimable = false;       // negative side has enough tail mass
    PlateauSeries c_minus;                // plateau of |negative part| when estimable
};
TailReport tail_report(std::span<const double> y_samples, double beta_analytic,
                       std::size_t hill_k = 0, std::span<const double> u_grid = {});

// Ruin probability estimate per u and start regime from shared perpetuity
// paths: psi_hat = P(y_sup_global >= u), bracketed by the perpetuity tail
// G_i(u) from below and G_i(u) / min(G_0(0), G_1(0)) from above.
struct RuinEstimate {
    std::vector<double> u_grid;
    struct PerRegime {
        std::vector<double> psi_hat;
        std::vector<double> ci_lo, ci_hi;
        std::vector<double> sandwich_lo, sandwich_hi;
        std::vector<double> trunc_bias;  // mean leftover prefix mass on undecided paths
        double g_bar_zero = 0.0;         // P(Y_inf > 0) for this start regime
        std::size_t n_paths = 0;
    };
    PerRegime regime[2];
    double g_bar_zero_min = 0.0;
};
RuinEstimate estimate_ruin(const ModelSpec& spec, const SimConfig& config,
                           std::span<const double> u_grid, std::uint64_t seed);

// Monte Carlo audit of the perpetuity tail conditions at exponent beta over
// n = config.n_paths cycles:
//   E M^beta          -> 1        (conditional estimate: the Gaussian leg is
//                                  integrated exactly given the holding times,
//                                  which keeps the estimator's tail light)
//   E M^beta (ln M)+  -> finite   (conditional; stability under doubling)
//   E |Q|^beta        -> finite   (raw; no closed-form conditioning exists)
// ln M inherits a Gaussian component, so the non-arithmetic condition holds
// structurally and is only noted.
struct KestenReport {
    struct Stat {
        double half_mean;  // first n/2 cycles
        double full_mean;
        double rel_change;
        bool stable;       // rel_change < 5%
    };
    double m_beta_mean;
    double m_beta_se;
    bool m_beta_within_4se;
    Stat m_beta;
    Stat log_moment;
    Stat q_moment;
    std::size_t n_cycles;
    bool q_moment_finite_analytic;  // moment_condition(claims, beta).finite
    std::string nonarithmetic_note;
};
KestenReport kesten_conditions_report(const ModelSpec& spec, const SimConfig& config, double beta,
                                      std::uint64_t seed);

}  // namespace ruinvest
