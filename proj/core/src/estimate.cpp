#include "ruinvest/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ruinvest/analytic.hpp"
#include "ruinvest/rng.hpp"

namespace ruinvest {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr double kInf = std::numeric_limits<double>::infinity();

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    double pos = q * static_cast<double>(sorted.size() - 1);
    std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= sorted.size()) return sorted.back();
    double w = pos - static_cast<double>(i);
    return sorted[i] * (1.0 - w) + sorted[i + 1] * w;
}

// Strict count of samples above u in an ascending-sorted vector.
std::size_t count_above(const std::vector<double>& sorted, double u) {
    return sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), u);
}

double phi_pdf(double x) { return std::exp(-0.5 * x * x) * 0.3989422804014327; }
double phi_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865476); }

}  // namespace

WilsonInterval wilson_ci(std::size_t successes, std::size_t n) {
    if (n == 0) throw EmptyInput("wilson_ci: n must be positive");
    double nn = static_cast<double>(n);
    double p = static_cast<double>(successes) / nn;
    double z2 = kZ95 * kZ95;
    double denom = 1.0 + z2 / nn;
    double center = (p + z2 / (2.0 * nn)) / denom;
    double half = kZ95 * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    // center -+ half must bracket the point estimate; rounding can leave the
    // boundary a few ulp on the wrong side of an exact 0 or 1
    double lo = std::min(std::max(0.0, center - half), p);
    double hi = std::max(std::min(1.0, center + half), p);
    return {lo, hi};
}

EmpiricalTail empirical_tail(std::span<const double> samples, std::span<const double> u_grid) {
    if (samples.empty()) throw EmptyInput("empirical_tail: no samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    EmpiricalTail tail;
    tail.n = sorted.size();
    tail.u.assign(u_grid.begin(), u_grid.end());
    tail.g_bar.reserve(tail.u.size());
    tail.ci_half_width.reserve(tail.u.size());
    for (double u : tail.u) {
        std::size_t cnt = count_above(sorted, u);
        tail.g_bar.push_back(static_cast<double>(cnt) / static_cast<double>(tail.n));
        tail.ci_half_width.push_back(wilson_ci(cnt, tail.n).half());
    }
    return tail;
}

std::vector<double> default_u_grid(std::span<const double> samples) {
    if (samples.empty()) throw EmptyInput("default_u_grid: no samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    double lo = quantile_sorted(sorted, 0.5);
    if (!(lo > 0.0)) {
        // heavy negative mass: anchor the grid on the positive part instead
        auto first_pos = std::upper_bound(sorted.begin(), sorted.end(), 0.0);
        std::vector<double> pos(first_pos, sorted.end());
        if (pos.empty()) throw InsufficientTailPoints("default_u_grid: no positive samples");
        lo = quantile_sorted(pos, 0.5);
    }
    double hi = quantile_sorted(sorted, 0.9999);
    if (!(hi > lo)) throw InsufficientTailPoints("default_u_grid: degenerate positive tail");
    std::vector<double> grid;
    int n_pts = static_cast<int>(std::floor(std::log10(hi / lo) * 20.0)) + 1;
    for (int k = 0; k < n_pts; ++k) grid.push_back(lo * std::pow(10.0, k / 20.0));
    return grid;
}

HillEstimate hill_estimate(std::span<const double> samples, std::size_t k) {
    std::vector<double> pos;
    pos.reserve(samples.size());
    for (double x : samples)
        if (x > 0.0) pos.push_back(x);
    if (k == 0 && !pos.empty())
        k = static_cast<std::size_t>(std::pow(static_cast<double>(pos.size()), 2.0 / 3.0));
    if (k < 2 || k + 1 > pos.size())
        throw InsufficientPositiveSamples("hill_estimate: need k >= 2 and k+1 positive samples");
    std::sort(pos.begin(), pos.end(), std::greater<>());
    double ref = std::log(pos[k]);
    double h = 0.0;
    for (std::size_t i = 0; i < k; ++i) h += std::log(pos[i]) - ref;
    h /= static_cast<double>(k);
    if (!(h > 0.0))
        throw InsufficientPositiveSamples("hill_estimate: zero log-spacing in the tail");
    double beta = 1.0 / h;
    double band = kZ95 / std::sqrt(static_cast<double>(k));
    return {beta, beta * (1.0 - band), beta * (1.0 + band), k};
}

LoglogFit loglog_fit(const EmpiricalTail& tail, double min_tail_quantile) {
    double cap = 1.0 - min_tail_quantile;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < tail.u.size(); ++i) {
        if (tail.u[i] > 0.0 && tail.g_bar[i] > 0.0 && tail.g_bar[i] <= cap) {
            x.push_back(std::log(tail.u[i]));
            y.push_back(std::log(tail.g_bar[i]));
        }
    }
    std::size_t n = x.size();
    if (n < 5) throw InsufficientTailPoints("loglog_fit: fewer than 5 usable tail points");

    double xm = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double ym = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - xm, dy = y[i] - ym;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LoglogFit fit;
    fit.n_points = n;
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;

    // quadratic term of y ~ 1 + xc + xc^2 (centered) via 3x3 normal equations
    double s2 = 0.0, s3 = 0.0, s4 = 0.0, sy = 0.0, sxy1 = 0.0, sx2y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - xm, dx2 = dx * dx;
        s2 += dx2;
        s3 += dx2 * dx;
        s4 += dx2 * dx2;
        sy += y[i];
        sxy1 += dx * y[i];
        sx2y += dx2 * y[i];
    }
    double nn = static_cast<double>(n);
    // centered x makes the first moment vanish:
    // | n   0   s2 | |a|   | sy   |
    // | 0   s2  s3 | |b| = | sxy1 |
    // | s2  s3  s4 | |c|   | sx2y |
    double det = nn * (s2 * s4 - s3 * s3) - s2 * s2 * s2;
    double detc = nn * (s2 * sx2y - s3 * sxy1) - s2 * s2 * sy;
    fit.curvature = det != 0.0 ? detc / det : 0.0;
    fit.curved = std::abs(fit.curvature) > 0.1;
    return fit;
}

PlateauSeries c_plus_plateau(const EmpiricalTail& tail, double beta) {
    PlateauSeries out;
    double u_max = 0.0;
    for (std::size_t i = 0; i < tail.u.size(); ++i)
        if (tail.g_bar[i] > 0.0 && tail.u[i] > u_max) u_max = tail.u[i];
    if (u_max <= 0.0) {
        out.max_over_min = kInf;
        return out;
    }
    double lo = u_max / 10.0;
    double vmin = kInf, vmax = 0.0;
    for (std::size_t i = 0; i < tail.u.size(); ++i) {
        if (tail.u[i] >= lo && tail.u[i] <= u_max && tail.g_bar[i] > 0.0) {
            double v = std::pow(tail.u[i], beta) * tail.g_bar[i];
            out.u.push_back(tail.u[i]);
            out.value.push_back(v);
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
    out.max_over_min = vmin > 0.0 ? vmax / vmin : kInf;
    out.stable = out.value.size() >= 2 && vmin > 0.0 && out.max_over_min <= 2.0;
    return out;
}

TailReport tail_report(std::span<const double> y_samples, double beta_analytic,
                       std::size_t hill_k, std::span<const double> u_grid) {
    TailReport rep;
    rep.beta_analytic = beta_analytic;
    std::vector<double> grid;
    if (u_grid.empty()) {
        grid = default_u_grid(y_samples);
        u_grid = grid;
    }
    rep.tail = empirical_tail(y_samples, u_grid);
    rep.hill = hill_estimate(y_samples, hill_k);
    std::size_t npos = 0;
    for (double x : y_samples)
        if (x > 0.0) ++npos;
    double nd = static_cast<double>(npos);
    for (double expo : {0.5, 2.0 / 3.0, 0.8}) {
        auto k = static_cast<std::size_t>(std::pow(nd, expo));
        if (k >= 2 && k + 1 <= npos) rep.hill_sweep.push_back(hill_estimate(y_samples, k));
    }
    rep.ols = loglog_fit(rep.tail);
    rep.plateau = c_plus_plateau(rep.tail, beta_analytic);

    std::vector<double> neg;
    for (double x : y_samples)
        if (x < 0.0) neg.push_back(-x);
    rep.c_minus_estimable = false;
    if (neg.size() >= 100) {
        try {
            std::vector<double> ngrid = default_u_grid(neg);
            EmpiricalTail ntail = empirical_tail(neg, ngrid);
            rep.c_minus = c_plus_plateau(ntail, beta_analytic);
            rep.c_minus_estimable = !rep.c_minus.value.empty();
        } catch (const std::exception&) {
            rep.c_minus_estimable = false;
        }
    }
    return rep;
}

RuinEstimate estimate_ruin(const ModelSpec& spec, const SimConfig& config,
                           std::span<const double> u_grid, std::uint64_t seed) {
    RuinEstimate est;
    est.u_grid.assign(u_grid.begin(), u_grid.end());
    double g0[2] = {0.0, 0.0};
    std::vector<PerpetuitySample> paths[2];
    for (int i = 0; i < 2; ++i) {
        ModelSpec s = spec;
        s.initial_regime = i;
        paths[i] = sample_paths(s, config, seed, regime_stream_offset(i));
        std::size_t npos = 0;
        for (const auto& p : paths[i])
            if (p.y_inf > 0.0) ++npos;
        g0[i] = paths[i].empty() ? 0.0
                                 : static_cast<double>(npos) / static_cast<double>(paths[i].size());
        est.regime[i].g_bar_zero = g0[i];
        est.regime[i].n_paths = paths[i].size();
    }
    est.g_bar_zero_min = std::min(g0[0], g0[1]);

    for (int i = 0; i < 2; ++i) {
        auto& out = est.regime[i];
        std::size_t n = paths[i].size();
        for (double u : est.u_grid) {
            std::size_t ruined = 0, tail_cnt = 0;
            double bias = 0.0;
            for (const auto& p : paths[i]) {
                if (p.y_sup_global >= u)
                    ++ruined;
                else
                    bias += p.truncation_bound;
                if (p.y_inf > u) ++tail_cnt;
            }
            double nn = static_cast<double>(n);
            double psi = static_cast<double>(ruined) / nn;
            WilsonInterval ci = wilson_ci(ruined, n);
            double g_u = static_cast<double>(tail_cnt) / nn;
            out.psi_hat.push_back(psi);
            out.ci_lo.push_back(ci.lo);
            out.ci_hi.push_back(ci.hi);
            out.trunc_bias.push_back(bias / nn);
            out.sandwich_lo.push_back(g_u);
            out.sandwich_hi.push_back(est.g_bar_zero_min > 0.0 ? g_u / est.g_bar_zero_min : kInf);
        }
    }
    return est;
}

KestenReport kesten_conditions_report(const ModelSpec& spec, const SimConfig& config, double beta,
                                      std::uint64_t seed) {
    const RegimeParams& reg = spec.regimes;
    int r0 = spec.initial_regime;
    double s_first = r0 == 0 ? reg.sigma0 * reg.sigma0 : reg.sigma1 * reg.sigma1;
    double s_second = r0 == 0 ? reg.sigma1 * reg.sigma1 : reg.sigma0 * reg.sigma0;
    double b_first = r0 == 0 ? reg.beta0() : reg.beta1();
    double b_second = r0 == 0 ? reg.beta1() : reg.beta0();

    std::size_t n = config.n_paths;
    if (n < 2) throw EmptyInput("kesten_conditions_report: need at least 2 cycles");
    std::size_t half = n / 2;

    double sum_g = 0.0, sum_g2 = 0.0, half_g = 0.0;
    double sum_gl = 0.0, half_gl = 0.0;
    double sum_q = 0.0, half_q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        RngStream rng(seed, i);
        CycleSample cs = sample_cycle(rng, spec, config.grid_step);
        double t_first = cs.tau1;
        double t_second = cs.tau2 - cs.tau1;

        // E[M^beta | holding times]: exact Gaussian-leg integral
        double g = std::exp(0.5 * beta * (s_first * (beta - b_first) * t_first +
                                          s_second * (beta - b_second) * t_second));
        // E[M^beta (ln M)+ | holding times] via the exponentially tilted normal:
        // V | tau ~ N(mu, v) and e^{-bV} phi_{mu,v} = g phi_{mu-bv,v}
        double mu = 0.5 * (s_first * b_first * t_first + s_second * b_second * t_second);
        double v = s_first * t_first + s_second * t_second;
        double sv = std::sqrt(v);
        double mt = mu - beta * v;
        double gl = g * (-mt * phi_cdf(-mt / sv) + sv * phi_pdf(mt / sv));

        double qb = std::pow(std::abs(cs.q), beta);

        sum_g += g;
        sum_g2 += g * g;
        sum_gl += gl;
        sum_q += qb;
        if (i + 1 == half) {
            half_g = sum_g;
            half_gl = sum_gl;
            half_q = sum_q;
        }
    }

    auto make_stat = [half, n](double half_sum, double full_sum) {
        KestenReport::Stat st;
        st.half_mean = half_sum / static_cast<double>(half);
        st.full_mean = full_sum / static_cast<double>(n);
        double denom = std::max(std::abs(st.full_mean), 1e-300);
        st.rel_change = std::abs(st.full_mean - st.half_mean) / denom;
        st.stable = st.rel_change < 0.05;
        return st;
    };

    KestenReport rep;
    rep.n_cycles = n;
    double nn = static_cast<double>(n);
    rep.m_beta_mean = sum_g / nn;
    double var = (sum_g2 - nn * rep.m_beta_mean * rep.m_beta_mean) / (nn - 1.0);
    rep.m_beta_se = std::sqrt(std::max(var, 0.0) / nn);
    rep.m_beta_within_4se = std::abs(rep.m_beta_mean - 1.0) <= 4.0 * rep.m_beta_se;
    rep.m_beta = make_stat(half_g, sum_g);
    rep.log_moment = make_stat(half_gl, sum_gl);
    rep.q_moment = make_stat(half_q, sum_q);
    rep.q_moment_finite_analytic = moment_condition(spec.claims, beta).finite;
    rep.nonarithmetic_note =
        "ln M carries a Gaussian component (positive volatility on both legs), "
        "so its law is non-arithmetic by construction";
    return rep;
}

}  // namespace ruinvest
