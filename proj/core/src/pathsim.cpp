#include "ruinvest/pathsim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "ruinvest/rng.hpp"

namespace ruinvest {

namespace {

double leave_rate(const RegimeParams& r, int regime) {
    return regime == 0 ? r.lambda01 : r.lambda10;
}

double drift_of(const RegimeParams& r, int regime) {
    return regime == 0 ? r.a0 - 0.5 * r.sigma0 * r.sigma0 : r.a1 - 0.5 * r.sigma1 * r.sigma1;
}

double sigma_of(const RegimeParams& r, int regime) {
    return regime == 0 ? r.sigma0 : r.sigma1;
}

// Log-price walker shared by all cycle samplers. V advances by exact Gaussian
// increments on the finest grid; the trapezoid of e^{-exponent*V} is kept at
// every level simultaneously (level j has step h0 / 2^j, nodes of level j are
// a subset of level j+1), so level differences on one path isolate quadrature
// error. levels == 1 is the production path.
struct LevelWalker {
    explicit LevelWalker(double h0, int levels, double exponent)
        : h0_(h0), levels_(levels), exponent_(exponent), finest_mult_(1 << (levels - 1)) {
        integral_.assign(levels_, 0.0);
        node_val_.assign(levels_, 1.0);  // e^{-exponent * 0}
    }

    // One segment of length len under fixed regime dynamics.
    void advance(RngStream& rng, double len, double drift, double sigma) {
        if (!(len > 0.0)) return;
        long coarse = static_cast<long>(std::ceil(len / h0_));
        if (coarse < 1) coarse = 1;
        long nf = coarse * finest_mult_;
        double dt = len / static_cast<double>(nf);
        double ddt = drift * dt;
        double sdt = sigma * std::sqrt(dt);
        for (long k = 1; k <= nf; ++k) {
            v_ += ddt + sdt * rng.next_normal();
            double e = std::exp(-exponent_ * v_);
            long stride = finest_mult_;
            for (int j = 0; j < levels_; ++j, stride >>= 1) {
                if (k % stride == 0) {
                    integral_[j] += 0.5 * (node_val_[j] + e) * (dt * static_cast<double>(stride));
                    node_val_[j] = e;
                }
            }
        }
    }

    double v() const { return v_; }
    double integral(int level) const { return integral_[level]; }

private:
    double h0_;
    int levels_;
    double exponent_;
    long finest_mult_;
    double v_ = 0.0;
    std::vector<double> integral_;
    std::vector<double> node_val_;
};

struct CycleOutputs {
    std::vector<double> q;
    std::vector<double> y_sup;
    double m;
    double tau1;
    double tau2;
};

// Draw order is part of the reproducibility contract: regime times, then all
// claim arrival gaps, then (walking in time order) per-claim direction and
// magnitude draws interleaved with the Gaussian grid increments.
CycleOutputs simulate_cycle_ml(RngStream& rng, const ModelSpec& spec, double grid_step, int levels,
                               std::vector<CycleEpoch>* epochs) {
    const RegimeParams& reg = spec.regimes;
    const ClaimModel& cl = spec.claims;
    int r0 = spec.initial_regime;
    int r1 = 1 - r0;

    auto [tau1, tau2] = sample_regime_times(rng, reg, r0);

    double alpha = cl.alpha1 + cl.alpha2;
    std::vector<double> claim_times;
    if (alpha > 0.0) {
        double t = rng.next_exponential(alpha);
        while (t < tau2) {
            claim_times.push_back(t);
            t += rng.next_exponential(alpha);
        }
    }

    LevelWalker walker(grid_step, levels, 1.0);
    double jump = 0.0;                     // claim part of Y; grid-exact, common to all levels
    std::vector<double> sup(levels, 0.0);  // running sup of cycle-local Y, >= Y(0) = 0
    double c = cl.premium_rate;
    double t_now = 0.0;
    bool both_signs = cl.alpha1 > 0.0 && cl.alpha2 > 0.0;

    auto record = [&](double t, int regime) {
        if (epochs)
            epochs->push_back({t, -c * walker.integral(0) + jump, regime});
        for (int j = 0; j < levels; ++j)
            sup[j] = std::max(sup[j], -c * walker.integral(j) + jump);
    };

    std::size_t next_claim = 0;
    for (int leg = 0; leg < 2; ++leg) {
        int regime = leg == 0 ? r0 : r1;
        double leg_end = leg == 0 ? tau1 : tau2;
        double drift = drift_of(reg, regime);
        double sigma = sigma_of(reg, regime);
        while (next_claim < claim_times.size() && claim_times[next_claim] < leg_end) {
            double tc = claim_times[next_claim];
            walker.advance(rng, tc - t_now, drift, sigma);
            t_now = tc;
            record(tc, regime);  // pre-jump value
            bool down = cl.alpha1 > 0.0;
            if (both_signs) down = rng.next_uniform() < cl.alpha1 / alpha;
            double mag = down ? cl.f1.sample(rng) : cl.f2.sample(rng);
            double dp = down ? -mag : mag;
            jump -= std::exp(-walker.v()) * dp;
            record(tc, regime);  // post-jump value
            ++next_claim;
        }
        walker.advance(rng, leg_end - t_now, drift, sigma);
        t_now = leg_end;
        record(leg_end, regime);
    }

    CycleOutputs out;
    out.m = std::exp(-walker.v());
    out.tau1 = tau1;
    out.tau2 = tau2;
    out.q.resize(levels);
    out.y_sup.resize(levels);
    for (int j = 0; j < levels; ++j) {
        out.q[j] = -c * walker.integral(j) + jump;
        out.y_sup[j] = sup[j];
    }
    return out;
}

}  // namespace

double recommended_grid_step(const ModelSpec& spec) {
    double rates = spec.regimes.lambda01 + spec.regimes.lambda10 + spec.claims.alpha1 +
                   spec.claims.alpha2;
    return std::min(1e-2, 0.1 / rates);
}

std::pair<double, double> sample_regime_times(RngStream& rng, const RegimeParams& regimes,
                                              int start_regime) {
    double tau1 = rng.next_exponential(leave_rate(regimes, start_regime));
    double tau2 = tau1 + rng.next_exponential(leave_rate(regimes, 1 - start_regime));
    return {tau1, tau2};
}

CycleSample sample_cycle(RngStream& rng, const ModelSpec& spec, double grid_step,
                         std::vector<CycleEpoch>* epochs) {
    CycleOutputs out = simulate_cycle_ml(rng, spec, grid_step, 1, epochs);
    return {out.m, out.q[0], out.y_sup[0], out.tau1, out.tau2};
}

NestedCycleSample sample_cycle_nested(RngStream& rng, const ModelSpec& spec, double grid_step,
                                      int levels) {
    CycleOutputs out = simulate_cycle_ml(rng, spec, grid_step, levels, nullptr);
    return {std::move(out.q), std::move(out.y_sup), out.m, out.tau1, out.tau2};
}

double discount_integral_sample(RngStream& rng, const ModelSpec& spec, double q_exponent,
                                double grid_step) {
    const RegimeParams& reg = spec.regimes;
    int r0 = spec.initial_regime;
    auto [tau1, tau2] = sample_regime_times(rng, reg, r0);
    LevelWalker walker(grid_step, 1, q_exponent);
    walker.advance(rng, tau1, drift_of(reg, r0), sigma_of(reg, r0));
    walker.advance(rng, tau2 - tau1, drift_of(reg, 1 - r0), sigma_of(reg, 1 - r0));
    return walker.integral(0);
}

PerpetuitySample sample_y_infinity(RngStream& rng, const ModelSpec& spec, const SimConfig& config) {
    double prefix = 1.0;
    double partial = 0.0;
    double sup_global = 0.0;
    std::size_t n = 0;
    bool converged = false;
    while (n < config.n_cycles_max) {
        CycleSample cs = sample_cycle(rng, spec, config.grid_step);
        ++n;
        sup_global = std::max(sup_global, partial + prefix * cs.y_sup);
        partial += prefix * cs.q;
        prefix *= cs.m;
        if (prefix < config.trunc_eps) {
            converged = true;
            break;
        }
    }
    return {partial, sup_global, prefix, n, converged};
}

std::vector<PerpetuitySample> sample_y_infinity_nested(RngStream& rng, const ModelSpec& spec,
                                                       const SimConfig& config, int levels) {
    std::vector<double> prefix_partial(levels, 0.0);
    std::vector<double> sup_global(levels, 0.0);
    double prefix = 1.0;
    std::size_t n = 0;
    bool converged = false;
    while (n < config.n_cycles_max) {
        NestedCycleSample cs = sample_cycle_nested(rng, spec, config.grid_step, levels);
        ++n;
        for (int j = 0; j < levels; ++j) {
            sup_global[j] = std::max(sup_global[j], prefix_partial[j] + prefix * cs.y_sup[j]);
            prefix_partial[j] += prefix * cs.q[j];
        }
        prefix *= cs.m;  // m is grid-exact, common to all levels
        if (prefix < config.trunc_eps) {
            converged = true;
            break;
        }
    }
    std::vector<PerpetuitySample> out(levels);
    for (int j = 0; j < levels; ++j)
        out[j] = {prefix_partial[j], sup_global[j], prefix, n, converged};
    return out;
}

RuinOutcome sample_ruin(RngStream& rng, const ModelSpec& spec, const SimConfig& config, double u) {
    if (u <= 0.0) return {true, 1, spec.initial_regime, 0.0, 0.0};
    std::vector<CycleEpoch> epochs;
    double prefix = 1.0;
    double partial = 0.0;
    double sup_global = 0.0;
    std::size_t n = 0;
    while (n < config.n_cycles_max) {
        epochs.clear();
        CycleSample cs = sample_cycle(rng, spec, config.grid_step, &epochs);
        ++n;
        double cycle_sup = partial + prefix * cs.y_sup;
        if (cycle_sup >= u) {
            // Y is monotone between epochs, so the first epoch at or above u
            // identifies the crossing segment and its regime.
            for (const CycleEpoch& e : epochs) {
                if (partial + prefix * e.y >= u)
                    return {true, n, e.regime, cycle_sup, 0.0};
            }
        }
        sup_global = std::max(sup_global, cycle_sup);
        partial += prefix * cs.q;
        prefix *= cs.m;
        if (prefix < config.trunc_eps) break;
    }
    return {false, 0, -1, sup_global, prefix};
}

std::vector<PerpetuitySample> sample_paths(const ModelSpec& spec, const SimConfig& config,
                                           std::uint64_t seed, std::uint64_t stream_offset) {
    std::vector<PerpetuitySample> out(config.n_paths);
    std::uint64_t n = config.n_paths;
    if (n == 0) return out;
    auto run_block = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t p = begin; p < end; ++p) {
            RngStream rng(seed, stream_offset + p);
            out[p] = sample_y_infinity(rng, spec, config);
        }
    };
    std::uint64_t workers = std::max(1u, config.workers);
    workers = std::min<std::uint64_t>(workers, n);
    if (workers == 1) {
        run_block(0, n);
        return out;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::uint64_t chunk = n / workers;
    std::uint64_t extra = n % workers;
    std::uint64_t begin = 0;
    for (std::uint64_t w = 0; w < workers; ++w) {
        std::uint64_t end = begin + chunk + (w < extra ? 1 : 0);
        pool.emplace_back(run_block, begin, end);
        begin = end;
    }
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace ruinvest
