#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ruinvest/model.hpp"
#include "ruinvest/rng.hpp"

namespace ruinvest {

class RngStream;

struct SimConfig {
    std::uint64_t n_paths = 10'000;
    std::size_t n_cycles_max = 10'000;
    double grid_step = 1e-2;
    double trunc_eps = 1e-12;   // stop a path once the prefix product drops below
    unsigned workers = 1;
};

// h small enough that regime switches and claim arrivals are well resolved.
double recommended_grid_step(const ModelSpec& spec);

// One full regime cycle started in spec.initial_regime:
//   m     = e^{-V(tau2)}           (discount over the cycle, V exact at tau2)
//   q     = -int_0^{tau2} e^{-V} dP (premium part by trapezoid on the grid,
//                                    claim jumps with exact V at the epoch)
//   y_sup = sup of the cycle-local Y, >= 0 (the sup of a piecewise monotone
//           path is attained at t=0, event boundaries, or tau2)
struct CycleSample {
    double m;
    double q;
    double y_sup;
    double tau1;
    double tau2;
};

// Candidate sup epochs of the cycle-local Y: segment endpoints before and
// after each jump, labeled with the regime active there.
struct CycleEpoch {
    double t;
    double y;
    int regime;
};

// (tau1, tau2): first switch and cycle end, exponential holding times.
std::pair<double, double> sample_regime_times(RngStream& rng, const RegimeParams& regimes,
                                              int start_regime);

CycleSample sample_cycle(RngStream& rng, const ModelSpec& spec, double grid_step,
                         std::vector<CycleEpoch>* epochs = nullptr);

// Cycle sampled once at the finest grid and re-integrated on nested
// coarsenings: q[k] and y_sup[k] use step grid_step / 2^k on a common
// Brownian path, so differences between levels isolate quadrature error.
struct NestedCycleSample {
    std::vector<double> q;
    std::vector<double> y_sup;
    double m;
    double tau1;
    double tau2;
};
NestedCycleSample sample_cycle_nested(RngStream& rng, const ModelSpec& spec, double grid_step,
                                      int levels);

// int_0^{tau2} e^{-q_exponent * V_s} ds over one cycle (trapezoid).
double discount_integral_sample(RngStream& rng, const ModelSpec& spec, double q_exponent,
                                double grid_step);

// Perpetuity accumulated over cycles: Y_inf = sum_n prefix_{n-1} * q_n with
// prefix_n = m_1 ... m_n, truncated once prefix < trunc_eps (converged) or at
// n_cycles_max (not converged; reported as data, never thrown).
struct PerpetuitySample {
    double y_inf;
    double y_sup_global;      // sup over all cycles of the global path
    double truncation_bound;  // leftover prefix product at the stop cycle
    std::size_t n_cycles_used;
    bool converged;
};
PerpetuitySample sample_y_infinity(RngStream& rng, const ModelSpec& spec, const SimConfig& config);

// Nested-grid variant of sample_y_infinity (one entry per level, common path);
// used to check that the detected ruin indicator is grid-stable.
std::vector<PerpetuitySample> sample_y_infinity_nested(RngStream& rng, const ModelSpec& spec,
                                                       const SimConfig& config, int levels);

// First passage of the global Y over level u. theta_at_ruin is the regime
// active at the crossing epoch; -1 and ruin_cycle = 0 when no ruin was found
// before truncation. For ruined paths truncation_bound is 0 (the indicator is
// decided); otherwise it is the leftover prefix product.
struct RuinOutcome {
    bool ruined;
    std::size_t ruin_cycle;  // 1-based cycle containing the crossing
    int theta_at_ruin;
    double y_max_reached;
    double truncation_bound;
};
RuinOutcome sample_ruin(RngStream& rng, const ModelSpec& spec, const SimConfig& config, double u);

// config.n_paths independent perpetuity paths; path p uses
// RngStream(seed, stream_offset + p). Partitioned across config.workers
// threads; results are keyed by path index, so output is identical for any
// worker count.
std::vector<PerpetuitySample> sample_paths(const ModelSpec& spec, const SimConfig& config,
                                           std::uint64_t seed, std::uint64_t stream_offset = 0);

// Stream offset reserved for a start regime, so two-regime studies never
// share randomness: regime 1 paths live in the upper half of stream space.
inline std::uint64_t regime_stream_offset(int initial_regime) {
    return static_cast<std::uint64_t>(initial_regime) << 63;
}

}  // namespace ruinvest
