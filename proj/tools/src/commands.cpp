#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <vector>

#include "config.hpp"
#include "csvio.hpp"
#include "manifest.hpp"
#include "ruinvest/analytic.hpp"
#include "ruinvest/estimate.hpp"
#include "ruinvest/model.hpp"
#include "ruinvest/pathsim.hpp"

namespace ruinvest::tool {

namespace fs = std::filesystem;

namespace {

struct CommandAbort {
    int code;
    std::string message;
};

// Pilot runs (default u grid discovery) draw from this reserved stream range
// so they never overlap per-path streams of either start regime.
constexpr std::uint64_t kPilotStreamOffset = 1ULL << 62;

class WallClock {
public:
    WallClock() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

RunConfig load_with_overrides(const CliOptions& opt) {
    RunConfig cfg = load_config(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.paths) cfg.sim.n_paths = *opt.paths;
    if (opt.workers) cfg.sim.workers = *opt.workers;
    if (opt.hill_k) cfg.hill_k = static_cast<std::size_t>(*opt.hill_k);
    return cfg;
}

// Validation failures mean the model sits outside the assumptions the
// analysis needs; nothing downstream is meaningful.
void require_valid(const ValidationReport& report) {
    if (report.ok()) return;
    std::string msg = "model outside supported assumptions:";
    for (const auto& c : report.checks)
        if (c.status == CheckStatus::fail) msg += "\n  " + c.name + ": " + c.detail;
    throw CommandAbort{exit_not_applicable, msg};
}

void print_validation(const ValidationReport& report) {
    for (const auto& c : report.checks) {
        const char* tag = c.status == CheckStatus::pass   ? "ok"
                          : c.status == CheckStatus::fail ? "FAIL"
                                                          : "pending";
        std::cout << "  [" << tag << "] " << c.name;
        if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << "\n";
    }
}

void ensure_out_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw CommandAbort{exit_config_error, "cannot create output directory '" + out_dir +
                                                      "': " + ec.message()};
}

std::vector<double> y_inf_of(const std::vector<PerpetuitySample>& samples) {
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i].y_inf;
    return out;
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const CommandAbort& a) {
        std::cerr << a.message << "\n";
        return a.code;
    } catch (const DegenerateRegimes& e) {
        std::cerr << "not applicable: " << e.what() << "\n";
        return exit_not_applicable;
    } catch (const PreconditionViolated& e) {
        std::cerr << "not applicable: " << e.what() << "\n";
        return exit_not_applicable;
    } catch (const InsufficientPositiveSamples& e) {
        std::cerr << "insufficient data: " << e.what() << "\n";
        return exit_insufficient_data;
    } catch (const InsufficientTailPoints& e) {
        std::cerr << "insufficient data: " << e.what() << "\n";
        return exit_insufficient_data;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config_error;
    }
}

}  // namespace

int cmd_solve_beta(const CliOptions& opt) {
    return guarded([&]() -> int {
        WallClock clock;
        RunConfig cfg = load_with_overrides(opt);
        ValidationReport report = validate_model(cfg.model);
        std::cout << "model checks:\n";
        print_validation(report);
        require_valid(report);

        CanonicalRegimes canon = canonicalize(cfg.model.regimes);
        BetaSolution sol = solve_beta(canon.params);
        PositivityIdentityReport ident = check_positivity_identities(sol.beta, canon.params);
        MomentCondition moment = moment_condition(cfg.model.claims, sol.beta);

        std::cout << "labels swapped: " << (canon.swapped ? "yes" : "no") << "\n";
        std::cout << "beta0 = " << format_double(canon.params.beta0())
                  << "  beta1 = " << format_double(canon.params.beta1()) << "\n";
        std::cout << "beta  = " << format_double(sol.beta) << "\n";
        std::cout << "residual |f(beta) - 1| = " << format_double(sol.residual_f) << "\n";
        std::cout << "residual |cubic(beta)| = " << format_double(sol.residual_cubic) << "\n";
        std::cout << "bracket (" << format_double(sol.bracket_lo) << ", "
                  << format_double(sol.bracket_hi) << "), iterations = " << sol.iterations << "\n";
        std::cout << "positivity identities: rel err " << format_double(ident.rel_err01) << " / "
                  << format_double(ident.rel_err10) << (ident.ok() ? "  ok" : "  VIOLATED") << "\n";
        std::cout << "claim moment E|X|^beta: "
                  << (moment.finite ? "finite, " + format_double(moment.value)
                                    : std::string("infinite (tail estimates only)"))
                  << "\n";

        if (!opt.out_dir.empty()) {
            ensure_out_dir(opt.out_dir);
            const std::string csv_path = (fs::path(opt.out_dir) / "beta.csv").string();
            CsvFile csv(csv_path, {"beta0", "beta1", "beta", "residual_f", "residual_cubic"});
            csv.cell(canon.params.beta0());
            csv.cell(canon.params.beta1());
            csv.cell(sol.beta);
            csv.cell(sol.residual_f);
            csv.cell(sol.residual_cubic);
            csv.end_row();
            csv.close();
            write_manifest(opt.out_dir, "solve-beta", cfg, clock.seconds(), {"beta.csv"});
        }
        return exit_ok;
    });
}

int cmd_simulate(const CliOptions& opt) {
    return guarded([&]() -> int {
        WallClock clock;
        RunConfig cfg = load_with_overrides(opt);
        require_valid(validate_model(cfg.model));
        ensure_out_dir(opt.out_dir);

        const auto offset = regime_stream_offset(cfg.model.initial_regime);
        std::vector<PerpetuitySample> samples = sample_paths(cfg.model, cfg.sim, cfg.seed, offset);

        std::size_t converged = 0;
        double mean = 0.0;
        for (const auto& s : samples) {
            converged += s.converged ? 1 : 0;
            mean += s.y_inf;
        }
        mean /= static_cast<double>(samples.size());

        const std::string csv_path = (fs::path(opt.out_dir) / "y_samples.csv").string();
        CsvFile csv(csv_path, {"path_id", "initial_regime", "y_inf", "y_sup", "n_cycles_used",
                               "truncation_bound"});
        for (std::size_t i = 0; i < samples.size(); ++i) {
            csv.cell(static_cast<std::uint64_t>(i));
            csv.cell(cfg.model.initial_regime);
            csv.cell(samples[i].y_inf);
            csv.cell(samples[i].y_sup_global);
            csv.cell(static_cast<std::uint64_t>(samples[i].n_cycles_used));
            csv.cell(samples[i].truncation_bound);
            csv.end_row();
        }
        csv.close();
        write_manifest(opt.out_dir, "simulate", cfg, clock.seconds(), {"y_samples.csv"});

        std::cout << "paths = " << samples.size() << ", start regime = "
                  << cfg.model.initial_regime << ", seed = " << cfg.seed << "\n";
        std::cout << "mean Y_inf = " << format_double(mean) << ", converged before cycle cap: "
                  << converged << "/" << samples.size() << "\n";
        std::cout << "wrote " << csv_path << "\n";
        return exit_ok;
    });
}

int cmd_estimate_ruin(const CliOptions& opt) {
    return guarded([&]() -> int {
        WallClock clock;
        RunConfig cfg = load_with_overrides(opt);
        require_valid(validate_model(cfg.model));
        ensure_out_dir(opt.out_dir);

        CanonicalRegimes canon = canonicalize(cfg.model.regimes);
        BetaSolution sol = solve_beta(canon.params);
        MomentCondition moment = moment_condition(cfg.model.claims, sol.beta);
        if (!moment.finite)
            throw CommandAbort{exit_not_applicable,
                               "claim moment E|X|^beta is infinite at beta = " +
                                   format_double(sol.beta) +
                                   "; the power-law ruin asymptotics do not apply"};

        std::vector<double> u_grid = cfg.u_grid;
        if (u_grid.empty()) {
            // Pilot pass over the ruin functional's own scale (path suprema).
            SimConfig pilot_cfg = cfg.sim;
            pilot_cfg.n_paths = std::min<std::uint64_t>(cfg.sim.n_paths, 10'000);
            auto pilot = sample_paths(cfg.model, pilot_cfg, cfg.seed, kPilotStreamOffset);
            std::vector<double> sups(pilot.size());
            for (std::size_t i = 0; i < pilot.size(); ++i) sups[i] = pilot[i].y_sup_global;
            u_grid = default_u_grid(sups);
            std::cout << "u grid: " << u_grid.size() << " points in ["
                      << format_double(u_grid.front()) << ", " << format_double(u_grid.back())
                      << "] (from pilot suprema)\n";
        }

        RuinEstimate est = estimate_ruin(cfg.model, cfg.sim, u_grid, cfg.seed);

        const std::string csv_path = (fs::path(opt.out_dir) / "ruin.csv").string();
        CsvFile csv(csv_path, {"u", "initial_regime", "psi_hat", "ci_lo", "ci_hi", "sandwich_lo",
                               "sandwich_hi", "trunc_bias"});
        for (int r = 0; r < 2; ++r) {
            const auto& per = est.regime[r];
            for (std::size_t i = 0; i < est.u_grid.size(); ++i) {
                csv.cell(est.u_grid[i]);
                csv.cell(r);
                csv.cell(per.psi_hat[i]);
                csv.cell(per.ci_lo[i]);
                csv.cell(per.ci_hi[i]);
                csv.cell(per.sandwich_lo[i]);
                csv.cell(per.sandwich_hi[i]);
                csv.cell(per.trunc_bias[i]);
                csv.end_row();
            }
        }
        csv.close();
        write_manifest(opt.out_dir, "estimate-ruin", cfg, clock.seconds(), {"ruin.csv"});

        std::cout << "beta = " << format_double(sol.beta) << ", paths per regime = "
                  << cfg.sim.n_paths << "\n";
        std::cout << "P(Y_inf > 0): regime 0 = " << format_double(est.regime[0].g_bar_zero)
                  << ", regime 1 = " << format_double(est.regime[1].g_bar_zero) << "\n";
        for (int r = 0; r < 2; ++r) {
            std::cout << "start regime " << r << ":\n";
            for (std::size_t i = 0; i < est.u_grid.size(); ++i) {
                const auto& per = est.regime[r];
                std::cout << "  u = " << format_double(est.u_grid[i])
                          << "  psi = " << format_double(per.psi_hat[i]) << "  [lo "
                          << format_double(per.sandwich_lo[i]) << ", hi "
                          << format_double(per.sandwich_hi[i]) << "]\n";
            }
        }
        std::cout << "wrote " << csv_path << "\n";
        return exit_ok;
    });
}

int cmd_tail_fit(const CliOptions& opt) {
    return guarded([&]() -> int {
        WallClock clock;
        RunConfig cfg = load_with_overrides(opt);
        require_valid(validate_model(cfg.model));
        ensure_out_dir(opt.out_dir);

        CanonicalRegimes canon = canonicalize(cfg.model.regimes);
        BetaSolution sol = solve_beta(canon.params);

        std::vector<double> y;
        if (!opt.input_csv.empty()) {
            CsvTable table = read_csv(opt.input_csv);
            const std::size_t col = table.column("y_inf");
            y.reserve(table.rows.size());
            for (const auto& row : table.rows) y.push_back(row[col]);
            std::cout << "samples: " << y.size() << " from " << opt.input_csv << "\n";
        } else {
            const auto offset = regime_stream_offset(cfg.model.initial_regime);
            y = y_inf_of(sample_paths(cfg.model, cfg.sim, cfg.seed, offset));
            std::cout << "samples: " << y.size() << " simulated (start regime "
                      << cfg.model.initial_regime << ", seed " << cfg.seed << ")\n";
        }
        if (y.size() < 10'000)
            throw CommandAbort{exit_insufficient_data,
                               "tail fitting needs at least 10000 samples, got " +
                                   std::to_string(y.size())};

        // The [grids] u key lists ruin levels; the tail study needs a dense
        // geometric grid, so it always derives one from the samples.
        TailReport rep = tail_report(y, sol.beta, cfg.hill_k, {});

        const std::string csv_path = (fs::path(opt.out_dir) / "tail.csv").string();
        CsvFile csv(csv_path, {"u", "g_bar", "ci", "u_beta_gbar"});
        for (std::size_t i = 0; i < rep.tail.u.size(); ++i) {
            csv.cell(rep.tail.u[i]);
            csv.cell(rep.tail.g_bar[i]);
            csv.cell(rep.tail.ci_half_width[i]);
            csv.cell(std::pow(rep.tail.u[i], sol.beta) * rep.tail.g_bar[i]);
            csv.end_row();
        }
        csv.close();
        write_manifest(opt.out_dir, "tail-fit", cfg, clock.seconds(), {"tail.csv"});

        std::cout << "beta_analytic = " << format_double(sol.beta) << "\n";
        std::cout << "hill: beta_hat = " << format_double(rep.hill.beta) << "  ci ["
                  << format_double(rep.hill.ci_lo) << ", " << format_double(rep.hill.ci_hi)
                  << "]  k = " << rep.hill.k << "\n";
        std::cout << "hill sweep:";
        for (const auto& h : rep.hill_sweep)
            std::cout << "  k=" << h.k << " beta=" << format_double(h.beta);
        std::cout << "\n";
        std::cout << "ols: slope = " << format_double(rep.ols.slope) << " (beta_ols = "
                  << format_double(-rep.ols.slope) << ")  r2 = " << format_double(rep.ols.r2)
                  << "  curvature = " << format_double(rep.ols.curvature)
                  << (rep.ols.curved ? "  [curved: tail is not a clean power law]" : "") << "\n";
        std::cout << "plateau u^beta G(u): " << (rep.plateau.stable ? "stable" : "NOT stable")
                  << ", max/min = " << format_double(rep.plateau.max_over_min) << " over "
                  << rep.plateau.u.size() << " points\n";
        if (rep.c_minus_estimable)
            std::cout << "negative tail plateau: "
                      << (rep.c_minus.stable ? "stable" : "NOT stable") << ", max/min = "
                      << format_double(rep.c_minus.max_over_min) << "\n";
        else
            std::cout << "negative tail: too little mass to estimate\n";
        std::cout << "wrote " << csv_path << "\n";
        return exit_ok;
    });
}

namespace {

struct VerifyRow {
    std::string check;
    double value;
    double reference;
    double tolerance;
    bool pass;
};

class VerifySuite {
public:
    void add(const std::string& check, double value, double reference, double tolerance,
             bool pass) {
        rows_.push_back({check, value, reference, tolerance, pass});
        std::cout << (pass ? "PASS  " : "FAIL  ") << check << "  value=" << format_double(value)
                  << " reference=" << format_double(reference)
                  << " tolerance=" << format_double(tolerance) << "\n";
    }
    // Distance from reference scored against the tolerance.
    void add_within(const std::string& check, double value, double reference, double tolerance) {
        add(check, value, reference, tolerance, std::abs(value - reference) <= tolerance);
    }
    bool all_pass() const {
        return std::all_of(rows_.begin(), rows_.end(), [](const VerifyRow& r) { return r.pass; });
    }
    const std::vector<VerifyRow>& rows() const { return rows_; }

private:
    std::vector<VerifyRow> rows_;
};

}  // namespace

int cmd_verify(const CliOptions& opt) {
    return guarded([&]() -> int {
        WallClock clock;
        RunConfig cfg = load_with_overrides(opt);

        // Reduced, fixed scale: the point is an end-to-end consistency audit,
        // not publication-grade error bars.
        constexpr std::size_t kCycles = 100'000;
        constexpr std::size_t kQuadCycles = 10'000;
        const std::uint64_t sandwich_paths =
            opt.paths ? *opt.paths : std::min<std::uint64_t>(cfg.sim.n_paths, 30'000);

        VerifySuite suite;
        auto finish = [&]() -> int {
            std::cout << (suite.all_pass() ? "verify: all checks passed"
                                           : "verify: FAILURES present")
                      << "  (" << format_double(clock.seconds()) << " s)\n";
            if (!opt.out_dir.empty()) {
                ensure_out_dir(opt.out_dir);
                const std::string csv_path = (fs::path(opt.out_dir) / "verify.csv").string();
                CsvFile csv(csv_path, {"check", "value", "reference", "tolerance", "status"});
                for (const auto& r : suite.rows()) {
                    csv.cell(r.check);
                    csv.cell(r.value);
                    csv.cell(r.reference);
                    csv.cell(r.tolerance);
                    csv.cell(std::string(r.pass ? "pass" : "fail"));
                    csv.end_row();
                }
                csv.close();
                write_manifest(opt.out_dir, "verify", cfg, clock.seconds(), {"verify.csv"});
            }
            return suite.all_pass() ? exit_ok : exit_verification_failed;
        };

        ValidationReport report = validate_model(cfg.model);
        std::size_t n_fail = 0;
        for (const auto& c : report.checks)
            if (c.status == CheckStatus::fail) ++n_fail;
        suite.add("model validation failures", static_cast<double>(n_fail), 0.0, 0.0, n_fail == 0);
        if (n_fail > 0) {
            print_validation(report);
            std::cout << "model checks failed; skipping dependent checks\n";
            return finish();
        }

        CanonicalRegimes canon = canonicalize(cfg.model.regimes);
        ModelSpec spec = cfg.model;  // simulation uses the user's labels
        BetaSolution sol = solve_beta(canon.params);
        const double beta = sol.beta;
        std::cout << "beta = " << format_double(beta) << "\n";

        suite.add("beta residual |f(beta)-1|", sol.residual_f, 0.0, 1e-9,
                  sol.residual_f <= 1e-9);
        const double cubic_scale = std::max(1.0, characteristic_cubic_coeffs(canon.params).scale());
        suite.add("beta residual |cubic(beta)| (scaled)", sol.residual_cubic / cubic_scale, 0.0,
                  1e-10, sol.residual_cubic / cubic_scale <= 1e-10);
        PositivityIdentityReport ident = check_positivity_identities(beta, canon.params);
        const double ident_err = std::max(ident.rel_err01, ident.rel_err10);
        suite.add("positivity identity rel err", ident_err, 0.0, 1e-9, ident.ok());

        MomentCondition moment = moment_condition(cfg.model.claims, beta);
        suite.add("claim moment E|X|^beta finite", moment.finite ? 1.0 : 0.0, 1.0, 0.0,
                  moment.finite);

        // Raw MGF checks at q where M^q has light enough tails for a plain
        // mean; beta itself is handled by the conditional estimator below.
        std::vector<double> q_grid = cfg.q_grid;
        if (q_grid.empty()) q_grid = {0.5 * beta};
        for (double q : q_grid) {
            MgfValue fq = mgf_f(q, canon.params);
            if (!fq.in_domain) {
                std::cout << "note: skipping E M^q at q = " << format_double(q)
                          << " (f is infinite there)\n";
                continue;
            }
            double sum = 0.0, sum2 = 0.0;
            for (std::size_t i = 0; i < kCycles; ++i) {
                RngStream rng(cfg.seed, i);
                CycleSample cs = sample_cycle(rng, spec, cfg.sim.grid_step);
                const double x = std::pow(cs.m, q);
                sum += x;
                sum2 += x * x;
            }
            const double n = static_cast<double>(kCycles);
            const double mean = sum / n;
            const double se = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n);
            suite.add_within("E M^q vs f(q) at q=" + format_double(q), mean, fq.value,
                             4.0 * se);
        }

        SimConfig kcfg = cfg.sim;
        kcfg.n_paths = kCycles;
        KestenReport kes = kesten_conditions_report(spec, kcfg, beta, cfg.seed);
        suite.add_within("E M^beta (conditional)", kes.m_beta_mean, 1.0, 4.0 * kes.m_beta_se);
        suite.add("E M^beta (ln M)+ half-vs-full drift", kes.log_moment.rel_change, 0.0, 0.05,
                  kes.log_moment.stable);
        suite.add("E |Q|^beta half-vs-full drift", kes.q_moment.rel_change, 0.0, 0.05,
                  kes.q_moment.stable);

        // Expected discounted-time integral against its closed form.
        {
            MgfValue a = expected_discount_integral(beta, canon.params);
            ModelSpec canon_spec;
            canon_spec.regimes = canon.params;
            canon_spec.initial_regime = 0;
            double sum = 0.0, sum2 = 0.0;
            for (std::size_t i = 0; i < kCycles; ++i) {
                RngStream rng(cfg.seed, (1ULL << 40) + i);
                const double x = discount_integral_sample(rng, canon_spec, beta, cfg.sim.grid_step);
                sum += x;
                sum2 += x * x;
            }
            const double n = static_cast<double>(kCycles);
            const double mean = sum / n;
            const double se = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n);
            suite.add_within("E int e^{-beta V} dt vs closed form", mean, a.value, 4.0 * se);
        }

        // Quadrature self-consistency: halving the step on a common Brownian
        // path moves the cycle integral by O(h), far below statistical error.
        {
            double sum_d01 = 0.0, sum_abs01 = 0.0, sum_abs12 = 0.0, sum_q = 0.0;
            for (std::size_t i = 0; i < kQuadCycles; ++i) {
                RngStream rng(cfg.seed, (1ULL << 41) + i);
                NestedCycleSample ns = sample_cycle_nested(rng, spec, cfg.sim.grid_step, 3);
                sum_d01 += ns.q[1] - ns.q[0];
                sum_abs01 += std::abs(ns.q[1] - ns.q[0]);
                sum_abs12 += std::abs(ns.q[2] - ns.q[1]);
                sum_q += std::abs(ns.q[2]);
            }
            const double scale = std::max(sum_q / static_cast<double>(kQuadCycles), 1e-12);
            const double level = std::abs(sum_d01 / static_cast<double>(kQuadCycles)) / scale;
            const double order = std::log2(sum_abs01 / std::max(sum_abs12, 1e-300));
            suite.add("quadrature halving rel change", level, 0.0, 1e-3, level < 1e-3);
            suite.add("quadrature order from halving", order, 1.0, 0.5, order >= 0.5);
        }

        // Ruin bracket: lower bound holds pathwise; the upper bound only in
        // distribution, so its slack carries the denominator's CI as well.
        {
            std::vector<double> u_check = cfg.u_grid;
            if (u_check.empty()) u_check = {5.0, 10.0, 20.0};
            if (u_check.size() > 3) u_check.resize(3);
            SimConfig scfg = cfg.sim;
            scfg.n_paths = sandwich_paths;
            RuinEstimate est = estimate_ruin(cfg.model, scfg, u_check, cfg.seed);
            for (int r = 0; r < 2; ++r) {
                const auto& per = est.regime[r];
                for (std::size_t i = 0; i < u_check.size(); ++i) {
                    const double psi = per.psi_hat[i];
                    const double lo = per.sandwich_lo[i];
                    const double hi = per.sandwich_hi[i];
                    const double num = lo;  // same G estimate feeds the upper bound
                    const double den = est.g_bar_zero_min;
                    const double num_half = wilson_ci(
                        static_cast<std::size_t>(std::llround(num * static_cast<double>(per.n_paths))),
                        per.n_paths).half();
                    const double den_half = wilson_ci(
                        static_cast<std::size_t>(std::llround(den * static_cast<double>(per.n_paths))),
                        per.n_paths).half();
                    const double slack = num_half / den + num * den_half / (den * den);
                    const bool pass = psi >= lo && psi <= hi + slack;
                    suite.add("ruin bracket r" + std::to_string(r) + " u=" + format_double(
                                  u_check[i]),
                              psi, 0.5 * (lo + hi), hi + slack - lo, pass);
                }
            }
        }

        return finish();
    });
}

}  // namespace ruinvest::tool
