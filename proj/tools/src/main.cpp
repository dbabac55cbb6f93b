#include <cstdint>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "ruinvest/version.hpp"

namespace {

using ruinvest::tool::CliOptions;

// Every subcommand shares the same override flags so scripted runs can vary
// seed, scale, and parallelism without touching the config file.
void add_common(CLI::App* sub, CliOptions& opt, bool out_required) {
    sub->add_option("--config", opt.config_path, "model/run configuration file")
        ->required();
    auto* out = sub->add_option("--out", opt.out_dir, "output directory (csv + manifest.json)");
    if (out_required) out->required();
    sub->add_option("--seed", opt.seed, "override [simulation] seed");
    sub->add_option("--paths", opt.paths, "override [simulation] paths");
    sub->add_option("--workers", opt.workers, "override [simulation] workers");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ruin exponents for a reserve under regime-switching volatility"};
    app.set_version_flag("--version", std::string("ruinvest ") + ruinvest::kVersion);
    app.require_subcommand(1);

    CliOptions opt;

    auto* solve = app.add_subcommand(
        "solve-beta", "solve f(beta) = 1 for the ruin decay exponent and audit the identities");
    add_common(solve, opt, false);

    auto* simulate = app.add_subcommand(
        "simulate", "sample perpetuity paths Y_inf / Y_sup and write y_samples.csv");
    add_common(simulate, opt, true);

    auto* estimate = app.add_subcommand(
        "estimate-ruin", "estimate ruin probabilities on a u grid with bracketing bounds");
    add_common(estimate, opt, true);

    auto* tail = app.add_subcommand(
        "tail-fit", "fit the Y_inf tail (Hill, log-log OLS, plateau) against the solved exponent");
    add_common(tail, opt, true);
    tail->add_option("--input", opt.input_csv,
                     "existing y_samples.csv to fit instead of simulating");
    tail->add_option("--hill-k", opt.hill_k, "override Hill order-statistic count");

    auto* verify = app.add_subcommand(
        "verify", "run the reduced-scale invariant suite; exit 4 on any failure");
    add_common(verify, opt, false);

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed()) return ruinvest::tool::cmd_solve_beta(opt);
    if (simulate->parsed()) return ruinvest::tool::cmd_simulate(opt);
    if (estimate->parsed()) return ruinvest::tool::cmd_estimate_ruin(opt);
    if (tail->parsed()) return ruinvest::tool::cmd_tail_fit(opt);
    if (verify->parsed()) return ruinvest::tool::cmd_verify(opt);
    return ruinvest::tool::exit_config_error;  // unreachable: subcommand required
}
