#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace ruinvest::tool {

enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 1,       // unreadable/invalid config or I/O failure
    exit_not_applicable = 2,     // model outside the theory's assumptions
    exit_insufficient_data = 3,  // too few samples for the requested estimate
    exit_verification_failed = 4,
};

struct CliOptions {
    std::string config_path;
    std::string out_dir;    // empty: no files, stdout only
    std::string input_csv;  // tail-fit: reuse y_samples.csv instead of simulating
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> paths;
    std::optional<unsigned> workers;
    std::optional<std::uint64_t> hill_k;
};

int cmd_solve_beta(const CliOptions& opt);
int cmd_simulate(const CliOptions& opt);
int cmd_estimate_ruin(const CliOptions& opt);
int cmd_tail_fit(const CliOptions& opt);
int cmd_verify(const CliOptions& opt);

}  // namespace ruinvest::tool
