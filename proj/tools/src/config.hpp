#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ruinvest/model.hpp"
#include "ruinvest/pathsim.hpp"

namespace ruinvest::tool {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fully resolved run inputs. Fixing (config file, CLI overrides) fixes every
// byte of the data files a command writes.
struct RunConfig {
    ModelSpec model;
    SimConfig sim;
    std::uint64_t seed = 1;
    bool grid_step_from_file = false;  // false: grid_step was auto-derived
    std::vector<double> u_grid;        // empty: derive from samples
    std::vector<double> q_grid;        // empty: {0.5, 1.0, beta}
    std::size_t hill_k = 0;            // 0: default order-statistic count
    double tail_min_quantile = 0.9;
};

// INI-style file with [regime], [claims], [simulation], [grids] sections.
// Unknown sections or keys are errors; missing required keys are errors.
RunConfig load_config(const std::string& path);

// Distribution expression, e.g. "exponential(1.0)" or "pareto(1, 2.5)".
ClaimDist parse_dist(const std::string& text);

std::vector<double> parse_number_list(const std::string& text);

}  // namespace ruinvest::tool
