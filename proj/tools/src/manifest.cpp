#include "manifest.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "csvio.hpp"
#include "json.hpp"
#include "ruinvest/version.hpp"

namespace ruinvest::tool {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot hash missing file '" + path + "'");
    std::uint64_t h = 14695981039346656037ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const auto n = static_cast<std::size_t>(in.gcount());
        for (std::size_t i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

std::string to_hex(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

namespace {

json dist_json(const ClaimDist& d) {
    return json{{"family", d.describe()}, {"p1", d.p1}, {"p2", d.p2}};
}

json config_json(const RunConfig& cfg) {
    const auto& r = cfg.model.regimes;
    const auto& c = cfg.model.claims;
    json j;
    j["regime"] = {{"a0", r.a0},         {"a1", r.a1},
                   {"sigma0", r.sigma0}, {"sigma1", r.sigma1},
                   {"lambda01", r.lambda01}, {"lambda10", r.lambda10}};
    j["claims"] = {{"premium_rate", c.premium_rate},
                   {"alpha1", c.alpha1},
                   {"alpha2", c.alpha2},
                   {"f1", dist_json(c.f1)},
                   {"f2", dist_json(c.f2)}};
    j["simulation"] = {{"seed", cfg.seed},
                       {"paths", cfg.sim.n_paths},
                       {"cycles_max", cfg.sim.n_cycles_max},
                       {"grid_step", cfg.sim.grid_step},
                       {"trunc_eps", cfg.sim.trunc_eps},
                       {"workers", cfg.sim.workers},
                       {"initial_regime", cfg.model.initial_regime}};
    j["grids"] = {{"u", cfg.u_grid},
                  {"q", cfg.q_grid},
                  {"hill_k", cfg.hill_k},
                  {"tail_min_quantile", cfg.tail_min_quantile}};
    return j;
}

}  // namespace

void write_manifest(const std::string& out_dir, const std::string& command,
                    const RunConfig& cfg, double wall_clock_seconds,
                    const std::vector<std::string>& output_files) {
    json j;
    j["tool"] = "ruinvest";
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = config_json(cfg);
    j["wall_clock_seconds"] = wall_clock_seconds;
    j["outputs"] = json::array();
    for (const auto& name : output_files) {
        const fs::path p = fs::path(out_dir) / name;
        j["outputs"].push_back({{"file", name},
                                {"bytes", fs::file_size(p)},
                                {"fnv1a64", to_hex(fnv1a64_file(p.string()))}});
    }

    const fs::path path = fs::path(out_dir) / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "'");
    out << j.dump(2) << '\n';
    out.close();
    if (!out) throw std::runtime_error("write error on '" + path.string() + "'");
}

}  // namespace ruinvest::tool
