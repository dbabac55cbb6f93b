#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace ruinvest::tool {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw ConfigError("key '" + key + "': not a number: '" + t + "'");
    return value;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw ConfigError("key '" + key + "': not a nonnegative integer: '" + t + "'");
    return value;
}

// One parsed section: ordered key -> raw value, with consumption tracking so
// unread keys can be reported as unknown.
class Section {
public:
    void set(const std::string& key, const std::string& value, const std::string& section) {
        if (values_.count(key))
            throw ConfigError("duplicate key '" + key + "' in section [" + section + "]");
        values_[key] = value;
    }

    std::optional<std::string> take(const std::string& key) {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        std::string v = it->second;
        values_.erase(it);
        return v;
    }

    std::string require(const std::string& key, const std::string& section) {
        auto v = take(key);
        if (!v) throw ConfigError("section [" + section + "]: missing required key '" + key + "'");
        return *v;
    }

    void finish(const std::string& section) const {
        if (!values_.empty())
            throw ConfigError("unknown key '" + values_.begin()->first + "' in section [" + section + "]");
    }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace

ClaimDist parse_dist(const std::string& text) {
    const std::string t = trim(text);
    auto open = t.find('(');
    if (open == std::string::npos || t.back() != ')')
        throw ConfigError("distribution '" + t + "': expected name(arg[, arg])");
    const std::string name = trim(t.substr(0, open));
    const std::string args_text = t.substr(open + 1, t.size() - open - 2);

    std::vector<double> args;
    std::stringstream ss(args_text);
    std::string piece;
    while (std::getline(ss, piece, ',')) args.push_back(to_double(name, piece));

    auto arity = [&](std::size_t n) {
        if (args.size() != n)
            throw ConfigError("distribution '" + name + "': expected " + std::to_string(n) +
                              " argument(s), got " + std::to_string(args.size()));
    };
    try {
        if (name == "exponential") { arity(1); return ClaimDist::exponential(args[0]); }
        if (name == "pareto")      { arity(2); return ClaimDist::pareto(args[0], args[1]); }
        if (name == "constant")    { arity(1); return ClaimDist::constant(args[0]); }
        if (name == "lognormal")   { arity(2); return ClaimDist::lognormal(args[0], args[1]); }
    } catch (const std::invalid_argument& e) {
        throw ConfigError("distribution '" + t + "': " + e.what());
    }
    throw ConfigError("unknown distribution '" + name +
                      "' (expected exponential, pareto, constant, or lognormal)");
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::string norm = text;
    std::replace(norm.begin(), norm.end(), ',', ' ');
    std::stringstream ss(norm);
    std::string piece;
    while (ss >> piece) out.push_back(to_double("list", piece));
    return out;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");

    std::map<std::string, Section> sections;
    std::string current;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            current = trim(t.substr(1, t.size() - 2));
            if (current != "regime" && current != "claims" && current != "simulation" &&
                current != "grids")
                throw ConfigError("unknown section [" + current + "]");
            sections[current];  // empty sections are legal
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (current.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        sections[current].set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)), current);
    }

    RunConfig cfg;

    auto it = sections.find("regime");
    if (it == sections.end()) throw ConfigError("missing required section [regime]");
    {
        Section& s = it->second;
        cfg.model.regimes.a0 = to_double("a0", s.require("a0", "regime"));
        cfg.model.regimes.a1 = to_double("a1", s.require("a1", "regime"));
        cfg.model.regimes.sigma0 = to_double("sigma0", s.require("sigma0", "regime"));
        cfg.model.regimes.sigma1 = to_double("sigma1", s.require("sigma1", "regime"));
        cfg.model.regimes.lambda01 = to_double("lambda01", s.require("lambda01", "regime"));
        cfg.model.regimes.lambda10 = to_double("lambda10", s.require("lambda10", "regime"));
        s.finish("regime");
    }

    it = sections.find("claims");
    if (it == sections.end()) throw ConfigError("missing required section [claims]");
    {
        Section& s = it->second;
        cfg.model.claims.premium_rate = to_double("premium_rate", s.require("premium_rate", "claims"));
        if (auto v = s.take("alpha1")) cfg.model.claims.alpha1 = to_double("alpha1", *v);
        if (auto v = s.take("alpha2")) cfg.model.claims.alpha2 = to_double("alpha2", *v);
        auto f1 = s.take("f1");
        auto f2 = s.take("f2");
        if (cfg.model.claims.alpha1 > 0.0 && !f1)
            throw ConfigError("section [claims]: alpha1 > 0 requires f1");
        if (cfg.model.claims.alpha2 > 0.0 && !f2)
            throw ConfigError("section [claims]: alpha2 > 0 requires f2");
        if (f1) cfg.model.claims.f1 = parse_dist(*f1);
        if (f2) cfg.model.claims.f2 = parse_dist(*f2);
        s.finish("claims");
    }

    it = sections.find("simulation");
    if (it != sections.end()) {
        Section& s = it->second;
        if (auto v = s.take("seed")) cfg.seed = to_u64("seed", *v);
        if (auto v = s.take("paths")) cfg.sim.n_paths = static_cast<std::size_t>(to_u64("paths", *v));
        if (auto v = s.take("cycles_max"))
            cfg.sim.n_cycles_max = static_cast<std::size_t>(to_u64("cycles_max", *v));
        if (auto v = s.take("grid_step")) {
            cfg.sim.grid_step = to_double("grid_step", *v);
            if (cfg.sim.grid_step <= 0.0) throw ConfigError("grid_step must be positive");
            cfg.grid_step_from_file = true;
        }
        if (auto v = s.take("trunc_eps")) {
            cfg.sim.trunc_eps = to_double("trunc_eps", *v);
            if (cfg.sim.trunc_eps <= 0.0) throw ConfigError("trunc_eps must be positive");
        }
        if (auto v = s.take("workers")) {
            cfg.sim.workers = static_cast<unsigned>(to_u64("workers", *v));
            if (cfg.sim.workers == 0) throw ConfigError("workers must be at least 1");
        }
        if (auto v = s.take("initial_regime")) {
            auto r = to_u64("initial_regime", *v);
            if (r > 1) throw ConfigError("initial_regime must be 0 or 1");
            cfg.model.initial_regime = static_cast<int>(r);
        }
        s.finish("simulation");
    }

    it = sections.find("grids");
    if (it != sections.end()) {
        Section& s = it->second;
        if (auto v = s.take("u")) cfg.u_grid = parse_number_list(*v);
        if (auto v = s.take("q")) cfg.q_grid = parse_number_list(*v);
        if (auto v = s.take("hill_k")) cfg.hill_k = static_cast<std::size_t>(to_u64("hill_k", *v));
        if (auto v = s.take("tail_min_quantile")) {
            cfg.tail_min_quantile = to_double("tail_min_quantile", *v);
            if (cfg.tail_min_quantile <= 0.0 || cfg.tail_min_quantile >= 1.0)
                throw ConfigError("tail_min_quantile must lie in (0, 1)");
        }
        s.finish("grids");
    }

    if (!cfg.grid_step_from_file)
        cfg.sim.grid_step = recommended_grid_step(cfg.model);
    return cfg;
}

}  // namespace ruinvest::tool
