#include "stochcl/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace stochcl {

const std::vector<SchemaEntry>& config_schema() {
    static const std::vector<SchemaEntry> s = {
        {"n_x", ValueType::integer, "cells", "256", "grid cells on [-L, L), power of two"},
        {"L", ValueType::real, "length", "10", "torus half-width"},
        {"flux", ValueType::text, "", "burgers:2", "linear:a | burgers:u_max | sin:a | zero"},
        {"sigma", ValueType::text, "", "mult_sin:0.5", "none | additive:g | mult_sin:g | mult_rational:g | mod_one:g | mod_sin:g | mod_rational:g"},
        {"weight", ValueType::text, "", "exp:2", "poly:N | exp:lambda | moll:<base>:<delta> | trunc:<base>:<R>"},
        {"eps", ValueType::real, "length^2/time", "0.05", "viscosity"},
        {"dt", ValueType::real, "time", "0.0002", "time step"},
        {"T", ValueType::real, "time", "0.5", "final time, a multiple of dt"},
        {"nodes", ValueType::integer, "", "4", "noise nodes m, uniform masses 1/m"},
        {"n_mc", ValueType::integer, "samples", "2000", "Monte Carlo paths"},
        {"seed", ValueType::integer, "", "1", "master seed"},
        {"snapshots", ValueType::integer, "count", "10", "evenly spaced output times"},
        {"u0", ValueType::text, "", "bump:1:1", "initial data key"},
        {"v0", ValueType::text, "", "bump:0.5:1.5", "second initial data key for comparisons"},
        {"eps_list", ValueType::real_list, "length^2/time", "0.2,0.1,0.05,0.025", "viscosity sweep"},
        {"r0_list", ValueType::int_list, "steps", "8,4,2", "time mollifier radii"},
        {"r_list", ValueType::real_list, "length", "0.2,0.4,0.8,1.6", "spatial radii"},
        {"p_list", ValueType::real_list, "", "2,4", "moment orders"},
        {"h_list", ValueType::real_list, "time", "0.2,0.1,0.05", "step sizes of the weak-order study"},
        {"entropy", ValueType::text, "", "s_delta:0.05", "entropy key"},
        {"trials", ValueType::integer, "count", "20", "random (S, test, V) draws"},
        {"time_stride", ValueType::integer, "steps", "10", "time quadrature stride"},
        {"r_step", ValueType::integer, "steps", "100", "Malliavin differentiation step"},
        {"k", ValueType::integer, "", "0", "noise node"},
        {"ito_case", ValueType::text, "", "all", "Ito case name or all"},
        {"ito_steps", ValueType::integer, "steps", "1000", "Ito time steps on [0, 1]"},
        {"picard_iter", ValueType::integer, "count", "8", "Picard iterations"},
        {"beta_factor", ValueType::real, "", "1.5", "beta as a multiple of the contraction threshold"},
        {"radius", ValueType::real, "length", "0.3", "doubling spatial mollifier radius"},
        {"delta", ValueType::real, "", "0.2", "entropy smoothing"},
        {"gamma_steps", ValueType::integer, "steps", "10", "doubling time cutoff radius"},
        {"t0_steps", ValueType::integer, "steps", "200", "doubling or Kato end step (0 = final step)"},
        {"psi_x0", ValueType::real, "length", "0", "spatial test centre"},
        {"psi_width", ValueType::real, "length", "3", "spatial test half-width"},
        {"tol_c1", ValueType::real, "", "-1", "tolerance override, negative = frozen calibration"},
        {"tol_c2", ValueType::real, "", "-1", "tolerance override, negative = frozen calibration"},
        {"tol_c3", ValueType::real, "", "-1", "tolerance override, negative = frozen calibration"},
        {"quick", ValueType::integer, "", "0", "1 = reduced sample counts"},
        {"out", ValueType::text, "", "", "output directory (empty = none)", false},
    };
    return s;
}

const SchemaEntry* find_schema(std::string_view key) {
    for (const auto& e : config_schema())
        if (e.key == key) return &e;
    return nullptr;
}

namespace {

std::string trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

double to_real(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(x))
        throw ConfigError("key '" + key + "' expects a real number, got '" + v + "'");
    return x;
}

long long to_int(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0' || errno == ERANGE)
        throw ConfigError("key '" + key + "' expects an integer, got '" + v + "'");
    return x;
}

std::string fmt_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string normalise(const SchemaEntry& e, const std::string& v) {
    switch (e.type) {
        case ValueType::integer: return std::to_string(to_int(e.key, v));
        case ValueType::real: return fmt_real(to_real(e.key, v));
        case ValueType::text: return v;
        case ValueType::real_list:
        case ValueType::int_list: {
            std::string out;
            for (const auto& item : split(v, ',')) {
                if (!out.empty()) out += ",";
                if (e.type == ValueType::real_list) {
                    out += fmt_real(to_real(e.key, item));
                } else {
                    const long long n = to_int(e.key, item);
                    if (n < 0) throw ConfigError("key '" + e.key + "' expects non-negative integers");
                    out += std::to_string(n);
                }
            }
            if (out.empty()) throw ConfigError("key '" + e.key + "' expects a non-empty list");
            return out;
        }
    }
    return v;
}

}  // namespace

Config::Config() {
    for (const auto& e : config_schema()) values_[e.key] = e.default_value.empty() ? "" : normalise(e, e.default_value);
}

void Config::set(std::string_view key, std::string_view value) {
    const SchemaEntry* e = find_schema(key);
    if (!e) throw ConfigError("unknown config key '" + std::string(key) + "'");
    const std::string v = trim(value);
    values_[e->key] = (e->type == ValueType::text) ? v : normalise(*e, v);
}

Config Config::parse(std::string_view text) {
    Config c;
    std::vector<std::string> seen;
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        seen.push_back(key);
        try {
            c.set(key, std::string_view(t).substr(eq + 1));
        } catch (const ConfigError& err) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + err.what());
        }
    }
    return c;
}

Config Config::load(const std::string& filename) {
    std::ifstream f(filename);
    if (!f) throw ConfigError("cannot open config file " + filename);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

long long Config::get_int(std::string_view key) const { return to_int(std::string(key), values_.at(std::string(key))); }

double Config::get_real(std::string_view key) const { return to_real(std::string(key), values_.at(std::string(key))); }

std::string Config::get_text(std::string_view key) const { return values_.at(std::string(key)); }

std::vector<double> Config::get_real_list(std::string_view key) const {
    std::vector<double> out;
    const std::string k(key);
    for (const auto& s : split(values_.at(k), ',')) out.push_back(to_real(k, s));
    return out;
}

std::vector<std::size_t> Config::get_int_list(std::string_view key) const {
    std::vector<std::size_t> out;
    const std::string k(key);
    for (const auto& s : split(values_.at(k), ',')) out.push_back(static_cast<std::size_t>(to_int(k, s)));
    return out;
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) {
        const SchemaEntry* e = find_schema(k);
        if (e && !e->hashed) continue;
        out += k + "=" + v + "\n";
    }
    return out;
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t h) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string Config::hash() const { return hex64(fnv1a(canonical())); }

SolverConfig solver_config(const Config& c) {
    SolverConfig s;
    const long long n = c.get_int("n_x"), m = c.get_int("nodes");
    if (n <= 0 || m <= 0) throw ConfigError("n_x and nodes must be positive");
    s.grid = Grid(static_cast<std::size_t>(n), c.get_real("L"));
    s.eps = c.get_real("eps");
    s.dt = c.get_real("dt");
    const double steps = c.get_real("T") / s.dt;
    if (!(s.dt > 0.0) || std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps) || steps < 1.0)
        throw ConfigError("T must be a positive multiple of dt");
    s.n_steps = static_cast<std::size_t>(std::llround(steps));
    s.flux = FluxFn::parse(c.get_text("flux"));
    s.noise = NoiseSpace::uniform(static_cast<std::size_t>(m));
    s.sigma = SigmaCoeff::parse(c.get_text("sigma"), s.noise);
    s.weight = Weight::parse(c.get_text("weight"));
    s.validate();
    return s;
}

}  // namespace stochcl
