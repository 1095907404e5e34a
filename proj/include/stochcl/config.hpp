#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stochcl/viscous_solver.hpp"

namespace stochcl {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ValueType { integer, real, text, real_list, int_list };

struct SchemaEntry {
    std::string key;
    ValueType type;
    std::string unit;  // "" for dimensionless
    std::string default_value;
    std::string doc;
    bool hashed = true;  // false for keys that cannot change any number (output paths)
};

// Every recognised key. Unknown keys are rejected.
const std::vector<SchemaEntry>& config_schema();
const SchemaEntry* find_schema(std::string_view key);

// Flat "key = value" text, '#' comments, one key per line, no includes.
class Config {
public:
    Config();  // all defaults
    static Config parse(std::string_view text);
    static Config load(const std::string& filename);

    // Validates against the schema and stores the normalised value.
    void set(std::string_view key, std::string_view value);
    bool has(std::string_view key) const { return values_.count(std::string(key)) != 0; }

    long long get_int(std::string_view key) const;
    double get_real(std::string_view key) const;
    std::string get_text(std::string_view key) const;
    std::vector<double> get_real_list(std::string_view key) const;
    std::vector<std::size_t> get_int_list(std::string_view key) const;

    // Sorted key=value lines with normalised numbers over the hashed keys; the hash input.
    std::string canonical() const;
    // FNV-1a of canonical(), 16 hex digits.
    std::string hash() const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

// grid, flux, sigma, weight, eps, dt, T and nodes.
SolverConfig solver_config(const Config& c);

}  // namespace stochcl
