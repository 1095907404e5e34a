#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stochcl/config.hpp"
#include "stochcl/entropy.hpp"
#include "stochcl/io.hpp"

namespace stochcl {

struct ExperimentInfo {
    std::string name;
    std::string summary;
};

// The registry, one entry per acceptance criterion, in criterion order.
const std::vector<ExperimentInfo>& list_experiments();
bool experiment_exists(const std::string& name);

struct ExperimentConfig {
    std::string name;
    Config params;
    // Registry defaults with the quick flag applied.
    static ExperimentConfig defaults(const std::string& name, bool quick = false);
    // FNV-1a over the name and the canonical parameters.
    std::string hash() const;
};

struct Assertion {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    std::string relation;  // how value is compared with tolerance, e.g. "<=" or ">="
    bool pass = false;
};

struct ResultRecord {
    std::string experiment;
    std::string config_hash;
    std::string input_id;  // git blob id of the canonical inputs
    std::vector<Assertion> assertions;
    // Every reported number in emission order; the determinism check compares these.
    std::vector<std::pair<std::string, double>> numbers;
    std::map<std::string, CsvTable> tables;
    std::map<std::string, GridField> snapshots;  // written as binary files
    double wall_seconds = 0.0;
    std::size_t samples = 0;

    bool pass() const;
    std::string summary() const;
    // Writes one CSV per table, assertions.csv and summary.txt.
    void write(const std::string& dir) const;
};

// Throws ConfigError for unknown names (listing the registry) or schema violations.
ResultRecord run_experiment(const ExperimentConfig& cfg);

// Single-configuration diagnostics behind the CLI subcommands: solve, tangent, weak-continuity,
// entropy-check, initial, kato, contraction, frac-bv, doubling, convergence, ito-check, constants,
// young, picard, moments.
ResultRecord run_diagnostic(const std::string& kind, const Config& c);
const std::vector<std::string>& diagnostic_kinds();

// SHA-1 of "blob <size>\0<content>", as git computes object ids.
std::string git_blob_id(const std::string& content);

// Largest relative difference between two records' numbers (infinity on a shape mismatch).
double max_relative_difference(const ResultRecord& a, const ResultRecord& b);

// ---------------------------------------------------------------- entropy trials

// n random (S_delta, bump test, V = c0 + tanh(W(h))/2) draws.
std::vector<EntropyTrial> random_entropy_trials(const SolverConfig& cfg, std::size_t n, std::uint64_t seed);

struct EntropyCalibration {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    double max_residual = 0.0;
    std::vector<double> residual;  // stride 1, the reference eps
};

// Linear flux with S(s) = s and constant V, where the weak form is an identity:
// c1 = max|res| / dx, c2 = stride-10 shift / dt_q, c3 = eps-doubling shift / eps.
EntropyCalibration calibrate_entropy_tolerance(std::size_t n_x, std::uint64_t seed);

}  // namespace stochcl
