// One PASS/FAIL line per acceptance criterion. Each criterion is a registry experiment run at its
// default (full) configuration; `--criterion N` runs one, no argument runs all of them.
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#include "stochcl/experiments.hpp"

using namespace stochcl;

namespace {

bool run_one(std::size_t index, bool verbose) {
    const auto& reg = list_experiments();
    const std::string& name = reg[index].name;
    try {
        const ResultRecord r = run_experiment(ExperimentConfig::defaults(name));
        std::size_t failed = 0;
        for (const auto& a : r.assertions) failed += a.pass ? 0 : 1;
        std::printf("%s criterion %zu %s: %zu/%zu assertions, %.1f s, hash %s\n", r.pass() ? "PASS" : "FAIL",
                    index + 1, name.c_str(), r.assertions.size() - failed, r.assertions.size(), r.wall_seconds,
                    r.config_hash.c_str());
        if (verbose)
            for (const auto& a : r.assertions)
                std::printf("    %s %s: %.6g %s %.6g\n", a.pass ? "ok  " : "FAIL", a.name.c_str(), a.value,
                            a.relation.c_str(), a.tolerance);
        std::fflush(stdout);
        return r.pass();
    } catch (const std::exception& e) {
        std::printf("FAIL criterion %zu %s: error: %s\n", index + 1, name.c_str(), e.what());
        return false;
    }
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = list_experiments().size();
    long criterion = 0;
    bool verbose = true;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) criterion = std::strtol(argv[++i], nullptr, 10);
        else if (a == "--brief") verbose = false;
        else {
            std::fprintf(stderr, "usage: acceptance [--criterion N] [--brief]\n");
            return 2;
        }
    }
    if (criterion < 0 || criterion > static_cast<long>(n)) {
        std::fprintf(stderr, "criterion must be in 1..%zu\n", n);
        return 2;
    }
    if (criterion) return run_one(static_cast<std::size_t>(criterion - 1), verbose) ? 0 : 1;
    std::size_t passed = 0;
    for (std::size_t i = 0; i < n; ++i) passed += run_one(i, verbose) ? 1 : 0;
    std::printf("%zu/%zu criteria pass\n", passed, n);
    return passed == n ? 0 : 1;
}
