#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "stochcl/experiments.hpp"
#include "stochcl/parallel.hpp"

using namespace stochcl;

TEST_CASE("config: defaults, parsing, comments and errors") {
    const Config d;
    CHECK(d.get_int("n_x") == 256);
    CHECK(d.get_real("dt") == 2e-4);
    CHECK(d.get_real_list("eps_list") == std::vector<double>{0.2, 0.1, 0.05, 0.025});
    const Config c = Config::parse("# grid\nn_x = 128   # cells\n\neps=5e-2\nsigma = mod_sin:0.5\n");
    CHECK(c.get_int("n_x") == 128);
    CHECK(c.get_text("sigma") == "mod_sin:0.5");
    CHECK_THROWS_WITH_AS(Config::parse("n_x = 64\nbogus = 1\n"), doctest::Contains("line 2"), ConfigError);
    CHECK_THROWS_AS(Config::parse("n_x = 64\nn_x = 32\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("n_x 64\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("eps = fast\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("r0_list = 8,-4\n"), ConfigError);
}

TEST_CASE("config hash: canonical numbers, output path excluded, sensitive to values") {
    Config a, b;
    a.set("eps", "0.05");
    b.set("eps", "5e-2");
    CHECK(a.hash() == b.hash());
    b.set("out", "/tmp/somewhere");
    CHECK(a.hash() == b.hash());
    b.set("seed", "2");
    CHECK(a.hash() != b.hash());
    CHECK(a.hash().size() == 16);
    // FNV-1a 64 reference values.
    CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
    CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("solver config from keys") {
    Config c;
    c.set("T", "0.1");
    const SolverConfig s = solver_config(c);
    CHECK(s.n_steps == 500);
    CHECK(s.grid.n == 256);
    c.set("T", "0.10001");
    CHECK_THROWS_AS(solver_config(c), ConfigError);
    c.set("T", "0.5");
    c.set("dt", "0.05");
    CHECK_THROWS(solver_config(c));
}

TEST_CASE("CSV: RFC-4180 quoting, CRLF rows, hash and version columns") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CsvTable t({"name", "value"}, "0123456789abcdef");
    t.add_row({"x,y", "1"});
    t.add_numbers({0.1, 2.0});
    const std::string s = t.str();
    CHECK(s.find("\r\n") != std::string::npos);
    const auto rows = parse_csv(s);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"name", "value", "config_hash", "version"});
    CHECK(rows[1][0] == "x,y");
    CHECK(std::stod(rows[2][0]) == 0.1);
    CHECK(rows[2][2] == "0123456789abcdef");
    CHECK(rows[2][3] == library_version());
    CHECK_THROWS(t.add_row({"only one"}));
    CHECK_THROWS(parse_csv("\"open"));
}

TEST_CASE("snapshots round-trip bit-exactly") {
    const Grid g(64, 10.0);
    GridField u(g, 0.0, 0.25);
    for (std::size_t i = 0; i < g.n; ++i) u[i] = std::sin(0.1 * i) / 3.0;
    const std::string f = "test_snapshot.bin";
    write_snapshot(u, "feedfacecafebeef", f);
    const Snapshot s = read_snapshot(f);
    CHECK(s.field.values == u.values);
    CHECK(s.field.t == 0.25);
    CHECK(s.config_hash == "feedfacecafebeef");
    CHECK(s.version == library_version());
    {
        std::ofstream bad(f, std::ios::binary);
        bad << "NOTASNAP";
    }
    CHECK_THROWS(read_snapshot(f));
    std::remove(f.c_str());
}

TEST_CASE("git blob ids match git hash-object") {
    CHECK(git_blob_id("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_id("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("registry: fifteen experiments, unknown names list the registry") {
    const auto& v = list_experiments();
    REQUIRE(v.size() == 15);
    CHECK(v.front().name == "lemma-3.1-constants");
    CHECK(v.back().name == "determinism");
    CHECK(experiment_exists("prop-5.4-kato"));
    CHECK_FALSE(experiment_exists("kato"));
    CHECK_THROWS_WITH_AS(ExperimentConfig::defaults("nope"), doctest::Contains("eq-1.9-contraction"), ConfigError);
    const auto q = ExperimentConfig::defaults("thm-6.5-ito", true);
    const auto f = ExperimentConfig::defaults("thm-6.5-ito", false);
    CHECK(q.params.get_int("n_mc") < f.params.get_int("n_mc"));
    CHECK(q.hash() != f.hash());
}

TEST_CASE("result records carry the hash and write every artefact") {
    ExperimentConfig ec = ExperimentConfig::defaults("lemma-3.1-constants");
    const ResultRecord r = run_experiment(ec);
    CHECK(r.config_hash == ec.hash());
    CHECK(r.input_id.size() == 40);
    CHECK(r.pass());
    CHECK(r.assertions.size() == 5);
    const std::string dir = "test_record_out";
    r.write(dir);
    for (const auto& f : {"constants.csv", "assertions.csv", "summary.txt"}) CHECK(std::filesystem::exists(dir + "/" + f));
    std::ifstream s(dir + "/constants.csv");
    std::stringstream ss;
    ss << s.rdbuf();
    CHECK(ss.str().find(r.config_hash) != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("solve diagnostic writes moment curves and snapshots") {
    Config c;
    c.set("T", "0.02");
    c.set("n_mc", "8");
    c.set("snapshots", "2");
    const ResultRecord r = run_diagnostic("solve", c);
    CHECK(r.pass());
    CHECK(r.tables.count("moment_p2") == 1);
    CHECK(r.snapshots.size() == 2);
    CHECK_THROWS_AS(run_diagnostic("unknown", c), ConfigError);
}

TEST_CASE("records are identical across worker counts") {
    Config c;
    c.set("T", "0.02");
    c.set("n_mc", "9");
    worker_override().store(1);
    const ResultRecord a = run_diagnostic("contraction", c);
    worker_override().store(3);
    const ResultRecord b = run_diagnostic("contraction", c);
    worker_override().store(0);
    CHECK(max_relative_difference(a, b) == 0.0);
    ResultRecord d = b;
    d.numbers[0].second *= 1.0 + 1e-9;
    CHECK(max_relative_difference(a, d) > 1e-12);
    d.numbers.pop_back();
    CHECK(std::isinf(max_relative_difference(a, d)));
}
