#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stochcl/experiments.hpp"
#include "stochcl/heat_kernel.hpp"
#include "stochcl/parallel.hpp"

namespace py = pybind11;
using namespace stochcl;

namespace {

Config with_overrides(Config c, const std::map<std::string, std::string>& overrides) {
    for (const auto& [k, v] : overrides) c.set(k, v);
    return c;
}

py::dict tables_of(const ResultRecord& r) {
    py::dict d;
    for (const auto& [name, t] : r.tables) d[py::str(name)] = t.str();
    return d;
}

py::dict snapshots_of(const ResultRecord& r) {
    py::dict d;
    for (const auto& [name, f] : r.snapshots)
        d[py::str(name)] = py::array_t<double>(static_cast<py::ssize_t>(f.values.size()), f.values.data());
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "viscous stochastic conservation laws: diagnostics and registry experiments";
    m.attr("__version__") = library_version();

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<Config>(m, "Config")
        .def(py::init<>())
        .def(py::init([](const std::map<std::string, std::string>& kv) { return with_overrides(Config(), kv); }))
        .def_static("parse", [](const std::string& text) { return Config::parse(text); })
        .def_static("load", &Config::load)
        .def("set", [](Config& c, const std::string& k, const std::string& v) { c.set(k, v); })
        .def("get", [](const Config& c, const std::string& k) {
            if (!c.has(k)) throw ConfigError("unknown config key '" + k + "'");
            return c.values().at(k);
        })
        .def("canonical", &Config::canonical)
        .def("hash", &Config::hash)
        .def("values", &Config::values);

    m.def("config_keys", [] {
        std::vector<std::string> keys;
        for (const auto& s : config_schema()) keys.push_back(s.key);
        return keys;
    });

    py::class_<Assertion>(m, "Assertion")
        .def_readonly("name", &Assertion::name)
        .def_readonly("value", &Assertion::value)
        .def_readonly("tolerance", &Assertion::tolerance)
        .def_readonly("relation", &Assertion::relation)
        .def_readonly("passed", &Assertion::pass)
        .def("__repr__", [](const Assertion& a) {
            return "<Assertion " + a.name + (a.pass ? " PASS>" : " FAIL>");
        });

    py::class_<ResultRecord>(m, "ResultRecord")
        .def_readonly("experiment", &ResultRecord::experiment)
        .def_readonly("config_hash", &ResultRecord::config_hash)
        .def_readonly("input_id", &ResultRecord::input_id)
        .def_readonly("assertions", &ResultRecord::assertions)
        .def_readonly("wall_seconds", &ResultRecord::wall_seconds)
        .def_readonly("samples", &ResultRecord::samples)
        .def_property_readonly("passed", &ResultRecord::pass)
        .def_property_readonly("numbers", [](const ResultRecord& r) {
            py::dict d;
            for (const auto& [k, v] : r.numbers) d[py::str(k)] = v;
            return d;
        })
        .def_property_readonly("tables", &tables_of)
        .def_property_readonly("snapshots", &snapshots_of)
        .def("summary", &ResultRecord::summary)
        .def("write", &ResultRecord::write, py::arg("directory"));

    m.def("list_experiments", [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& e : list_experiments()) out.emplace_back(e.name, e.summary);
        return out;
    });
    m.def("diagnostic_kinds", &diagnostic_kinds);

    m.def(
        "default_config",
        [](const std::string& name, bool quick) { return ExperimentConfig::defaults(name, quick).params; },
        py::arg("name"), py::arg("quick") = false);

    m.def(
        "run_experiment",
        [](const std::string& name, bool quick, const std::map<std::string, std::string>& overrides) {
            ExperimentConfig ec = ExperimentConfig::defaults(name, quick);
            ec.params = with_overrides(ec.params, overrides);
            py::gil_scoped_release release;
            return run_experiment(ec);
        },
        py::arg("name"), py::arg("quick") = false, py::arg("overrides") = std::map<std::string, std::string>{});

    m.def(
        "run_diagnostic",
        [](const std::string& kind, const Config& c, const std::map<std::string, std::string>& overrides) {
            const Config full = with_overrides(c, overrides);
            py::gil_scoped_release release;
            return run_diagnostic(kind, full);
        },
        py::arg("kind"), py::arg("config") = Config(),
        py::arg("overrides") = std::map<std::string, std::string>{});

    m.def("c_d_simpson", [](int d) {
        const auto v = c_d_simpson(d);
        return std::make_pair(v.value, v.error_bound);
    });
    m.def("c_d_laguerre", [](int d) {
        const auto v = c_d_laguerre(d);
        return std::make_pair(v.value, v.error_bound);
    });
    m.def("kappa1", &kappa1);
    m.def("kappa2", &kappa2);

    m.def("git_blob_id", &git_blob_id);
    m.def("max_relative_difference", &max_relative_difference);
    m.def(
        "set_workers", [](std::size_t n) { worker_override().store(n); }, py::arg("n"),
        "worker count for Monte Carlo loops; 0 restores the STOCHCL_WORKERS / hardware default");
}
