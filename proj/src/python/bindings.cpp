#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "muskat/config.hpp"
#include "muskat/constants.hpp"
#include "muskat/error.hpp"
#include "muskat/experiments.hpp"
#include "muskat/io.hpp"
#include "muskat/kernel.hpp"
#include "muskat/special_functions.hpp"
#include "muskat/verify.hpp"

namespace py = pybind11;
using namespace muskat;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Arrays are indexed [j, i] with j along y, matching the row-major field layout.
ScalarField to_field(const Array& a, double lx, double ly) {
    if (a.ndim() != 2) throw InvalidArgument("field must be a 2-d array");
    GridSpec g{static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), lx, ly};
    g.validate();
    ScalarField f(g);
    std::memcpy(f.values.data(), a.data(), f.values.size() * sizeof(double));
    return f;
}

Array to_array(const ScalarField& f) {
    Array a({f.grid.ny, f.grid.nx});
    std::memcpy(a.mutable_data(), f.values.data(), f.values.size() * sizeof(double));
    return a;
}

RhsMethod method_of(const std::string& name, int param) {
    if (name == "direct") return DirectQuadrature{param > 0 ? param : 32};
    if (name == "split") return SplitSpectral{param > 0 ? param : 1};
    if (name == "series") return SeriesTruncated{param > 0 ? param : 8};
    throw InvalidArgument("unknown rhs method: " + name);
}

py::dict check_dict(const SuiteCheck& c) {
    py::dict d;
    d["id"] = c.id;
    d["scenario"] = c.scenario;
    d["hypothesis_met"] = c.hypothesis_met;
    d["passed"] = c.passed ? py::object(py::bool_(*c.passed)) : py::object(py::none());
    d["worst"] = c.worst;
    d["detail"] = c.detail;
    return d;
}

}  // namespace

PYBIND11_MODULE(_muskat, m) {
    m.doc() = "Contour-equation solver for the nearly flat Muskat interface.";
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("c_alpha", &c_alpha, py::arg("alpha"));
    m.def("k0", &k0_of_alpha, py::arg("alpha"));
    m.def("mu", &mu_of, py::arg("alpha"), py::arg("f1_norm"));
    m.def("grad_threshold", &grad_threshold, py::arg("alpha"), py::arg("eps"));
    m.def("taylor_coeff", &taylor_coeff, py::arg("n"), py::arg("alpha"));
    m.def("r_alpha", &r_alpha, py::arg("z"), py::arg("alpha"));
    m.def("weighted_series", &weighted_series, py::arg("z"), py::arg("alpha"));
    m.def("hyp2f1", &hyp2f1, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("x"));
    m.def("pv_exp_integral", &pv_exp_integral, py::arg("s"), py::arg("alpha"));

    m.def(
        "rhs",
        [](const Array& f, double alpha, const std::string& method, int param, double lx, double ly) {
            const ScalarField field = to_field(f, lx, ly);
            ScalarField out;
            {
                py::gil_scoped_release release;
                out = evaluate_rhs(field, AlphaParams(alpha), method_of(method, param));
            }
            return to_array(out);
        },
        py::arg("f"), py::arg("alpha"), py::arg("method") = "split", py::arg("param") = 0,
        py::arg("lx") = 2.0 * std::numbers::pi, py::arg("ly") = 2.0 * std::numbers::pi,
        "Time derivative of f; param is cutoff_cells, quad_refinement or n_max (0 for the default).");

    m.def(
        "run",
        [](const std::string& config_json, std::optional<std::string> out, int threads) {
            const RunConfig cfg = config_from_json(nlohmann::json::parse(config_json));
            RunOptions o = cfg.options();
            o.threads = threads;
            if (out) o.out_root = *out;
            ScenarioResult r;
            {
                py::gil_scoped_release release;
                r = run_scenario(cfg.scenario, o);
            }
            py::dict d;
            d["t"] = r.final.t;
            d["steps"] = r.final.step_count;
            d["field"] = to_array(r.final.f);
            d["dir"] = r.dir.string();
            py::list checks;
            for (const auto& c : verify_run(r, cfg.verify)) checks.append(check_dict(c));
            d["checks"] = checks;
            return d;
        },
        py::arg("config_json"), py::arg("out") = py::none(), py::arg("threads") = 1,
        "Run a scenario from a JSON config string; writes a run directory when out is given.");

    m.def(
        "property_checks",
        [](std::optional<std::string> only) {
            VerifyOptions o;
            o.only = only;
            py::list l;
            for (const auto& c : property_checks(o)) l.append(check_dict(c));
            return l;
        },
        py::arg("only") = py::none());

    m.def(
        "read_snapshot",
        [](const std::string& path) {
            const Snapshot s = read_snapshot(path);
            py::dict d;
            d["field"] = to_array(s.field);
            d["t"] = s.t;
            d["alpha"] = s.alpha;
            d["lx"] = s.field.grid.lx;
            d["ly"] = s.field.grid.ly;
            return d;
        },
        py::arg("path"));

    m.def("default_config", [] { return to_json(RunConfig{}).dump(2); });
}
