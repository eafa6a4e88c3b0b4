// Python bindings. Reports come back as dicts in the same JSON shape the
// crc CLI prints with --no-timing.
#include "crc/dga.hpp"
#include "crc/model.hpp"
#include "crc/tube.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace crc;

namespace {

py::object to_py(const Report& r, bool timing)
{
    return py::module_::import("json").attr("loads")(r.to_json(timing).dump());
}

// `vars` maps a name to real, imaginary, unit_modulus, positive_real or
// complex:PARTNER. Names not listed are real.
VariableTable table_for(const std::string& text, const std::map<std::string, std::string>& vars)
{
    VariableTable t;
    for (auto& [name, kind] : vars) {
        if (kind.rfind("complex:", 0) == 0)
            t.declare_pair(name, kind.substr(8));
        else if (kind == "real")
            t.declare(name, Reality::real);
        else if (kind == "imaginary")
            t.declare(name, Reality::imaginary);
        else if (kind == "unit_modulus")
            t.declare(name, Reality::unit_modulus);
        else if (kind == "positive_real")
            t.declare(name, Reality::positive_real);
        else
            throw py::value_error("unknown variable kind '" + kind + "' for " + name);
    }
    return declare_free_as_real(text, std::move(t));
}

TubeOptions tube_options(uint64_t seed, int trials, double tol)
{
    TubeOptions o;
    o.seed = seed;
    if (trials > 0) o.trials = trials;
    if (tol > 0) o.tol = tol;
    return o;
}

using Vars = std::map<std::string, std::string>;

}  // namespace

PYBIND11_MODULE(crcpy, m)
{
    m.doc() = "Symbolic exterior calculus checks for 2-nondegenerate CR structures";
    m.attr("__version__") = kToolVersion;
    m.attr("SCHEMA_VERSION") = kSchemaVersion;

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<UndeclaredIdentifier>(m, "UndeclaredIdentifier", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<RealityError>(m, "RealityError", base.ptr());
    py::register_exception<HypothesisError>(m, "HypothesisError", base.ptr());

    m.def(
        "canonical", [](const std::string& text, const Vars& vars) { return parse(text, table_for(text, vars)).str(); },
        py::arg("expression"), py::arg("vars") = Vars{}, "Canonical form of a scalar expression.");
    m.def(
        "diff",
        [](const std::string& text, const std::string& wrt, const Vars& vars) {
            VariableTable t = table_for(text, vars);
            Variable v = t.find(wrt);
            if (!v) throw py::value_error("variable '" + wrt + "' does not occur in the expression");
            return differentiate(parse(text, t), v).str();
        },
        py::arg("expression"), py::arg("wrt"), py::arg("vars") = Vars{});
    m.def(
        "conjugate", [](const std::string& text, const Vars& vars) { return conjugate(parse(text, table_for(text, vars))).str(); },
        py::arg("expression"), py::arg("vars") = Vars{});
    m.def(
        "evaluate",
        [](const std::string& text, const Point& at, const Vars& vars) { return evaluate(parse(text, table_for(text, vars)), at); },
        py::arg("expression"), py::arg("at"), py::arg("vars") = Vars{});
    m.def(
        "zero_test",
        [](const std::string& text, const std::string& box, const Vars& vars, uint64_t seed, int trials, double tol) {
            ZeroTestOptions o;
            o.seed = seed;
            if (trials > 0) o.trials = trials;
            if (tol > 0) o.tol = tol;
            ZeroTest z = zero_test(parse(text, table_for(text, vars)), parse_box(box), o);
            py::dict d;
            d["verdict"] = to_string(z.verdict);
            d["exact"] = z.exact;
            d["samples"] = z.samples;
            d["failures"] = z.failures;
            d["max_residual"] = z.max_residual;
            return d;
        },
        py::arg("expression"), py::arg("box"), py::arg("vars") = Vars{}, py::arg("seed") = 0, py::arg("trials") = 0,
        py::arg("tol") = 0.0, "Randomized zero test; trials and tol of 0 select the defaults.");

    m.def(
        "model_verify",
        [](bool timing) {
            Report r;
            r.merge(verify_structure_equations(), "structure: ");
            r.merge(verify_adjoint_transforms(), "adjoint: ");
            r.command = "model verify";
            return to_py(r, timing);
        },
        py::arg("timing") = false);
    m.def(
        "dga_verify",
        [](const std::string& suite, bool timing) {
            Report r = run_dga_suite(suite);
            r.command = "dga verify --suite " + suite;
            return to_py(r, timing);
        },
        py::arg("suite") = "shifts", py::arg("timing") = false);
    m.def(
        "tube_analyze",
        [](const std::string& rho, const std::string& box, uint64_t seed, int trials, double tol, bool timing) {
            Report r = analyze_tube(rho, parse_box(box), tube_options(seed, trials, tol));
            r.command = "tube analyze";
            return to_py(r, timing);
        },
        py::arg("rho"), py::arg("box") = "t1=0.02:0.08,t2=0.02:0.08", py::arg("seed") = 0, py::arg("trials") = 0,
        py::arg("tol") = 0.0, py::arg("timing") = false);
    m.def(
        "tube_paper_example",
        [](uint64_t seed, bool timing) {
            Report r = paper_example_report(tube_options(seed, 0, 0));
            r.command = "tube paper-example";
            return to_py(r, timing);
        },
        py::arg("seed") = 0, py::arg("timing") = false);
    m.def(
        "tube_profile",
        [](const std::string& g, const std::string& box, uint64_t seed, bool timing) {
            Report r = profile_report(g, parse_box(box), tube_options(seed, 0, 0));
            r.command = "tube profile";
            return to_py(r, timing);
        },
        py::arg("g"), py::arg("box") = "t1=0.5:1,t2=0.5:1", py::arg("seed") = 0, py::arg("timing") = false);
}
