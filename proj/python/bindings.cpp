#include "islab/config.hpp"
#include "islab/island.hpp"
#include "islab/lyapunov.hpp"
#include "islab/rescaling.hpp"
#include "islab/suites.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace py = pybind11;
using namespace islab;

namespace {

using Point = std::pair<double, double>;

Vec2 vec(Point p) { return {p.first, p.second}; }
Point pt(Vec2 v) { return {v.x, v.y}; }
std::array<double, 4> mat(const Mat2& m) { return {m.a11, m.a12, m.a21, m.a22}; }

MapDescriptor named_map(const std::string& name, double a) {
    if (name == "anosov") return anosov_map();
    if (name == "chirikov") return chirikov_map(a);
    if (name == "island") return IslandMap().descriptor();
    if (name == "rotation") return quarter_rotation();
    throw py::value_error("unknown map '" + name + "' (anosov, chirikov, island, rotation)");
}

ExperimentConfig config_from_text(const std::string& text) {
    ExperimentConfig cfg;
    const auto problems = resolve_config(parse_config_text(text), &cfg);
    if (!problems.empty()) {
        std::string msg;
        for (const auto& p : problems) msg += (msg.empty() ? "" : "\n") + p;
        throw py::value_error(msg);
    }
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_islab, m) {
    m.doc() = "Blown-up Anosov maps, Lyapunov diagnostics and rescaling checks";

    m.def("anosov_sigma", &anosov_sigma, "ln(9 + 4 sqrt 5)");

    m.def(
        "max_lyapunov",
        [](const std::string& map, Point p, int n, double a) { return max_lyapunov(named_map(map, a), vec(p), n).lambda; },
        py::arg("map"), py::arg("point"), py::arg("n"), py::arg("a") = 1.0,
        "Finite-time maximal Lyapunov exponent of a built-in map at a point.");

    m.def(
        "symplectic_defect",
        [](const std::string& map, Point p, double a) { return named_map(map, a).area_defect(vec(p)); },
        py::arg("map"), py::arg("point"), py::arg("a") = 1.0,
        "Area defect |J(f p) det Df(p) / J(p) - 1| with the map's invariant density.");

    m.def(
        "cone_certificate",
        [](const std::string& map, Point p, int n) {
            const ConeCertificate c = cone_certificate(named_map(map, 1.0), vec(p), n);
            return std::make_pair(c.holds, c.failed_step);
        },
        py::arg("map"), py::arg("point"), py::arg("n"), "Returns (holds, failed_step).");

    py::class_<IslandMap>(m, "IslandMap")
        .def(py::init([](double delta, double epsilon, int flow_steps) {
                 const SurgeryProfile s = SurgeryProfile::make(delta, epsilon);
                 if (auto v = s.violation(); !v.empty()) throw py::value_error(v);
                 return IslandMap(s, flow_steps);
             }),
             py::arg("delta") = 0.15, py::arg("epsilon") = 0.24, py::arg("flow_steps") = 256)
        .def("__call__", [](const IslandMap& f, Point p) { return pt(f.eval(vec(p))); })
        .def("inverse", [](const IslandMap& f, Point q) { return pt(f.inverse(vec(q))); })
        .def("jacobian", [](const IslandMap& f, Point p) { return mat(f.jacobian(vec(p))); },
             "Row-major (a11, a12, a21, a22).")
        .def("density", [](const IslandMap& f, Point p) { return f.density(vec(p)); })
        .def("in_hole", [](const IslandMap& f, Point p) { return f.in_hole(vec(p)); })
        .def("centers", [](const IslandMap& f) {
            std::vector<Point> c;
            for (Vec2 v : f.centers()) c.push_back(pt(v));
            return c;
        })
        .def(
            "saddles",
            [](const IslandMap& f, int i) {
                if (i < 0 || i > 3) throw py::index_error("center index must be 0..3");
                std::vector<py::dict> out;
                for (const auto& s : link_saddles(f, i)) {
                    py::dict d;
                    d["point"] = pt(s.data.point);
                    d["theta"] = s.theta;
                    d["lambda_u"] = s.data.lambda_u;
                    d["lambda_s"] = s.data.lambda_s;
                    out.push_back(d);
                }
                return out;
            },
            py::arg("center"));

    m.def(
        "rescaling_error",
        [](const std::string& preset, int k, int grid) {
            if (preset != "affine" && preset != "nonlinear") throw py::value_error("preset must be affine or nonlinear");
            return verify_rescaling(preset == "affine" ? RescalingConfig::affine() : RescalingConfig::nonlinear(), k, grid).error;
        },
        py::arg("preset"), py::arg("k"), py::arg("grid") = 21,
        "Sup distance between the renormalized return map and the Henon-like product.");

    m.def(
        "validate_config",
        [](const std::string& text) {
            try {
                return resolve_config(parse_config_text(text), nullptr);
            } catch (const ConfigError& e) {
                return e.problems();
            }
        },
        py::arg("text"), "Problems found in a config text; empty when valid.");

    m.def(
        "run_suite_json",
        [](const std::string& text, const std::string& out, std::optional<std::uint64_t> seed, std::optional<int> threads) {
            ExperimentConfig cfg;
            try {
                cfg = config_from_text(text);
            } catch (const ConfigError& e) {
                throw py::value_error(e.what());
            }
            if (seed) cfg.set_seed(*seed);
            if (threads) cfg.set_threads(*threads);
            cfg.set_output(out);
            RunReport rep;
            {
                py::gil_scoped_release release;
                rep = run_suite(cfg);
            }
            return rep.to_json().dump();
        },
        py::arg("text"), py::arg("out"), py::arg("seed") = py::none(), py::arg("threads") = py::none(),
        "Runs a suite from config text, writes artifacts to `out`, returns report.json as a string.");
}
