// Python bindings at the document level: every operation takes the JSON
// text of the corresponding description document and returns plain Python
// structures, so scripts and the command line share one input format.

#include "tropmap/analytic.hpp"
#include "tropmap/cycles.hpp"
#include "tropmap/errors.hpp"
#include "tropmap/io.hpp"
#include "tropmap/satrop.hpp"
#include "tropmap/tropcoh.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

namespace py = pybind11;

namespace {

tropmap::Json parse_doc(const std::string& text) {
    try {
        return tropmap::Json::parse(text);
    } catch (const tropmap::Json::parse_error& e) {
        throw tropmap::parse_error(e.what());
    }
}

py::object to_py(const tropmap::Json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

} // namespace

PYBIND11_MODULE(_tropmap, m) {
    m.doc() = "computational toolkit for tropical limits of complex chains";

    py::register_exception<tropmap::parse_error>(m, "ParseError");
    py::register_exception<tropmap::invariant_error>(m, "InvariantError");
    py::register_exception<tropmap::numeric_error>(m, "NumericError");

    m.def("version", [] { return std::string(tropmap::toolkit_version); });

    m.def(
        "homology",
        [](const std::string& fan, std::size_t p) {
            auto f = tropmap::fan_from_json(parse_doc(fan));
            auto H = tropmap::homology(tropmap::build_complex(f, p));
            py::dict out;
            for (std::size_t q = 0; q < H.ranks.size(); ++q) {
                std::string key = "(" + std::to_string(p) + "," + std::to_string(q) + ")";
                out[py::str(key)] = H.ranks[q];
            }
            return out;
        },
        py::arg("fan"), py::arg("p"),
        "tropical homology ranks of a fan document, keyed by (p,q)");

    m.def(
        "kgroup",
        [](const std::string& fan, std::size_t p) {
            auto f = tropmap::fan_from_json(parse_doc(fan));
            auto [dim0, ann] = tropmap::tropical_K_F0(f, p);
            py::list basis;
            for (const auto& row : ann.basis) {
                py::list r;
                for (const auto& x : row) r.append(x.str());
                basis.append(r);
            }
            py::dict out;
            out["dim_F0"] = dim0;
            out["J0"] = basis;
            return out;
        },
        py::arg("fan"), py::arg("p"),
        "dimension of F^p at the origin and the annihilator basis J0");

    m.def(
        "trop_hypersurface",
        [](const std::string& poly) {
            auto cycle = tropmap::trop_hypersurface(tropmap::poly_from_json(parse_doc(poly)));
            return to_py(tropmap::cycle_to_json(cycle));
        },
        py::arg("poly"), "weighted tropicalization of a hypersurface, as a cycle document");

    m.def(
        "check_balanced",
        [](const std::string& cycle) {
            auto rep = tropmap::check_balanced(tropmap::cycle_from_json(parse_doc(cycle)));
            py::dict out;
            out["balanced"] = rep.balanced;
            out["violating_cone"] =
                rep.violating_cone ? py::cast(*rep.violating_cone) : py::none();
            return out;
        },
        py::arg("cycle"), "exact balancing check of a cycle document");

    m.def(
        "weighted_tropicalization",
        [](const std::string& chain, const std::string& fan, double tol) {
            auto V = tropmap::chain_from_json(parse_doc(chain));
            auto f = tropmap::fan_from_json(parse_doc(fan));
            tropmap::QuadratureCfg cfg;
            cfg.tol = tol;
            auto cls = tropmap::weighted_tropicalization(V, f, cfg);
            py::list cones;
            for (std::size_t i = 0; i < cls.fan.cones.size(); ++i) {
                py::list rays;
                for (const auto& r : cls.fan.cones[i].rays) {
                    py::list row;
                    for (const auto& x : r) row.append(x.convert_to<long long>());
                    rays.append(row);
                }
                py::list coeff;
                for (const auto& x : cls.coeff[i]) coeff.append(x.str());
                py::dict c;
                c["orbit"] = cls.fan.cones[i].orbit;
                c["rays"] = rays;
                c["coeff"] = coeff;
                cones.append(c);
            }
            py::dict out;
            out["degree"] = cls.degree;
            out["cones"] = cones;
            return out;
        },
        py::arg("chain"), py::arg("fan"), py::arg("tol") = 1e-8,
        "chain-class coefficients of a parametrized chain over a fan");

    m.def(
        "limit_integral",
        [](const std::string& chain, const std::string& form, double eps0, double ratio,
           std::size_t levels, double tol) {
            auto V = tropmap::chain_from_json(parse_doc(chain));
            auto w = tropmap::superform_from_json(parse_doc(form));
            tropmap::EpsSchedule sched;
            sched.eps0 = eps0;
            sched.ratio = ratio;
            sched.levels = levels;
            tropmap::QuadratureCfg cfg;
            cfg.tol = tol;
            auto r = tropmap::limit_integral(V, w, sched, cfg);
            py::list lv;
            for (const auto& l : r.level) {
                py::dict d;
                d["eps"] = l.eps;
                d["value"] = l.value;
                d["error"] = l.error;
                lv.append(d);
            }
            py::dict out;
            out["levels"] = lv;
            out["limit"] = r.value;
            out["slope"] = r.slope;
            return out;
        },
        py::arg("chain"), py::arg("form"), py::arg("eps0") = 0.2, py::arg("ratio") = 0.5,
        py::arg("levels") = 7, py::arg("tol") = 1e-8,
        "eps -> 0 limit of the pulled-back superform over a chain document");

    m.def(
        "eps_integral",
        [](const std::string& chain, const std::string& form, double eps, double tol) {
            auto V = tropmap::chain_from_json(parse_doc(chain));
            auto w = tropmap::superform_from_json(parse_doc(form));
            tropmap::QuadratureCfg cfg;
            cfg.tol = tol;
            auto est = tropmap::eps_integral(V, w, eps, cfg);
            return py::make_tuple(est.value, est.error);
        },
        py::arg("chain"), py::arg("form"), py::arg("eps"), py::arg("tol") = 1e-8,
        "integral of the pullback at one eps, as (value, error)");

    m.def(
        "log_integral",
        [](const std::string& chain, const std::string& monomials, double tol) {
            auto V = tropmap::chain_from_json(parse_doc(chain));
            auto ms = tropmap::monomials_from_json(parse_doc(monomials));
            tropmap::QuadratureCfg cfg;
            cfg.tol = tol;
            auto est = tropmap::log_integral(V, ms, cfg);
            return py::make_tuple(est.value, est.error);
        },
        py::arg("chain"), py::arg("monomials"), py::arg("tol") = 1e-8,
        "logarithmic period integral, as (value, error)");

    m.def(
        "log_limit_sample",
        [](const std::string& set, const std::vector<double>& radii, std::size_t samples,
           unsigned seed, double tol) {
            auto S = tropmap::set_from_json(parse_doc(set));
            auto cloud = tropmap::log_limit_sample(S, radii, samples, seed, tol);
            py::list clusters;
            for (std::size_t i = 0; i < cloud.dir.size(); ++i) {
                py::dict c;
                c["dir"] = cloud.dir[i];
                c["weight"] = cloud.weight[i];
                clusters.append(c);
            }
            py::dict out;
            out["clusters"] = clusters;
            out["cluster_tol"] = cloud.tol;
            return out;
        },
        py::arg("set"), py::arg("radii"), py::arg("samples") = 40, py::arg("seed") = 1,
        py::arg("tol") = 0.05, "sampled deep-direction clusters of a semialgebraic set");

    m.def(
        "in_exp_cone",
        [](const std::vector<double>& point, const std::vector<double>& N, double h) {
            tropmap::ExpBasicCone cone{point.size(), N, h};
            return tropmap::in_exp_cone(point, cone);
        },
        py::arg("point"), py::arg("N"), py::arg("h") = 0.5,
        "membership in the exponential basic cone E_{r,N,h}");
}
