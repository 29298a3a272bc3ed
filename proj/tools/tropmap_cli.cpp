// Command line front end: loads description documents, dispatches one
// verb, and prints a deterministic JSON report to stdout. Wall-clock
// timing goes to stderr so identical inputs give byte-identical reports.
// Exit codes: 0 success, 1 parse error, 2 invariant violation (named in
// the message), 3 numeric non-convergence.

#include "tropmap/analytic.hpp"
#include "tropmap/cycles.hpp"
#include "tropmap/errors.hpp"
#include "tropmap/io.hpp"
#include "tropmap/satrop.hpp"
#include "tropmap/tropcoh.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

using tropmap::Json;

struct Loaded {
    std::string path;
    std::string digest;
    Json doc;
};

Loaded load(const std::string& path) {
    std::string bytes = tropmap::read_file(path);
    Loaded l;
    l.path = path;
    l.digest = tropmap::fnv1a_hex(bytes);
    try {
        l.doc = Json::parse(bytes);
    } catch (const Json::parse_error& e) {
        throw tropmap::parse_error(path + ": " + e.what());
    }
    return l;
}

void emit(const std::string& verb, const std::vector<std::pair<std::string, Loaded>>& inputs,
          Json payload, const std::string& out_path) {
    Json report;
    report["verb"] = verb;
    report["version"] = tropmap::toolkit_version;
    Json in = Json::object();
    for (const auto& [role, l] : inputs) {
        Json d;
        d["path"] = l.path;
        d["digest"] = l.digest;
        in[role] = std::move(d);
    }
    report["inputs"] = std::move(in);
    report["payload"] = std::move(payload);
    std::string text = report.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw tropmap::parse_error("cannot write report: " + out_path);
        out << text;
    }
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string sweep_csv(const tropmap::LimitResult& r) {
    std::string csv = "eps,value_re,value_im,error\n";
    for (const auto& lv : r.level)
        csv += fmt17(lv.eps) + "," + fmt17(lv.value.real()) + "," +
               fmt17(lv.value.imag()) + "," + fmt17(lv.error) + "\n";
    csv += "limit," + fmt17(r.value.real()) + "," + fmt17(r.value.imag()) + "," +
           fmt17(r.slope) + "\n";
    return csv;
}

std::string rank_key(std::size_t p, std::size_t q) {
    return "(" + std::to_string(p) + "," + std::to_string(q) + ")";
}

Json rat_vec(const tropmap::RatVec& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(tropmap::rat_to_json(x));
    return a;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tropical geometry toolkit"};
    app.require_subcommand(1);

    int threads = 1;
    app.add_option("--threads", threads,
                   "worker thread cap (reserved; evaluation runs on one thread)")
        ->envname("TROPMAP_THREADS")
        ->check(CLI::PositiveNumber);
    std::string out_path;
    app.add_option("--out", out_path, "write the report here instead of stdout");

    std::string fan_path, cycle_path, poly_path, chain_path, form_path,
        monomials_path, set_path, csv_path;
    std::size_t degree = 0;
    long long q_filter = -1;
    double eps0 = 0.2, ratio = 0.5, tol = 1e-8, h = 0.5, cluster_tol = 0.05;
    std::size_t levels = 7, samples = 40;
    unsigned seed = 1;
    std::vector<double> radii, point, cusp_N;

    auto* homology = app.add_subcommand("homology", "tropical homology ranks of a fan");
    homology->add_option("--fan", fan_path, "fan document")->required();
    homology->add_option("--p", degree, "coefficient degree p")->required();
    homology->add_option("--q", q_filter, "restrict the table to one q");

    auto* kgroup = app.add_subcommand("kgroup", "degree-p K-group data at the origin");
    kgroup->add_option("--fan", fan_path, "fan document")->required();
    kgroup->add_option("--p", degree, "coefficient degree p")->required();

    auto* trophyp = app.add_subcommand("trophyp", "tropicalization of a hypersurface");
    trophyp->add_option("--poly", poly_path, "polynomial document")->required();

    auto* balance = app.add_subcommand("balance", "balancing check of a weighted cycle");
    balance->add_option("--cycle", cycle_path, "cycle document")->required();

    auto* wttrop = app.add_subcommand("wttrop", "weighted tropicalization of a chain");
    wttrop->add_option("--chain", chain_path, "chain document")->required();
    wttrop->add_option("--fan", fan_path, "fan document")->required();
    wttrop->add_option("--tol", tol, "quadrature tolerance");

    auto* limit = app.add_subcommand("limit", "eps -> 0 limit of the pulled-back form");
    limit->add_option("--chain", chain_path, "chain document")->required();
    limit->add_option("--form", form_path, "superform document")->required();
    limit->add_option("--eps0", eps0, "initial eps");
    limit->add_option("--ratio", ratio, "eps ratio per level");
    limit->add_option("--levels", levels, "number of levels");
    limit->add_option("--tol", tol, "quadrature tolerance");
    limit->add_option("--csv", csv_path, "write the (eps, value, error) sweep here");

    auto* logint = app.add_subcommand("logint", "logarithmic period integral");
    logint->add_option("--chain", chain_path, "chain document")->required();
    logint->add_option("--monomials", monomials_path, "monomial list document")->required();
    logint->add_option("--tol", tol, "quadrature tolerance");

    auto* loglimit = app.add_subcommand("loglimit", "sampled logarithmic limit directions");
    loglimit->add_option("--set", set_path, "semialgebraic set document")->required();
    loglimit->add_option("--radii", radii, "decreasing depth radii")
        ->required()
        ->delimiter(',');
    loglimit->add_option("--samples", samples, "accepted samples per radius");
    loglimit->add_option("--seed", seed, "sampling seed");
    loglimit->add_option("--tol", cluster_tol, "angular clustering tolerance");

    auto* expcone = app.add_subcommand("expcone", "exponential basic cone membership");
    expcone->set_help_flag("--help", "print help"); // frees -h for the box height
    expcone->add_option("--point", point, "candidate point")->required()->delimiter(',');
    expcone->add_option("--N", cusp_N, "cusp exponents")->required()->delimiter(',');
    expcone->add_option("--h", h, "box height");

    // let --out and --threads appear after the verb as well as before it
    for (auto* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    auto t0 = std::chrono::steady_clock::now();
    std::string verb;
    try {
        if (homology->parsed()) {
            verb = "homology";
            Loaded f = load(fan_path);
            auto fan = tropmap::fan_from_json(f.doc);
            auto result = tropmap::homology(tropmap::build_complex(fan, degree));
            Json ranks = Json::object();
            for (std::size_t q = 0; q < result.ranks.size(); ++q)
                if (q_filter < 0 || static_cast<std::size_t>(q_filter) == q)
                    ranks[rank_key(degree, q)] = result.ranks[q];
            if (q_filter >= 0 && static_cast<std::size_t>(q_filter) >= result.ranks.size())
                ranks[rank_key(degree, static_cast<std::size_t>(q_filter))] = 0;
            emit(verb, {{"fan", f}}, Json{{"ranks", ranks}}, out_path);
        } else if (kgroup->parsed()) {
            verb = "kgroup";
            Loaded f = load(fan_path);
            auto fan = tropmap::fan_from_json(f.doc);
            auto [dim0, ann] = tropmap::tropical_K_F0(fan, degree);
            Json j0 = Json::array();
            for (const auto& row : ann.basis) j0.push_back(rat_vec(row));
            emit(verb, {{"fan", f}}, Json{{"dim_F0", dim0}, {"J0", j0}}, out_path);
        } else if (trophyp->parsed()) {
            verb = "trophyp";
            Loaded f = load(poly_path);
            auto cycle = tropmap::trop_hypersurface(tropmap::poly_from_json(f.doc));
            emit(verb, {{"poly", f}}, Json{{"cycle", tropmap::cycle_to_json(cycle)}},
                 out_path);
        } else if (balance->parsed()) {
            verb = "balance";
            Loaded f = load(cycle_path);
            auto report = tropmap::check_balanced(tropmap::cycle_from_json(f.doc));
            Json payload;
            payload["balanced"] = report.balanced;
            payload["violating_cone"] =
                report.violating_cone ? Json(*report.violating_cone) : Json(nullptr);
            emit(verb, {{"cycle", f}}, payload, out_path);
        } else if (wttrop->parsed()) {
            verb = "wttrop";
            Loaded jc = load(chain_path);
            Loaded jf = load(fan_path);
            auto chain = tropmap::chain_from_json(jc.doc);
            auto fan = tropmap::fan_from_json(jf.doc);
            tropmap::QuadratureCfg cfg;
            cfg.tol = tol;
            auto cls = tropmap::weighted_tropicalization(chain, fan, cfg);
            Json cones = Json::array();
            for (std::size_t i = 0; i < cls.fan.cones.size(); ++i) {
                Json o;
                o["orbit"] = cls.fan.cones[i].orbit;
                Json rr = Json::array();
                for (const auto& r : cls.fan.cones[i].rays) {
                    Json row = Json::array();
                    for (const auto& x : r) row.push_back(x.convert_to<long long>());
                    rr.push_back(std::move(row));
                }
                o["rays"] = std::move(rr);
                o["coeff"] = rat_vec(cls.coeff[i]);
                cones.push_back(std::move(o));
            }
            emit(verb, {{"chain", jc}, {"fan", jf}},
                 Json{{"degree", cls.degree}, {"cones", cones}}, out_path);
        } else if (limit->parsed()) {
            verb = "limit";
            Loaded jc = load(chain_path);
            Loaded jf = load(form_path);
            auto chain = tropmap::chain_from_json(jc.doc);
            auto form = tropmap::superform_from_json(jf.doc);
            tropmap::EpsSchedule sched;
            sched.eps0 = eps0;
            sched.ratio = ratio;
            sched.levels = levels;
            tropmap::QuadratureCfg cfg;
            cfg.tol = tol;
            auto r = tropmap::limit_integral(chain, form, sched, cfg);
            Json lv = Json::array();
            for (const auto& l : r.level)
                lv.push_back(Json{{"eps", l.eps},
                                  {"value_re", l.value.real()},
                                  {"value_im", l.value.imag()},
                                  {"error", l.error}});
            Json payload{{"levels", lv},
                         {"limit_re", r.value.real()},
                         {"limit_im", r.value.imag()},
                         {"slope", r.slope}};
            if (!csv_path.empty()) {
                std::ofstream out(csv_path, std::ios::binary);
                if (!out) throw tropmap::parse_error("cannot write csv: " + csv_path);
                out << sweep_csv(r);
                payload["csv"] = csv_path;
            }
            emit(verb, {{"chain", jc}, {"form", jf}}, payload, out_path);
        } else if (logint->parsed()) {
            verb = "logint";
            Loaded jc = load(chain_path);
            Loaded jm = load(monomials_path);
            auto chain = tropmap::chain_from_json(jc.doc);
            auto ms = tropmap::monomials_from_json(jm.doc);
            tropmap::QuadratureCfg cfg;
            cfg.tol = tol;
            auto est = tropmap::log_integral(chain, ms, cfg);
            emit(verb, {{"chain", jc}, {"monomials", jm}},
                 Json{{"value_re", est.value.real()},
                      {"value_im", est.value.imag()},
                      {"error", est.error}},
                 out_path);
        } else if (loglimit->parsed()) {
            verb = "loglimit";
            Loaded js = load(set_path);
            auto S = tropmap::set_from_json(js.doc);
            auto cloud = tropmap::log_limit_sample(S, radii, samples, seed, cluster_tol);
            Json clusters = Json::array();
            for (std::size_t i = 0; i < cloud.dir.size(); ++i)
                clusters.push_back(Json{{"dir", cloud.dir[i]}, {"weight", cloud.weight[i]}});
            emit(verb, {{"set", js}},
                 Json{{"clusters", clusters}, {"cluster_tol", cloud.tol}}, out_path);
        } else if (expcone->parsed()) {
            verb = "expcone";
            tropmap::ExpBasicCone cone{point.size(), cusp_N, h};
            emit(verb, {}, Json{{"inside", tropmap::in_exp_cone(point, cone)}}, out_path);
        }
    } catch (const tropmap::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const tropmap::invariant_error& e) {
        std::cerr << "invariant violation [" << e.name << "]: " << e.what() << "\n";
        return 2;
    } catch (const tropmap::numeric_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    std::cerr << verb << " completed in " << ms << " ms\n";
    return 0;
}
