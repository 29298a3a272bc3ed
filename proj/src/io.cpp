#include "tropmap/io.hpp"

#include "tropmap/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace tropmap {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw parse_error(msg);
}

std::size_t uint_from(const Json& j, const std::string& what) {
    require(j.is_number_integer() && j.template get<long long>() >= 0,
            what + " must be a non-negative integer");
    return static_cast<std::size_t>(j.template get<long long>());
}

long long int_from(const Json& j, const std::string& what) {
    require(j.is_number_integer(), what + " must be an integer");
    return j.template get<long long>();
}

double num_from(const Json& j, const std::string& what) {
    require(j.is_number(), what + " must be a number");
    return j.template get<double>();
}

IntVec ivec_from(const Json& j, const std::string& what) {
    require(j.is_array(), what + " must be an array of integers");
    IntVec v;
    for (const auto& e : j) v.push_back(Int(int_from(e, what + " entry")));
    return v;
}

Json ivec_to(const IntVec& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(x.template convert_to<long long>());
    return a;
}

AmbientFan ambient_from(const Json& j, std::size_t rank) {
    if (!j.contains("ambient")) return AmbientFan::trivial(rank);
    const Json& a = j.at("ambient");
    require(a.is_object(), "ambient must be an object");
    if (a.contains("rank"))
        require(uint_from(a.at("rank"), "ambient rank") == rank,
                "ambient rank must equal lattice_rank");
    std::vector<IntVec> rays;
    for (const auto& e : a.value("rays", Json::array()))
        rays.push_back(ivec_from(e, "ambient ray"));
    std::vector<std::vector<std::size_t>> cones;
    require(a.contains("cones"), "ambient must list cones");
    for (const auto& e : a.at("cones")) {
        require(e.is_array(), "ambient cone must be a ray index list");
        std::vector<std::size_t> idx;
        for (const auto& k : e) {
            std::size_t i = uint_from(k, "ambient ray index");
            require(i < rays.size(), "ambient ray index out of range");
            idx.push_back(i);
        }
        cones.push_back(std::move(idx));
    }
    return AmbientFan::make(rank, std::move(rays), std::move(cones));
}

std::vector<Cone> cones_from(const Json& j, const AmbientFan& amb,
                             const std::vector<IntVec>& table) {
    require(j.contains("cones"), "document must list cones");
    std::vector<Cone> out;
    for (const auto& e : j.at("cones")) {
        if (e.is_array()) {
            std::vector<IntVec> gens;
            for (const auto& k : e) {
                std::size_t i = uint_from(k, "ray index");
                require(i < table.size(), "ray index out of range");
                gens.push_back(table[i]);
            }
            out.push_back(Cone::make(0, amb.chart_dim(0), gens));
        } else if (e.is_object()) {
            std::size_t orbit = uint_from(e.at("orbit"), "cone orbit");
            require(orbit < amb.cones.size(), "cone orbit out of range");
            std::size_t cd = amb.chart_dim(orbit);
            std::vector<IntVec> gens;
            for (const auto& k : e.at("rays")) {
                IntVec r = ivec_from(k, "chart ray");
                require(r.size() == cd, "chart ray has wrong dimension");
                gens.push_back(std::move(r));
            }
            out.push_back(Cone::make(orbit, cd, gens));
        } else {
            throw parse_error("cone must be a ray index list or an object");
        }
    }
    return out;
}

bool ambient_is_trivial(const AmbientFan& a) {
    return a.rays.empty() && a.cones.size() == 1 && a.cones[0].empty();
}

std::pair<std::vector<IntVec>, Json> fan_body_to_json(const Fan& f) {
    Json j;
    j["lattice_rank"] = f.ambient.rank;
    std::vector<IntVec> table;
    for (const auto& c : f.cones)
        if (c.orbit == 0)
            for (const auto& r : c.rays)
                if (std::find(table.begin(), table.end(), r) == table.end())
                    table.push_back(r);
    std::sort(table.begin(), table.end());
    Json rays = Json::array();
    for (const auto& r : table) rays.push_back(ivec_to(r));
    j["rays"] = std::move(rays);
    Json cones = Json::array();
    for (const auto& c : f.cones) {
        if (c.orbit == 0) {
            Json idx = Json::array();
            for (const auto& r : c.rays) {
                auto it = std::lower_bound(table.begin(), table.end(), r);
                idx.push_back(static_cast<std::size_t>(it - table.begin()));
            }
            cones.push_back(std::move(idx));
        } else {
            Json o;
            o["orbit"] = c.orbit;
            Json rr = Json::array();
            for (const auto& r : c.rays) rr.push_back(ivec_to(r));
            o["rays"] = std::move(rr);
            cones.push_back(std::move(o));
        }
    }
    j["cones"] = std::move(cones);
    if (!ambient_is_trivial(f.ambient)) {
        Json a;
        a["rank"] = f.ambient.rank;
        Json ar = Json::array();
        for (const auto& r : f.ambient.rays) ar.push_back(ivec_to(r));
        a["rays"] = std::move(ar);
        Json ac = Json::array();
        for (const auto& c : f.ambient.cones) ac.push_back(c);
        a["cones"] = std::move(ac);
        j["ambient"] = std::move(a);
    }
    return {std::move(table), std::move(j)};
}

Expr expr_from(const Json& e, const std::map<std::string, std::size_t>& params) {
    if (e.is_number()) return expr_const(Cpx(e.template get<double>(), 0));
    if (e.is_string()) {
        std::string s = e.template get<std::string>();
        if (s == "i") return expr_const(Cpx(0, 1));
        auto it = params.find(s);
        require(it != params.end(), "unknown parameter name: " + s);
        return expr_param(it->second);
    }
    require(e.is_array() && !e.empty() && e[0].is_string(),
            "expression must be a number, a name, or [op, ...]");
    std::string op = e[0].template get<std::string>();
    auto arity = [&](std::size_t n) {
        require(e.size() == n + 1, "operator " + op + " takes " +
                                       std::to_string(n) + " arguments");
    };
    if (op == "complex") {
        arity(2);
        return expr_const(Cpx(num_from(e[1], "complex real part"),
                              num_from(e[2], "complex imaginary part")));
    }
    if (op == "exp" || op == "log") {
        arity(1);
        Expr a = expr_from(e[1], params);
        return op == "exp" ? expr_exp(a) : expr_log(a);
    }
    arity(2);
    Expr a = expr_from(e[1], params);
    Expr b = expr_from(e[2], params);
    if (op == "add") return expr_add(a, b);
    if (op == "sub") return expr_sub(a, b);
    if (op == "mul") return expr_mul(a, b);
    if (op == "div") return expr_div(a, b);
    if (op == "polar") return expr_polar(a, b);
    throw parse_error("unknown expression operator: " + op);
}

ChainChart chart_from(const Json& jc, std::size_t torus_dim);

ProductStructure structure_from(const Json& js, std::size_t torus_dim) {
    require(js.is_object(), "product structure must be an object");
    ProductStructure s;
    s.ray = ivec_from(js.at("ray"), "structure ray");
    s.approach_axis = uint_from(js.at("approach_axis"), "approach_axis");
    require(js.at("at_max_end").is_boolean(), "at_max_end must be a boolean");
    s.at_max_end = js.at("at_max_end").template get<bool>();
    s.circle_axis = uint_from(js.at("circle_axis"), "circle_axis");
    s.divisor_coord = uint_from(js.at("divisor_coord"), "divisor_coord");
    for (const auto& b : js.value("boundary", Json::array()))
        s.boundary.push_back(chart_from(b, torus_dim > 0 ? torus_dim - 1 : 0));
    return s;
}

ChainChart chart_from(const Json& jc, std::size_t torus_dim) {
    require(jc.is_object(), "chart must be an object");
    ChainChart c;
    std::map<std::string, std::size_t> params;
    const Json& jp = jc.value("params", Json::array());
    require(jp.is_array(), "params must be an array of names");
    for (std::size_t k = 0; k < jp.size(); ++k) {
        require(jp[k].is_string(), "parameter names must be strings");
        std::string name = jp[k].template get<std::string>();
        require(name != "i", "parameter name i is reserved");
        require(params.emplace(name, k).second, "duplicate parameter: " + name);
    }
    const Json& jb = jc.value("box", Json::array());
    require(jb.is_array() && jb.size() == jp.size(),
            "box must list one [lo, hi] range per parameter");
    for (const auto& r : jb) {
        require(r.is_array() && r.size() == 2, "box range must be [lo, hi]");
        c.box.push_back({num_from(r[0], "box lo"), num_from(r[1], "box hi")});
    }
    for (const auto& e : jc.value("coords", Json::array()))
        c.coords.push_back(expr_from(e, params));
    if (jc.contains("orientation"))
        c.orientation = static_cast<int>(int_from(jc.at("orientation"), "orientation"));
    if (jc.contains("multiplicity")) c.multiplicity = rat_from_json(jc.at("multiplicity"));
    if (jc.contains("log_abs")) {
        const Json& jl = jc.at("log_abs");
        require(jl.is_array(), "log_abs must be an array");
        for (const auto& e : jl) {
            if (e.is_null()) {
                c.log_abs.push_back(std::nullopt);
                continue;
            }
            require(e.is_object() && e.contains("row"), "log_abs entry needs a row");
            LogAffine la;
            for (const auto& x : e.at("row")) la.row.push_back(num_from(x, "log row"));
            la.offset = num_from(e.value("offset", Json(0.0)), "log offset");
            c.log_abs.push_back(std::move(la));
        }
    } else {
        c.log_abs.assign(torus_dim, std::nullopt);
    }
    for (const auto& e : jc.value("structures", Json::array()))
        c.structures.push_back(structure_from(e, torus_dim));
    return c;
}

} // namespace

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex;
    for (int k = 15; k >= 0; --k) os << ((h >> (4 * k)) & 0xf);
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot read file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Json load_json_file(const std::string& path) {
    std::string text = read_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

Rat rat_from_json(const Json& j) {
    if (j.is_number_integer()) return Rat(j.template get<long long>());
    if (j.is_string()) {
        try {
            return Rat(j.template get<std::string>());
        } catch (const std::exception&) {
            throw parse_error("malformed rational: " + j.template get<std::string>());
        }
    }
    throw parse_error("rational values must be integers or \"p/q\" strings");
}

Json rat_to_json(const Rat& r) { return Json(r.str()); }

Fan fan_from_json(const Json& j) {
    require(j.is_object(), "fan document must be an object");
    std::size_t rank = uint_from(j.at("lattice_rank"), "lattice_rank");
    std::vector<IntVec> table;
    for (const auto& e : j.value("rays", Json::array())) {
        IntVec r = ivec_from(e, "ray");
        require(r.size() == rank, "ray has wrong dimension");
        table.push_back(std::move(r));
    }
    AmbientFan amb = ambient_from(j, rank);
    return Fan::build(amb, cones_from(j, amb, table));
}

Json fan_to_json(const Fan& f) { return fan_body_to_json(f).second; }

WeightedCycle cycle_from_json(const Json& j) {
    require(j.is_object(), "cycle document must be an object");
    std::size_t rank = uint_from(j.at("lattice_rank"), "lattice_rank");
    std::vector<IntVec> table;
    for (const auto& e : j.value("rays", Json::array())) {
        IntVec r = ivec_from(e, "ray");
        require(r.size() == rank, "ray has wrong dimension");
        table.push_back(std::move(r));
    }
    AmbientFan amb = ambient_from(j, rank);
    std::vector<Cone> doc_cones = cones_from(j, amb, table);
    WeightedCycle c;
    c.fan = Fan::build(amb, doc_cones);
    c.dim = uint_from(j.at("dim"), "dim");
    const Json& jw = j.at("weights");
    require(jw.is_array() && jw.size() == doc_cones.size(),
            "weights must list one rational per cone");
    c.weights.assign(c.fan.cones.size(), Rat(0));
    for (std::size_t i = 0; i < doc_cones.size(); ++i) {
        auto idx = c.fan.find(doc_cones[i]);
        require(idx.has_value(), "cone lookup failed");
        c.weights[*idx] = rat_from_json(jw[i]);
    }
    if (j.contains("orientations")) {
        for (const auto& e : j.at("orientations")) {
            require(e.is_object(), "orientation must be an object");
            std::size_t pos = uint_from(e.at("cone"), "orientation cone index");
            require(pos < doc_cones.size(), "orientation cone index out of range");
            c.oriented.push_back(
                {doc_cones[pos], ivec_from(e.at("generator"), "generator")});
        }
    } else {
        for (std::size_t i = 0; i < c.fan.cones.size(); ++i) {
            const Cone& cone = c.fan.cones[i];
            if (c.weights[i] != 0 && cone.dim() == c.dim)
                c.oriented.push_back({cone, orientation_generator(cone, cone.rays)});
        }
    }
    return c;
}

Json cycle_to_json(const WeightedCycle& c) {
    Json j = fan_to_json(c.fan);
    j["dim"] = c.dim;
    Json w = Json::array();
    for (const auto& x : c.weights) w.push_back(rat_to_json(x));
    j["weights"] = std::move(w);
    Json os = Json::array();
    for (const auto& oc : c.oriented) {
        auto idx = c.fan.find(oc.cone);
        if (!idx) continue;
        Json o;
        o["cone"] = *idx;
        o["generator"] = ivec_to(oc.generator);
        os.push_back(std::move(o));
    }
    j["orientations"] = std::move(os);
    return j;
}

std::vector<PolyTerm> poly_from_json(const Json& j) {
    require(j.is_array(), "polynomial document must be a list of terms");
    std::vector<PolyTerm> out;
    for (const auto& e : j) {
        require(e.is_array() && e.size() == 2,
                "polynomial term must be [coeff, exponents]");
        out.push_back({rat_from_json(e[0]), ivec_from(e[1], "exponent vector")});
    }
    return out;
}

Superform superform_from_json(const Json& j) {
    require(j.is_object(), "superform document must be an object");
    std::size_t p = uint_from(j.at("p"), "p");
    std::size_t q = uint_from(j.at("q"), "q");
    std::vector<ChartTerms> charts;
    for (const auto& jc : j.value("charts", Json::array())) {
        require(jc.is_object(), "superform chart must be an object");
        ChartTerms ct;
        ct.orbit = uint_from(jc.value("sigma", Json(0)), "sigma");
        ct.chart_dim = uint_from(jc.at("chart_dim"), "chart_dim");
        for (const auto& jt : jc.value("terms", Json::array())) {
            FormTerm ft;
            for (const auto& e : jt.value("I", Json::array()))
                ft.I.push_back(uint_from(e, "I entry"));
            for (const auto& e : jt.value("J", Json::array()))
                ft.J.push_back(uint_from(e, "J entry"));
            std::vector<BumpFactor> factors;
            for (const auto& jb : jt.value("bump", Json::array())) {
                BumpFactor b;
                b.coord = uint_from(jb.at("coord"), "bump coord");
                b.center = rat_from_json(jb.at("center"));
                b.radius = rat_from_json(jb.at("radius"));
                if (jb.contains("bump_exp"))
                    b.bump_exp = int_from(jb.at("bump_exp"), "bump_exp");
                if (jb.contains("inv_exp"))
                    b.inv_exp = int_from(jb.at("inv_exp"), "inv_exp");
                factors.push_back(std::move(b));
            }
            std::sort(factors.begin(), factors.end(),
                      [](const BumpFactor& a, const BumpFactor& b) {
                          return a.coord < b.coord;
                      });
            for (std::size_t k = 1; k < factors.size(); ++k)
                require(factors[k - 1].coord != factors[k].coord,
                        "duplicate bump coordinate in one term");
            for (const auto& e : jt.at("poly")) {
                require(e.is_array() && e.size() == 2,
                        "poly entry must be [coeff, exponents]");
                CoefTerm t;
                t.c = rat_from_json(e[0]);
                t.expo = ivec_from(e[1], "exponent vector");
                require(t.expo.size() == ct.chart_dim,
                        "exponent vector has wrong dimension");
                t.factors = factors;
                ft.coef.push_back(std::move(t));
            }
            ct.terms.push_back(std::move(ft));
        }
        charts.push_back(std::move(ct));
    }
    return Superform::make(p, q, std::move(charts));
}

ParamChain chain_from_json(const Json& j) {
    require(j.is_object(), "chain document must be an object");
    ParamChain V;
    V.torus_dim = uint_from(j.at("torus_dim"), "torus_dim");
    V.dim = uint_from(j.at("dim"), "dim");
    for (const auto& jc : j.value("charts", Json::array()))
        V.charts.push_back(chart_from(jc, V.torus_dim));
    for (const auto& jc : j.value("boundary", Json::array()))
        V.boundary.push_back(chart_from(jc, V.torus_dim));
    return V;
}

std::vector<IntVec> monomials_from_json(const Json& j) {
    require(j.is_array(), "monomial document must be a list of exponent vectors");
    std::vector<IntVec> out;
    for (const auto& e : j) out.push_back(ivec_from(e, "monomial"));
    return out;
}

SemialgSet set_from_json(const Json& j) {
    require(j.is_object(), "set document must be an object");
    SemialgSet S;
    S.n = uint_from(j.at("n"), "n");
    S.m = uint_from(j.at("m"), "m");
    for (const auto& e : j.value("constraints", Json::array())) {
        require(e.is_object() && e.contains("poly") && e.contains("rel"),
                "constraint must carry poly and rel");
        Constraint c;
        c.poly = poly_from_json(e.at("poly"));
        std::string rel = e.at("rel").template get<std::string>();
        if (rel == "ge")
            c.rel = Rel::ge;
        else if (rel == "gt")
            c.rel = Rel::gt;
        else if (rel == "eq")
            c.rel = Rel::eq;
        else
            throw parse_error("rel must be ge, gt, or eq");
        S.constraints.push_back(std::move(c));
    }
    return S;
}

} // namespace tropmap
