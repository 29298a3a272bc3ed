#include "tropmap/cycles.hpp"

#include "tropmap/errors.hpp"
#include "tropmap/tropcoh.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

namespace tropmap {

namespace {

Rat rdot(const RatVec& w, const IntVec& p) {
    Rat s = 0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * Rat(p[i]);
    return s;
}

Int idot(const IntVec& a, const IntVec& b) {
    Int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

IntVec isub(const IntVec& a, const IntVec& b) {
    IntVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Int content(const IntVec& v) {
    Int g = 0;
    for (const auto& x : v) g = boost::multiprecision::gcd(g, x);
    return g;
}

IntVec apply_rows(const std::vector<IntVec>& rows, const IntVec& v) {
    IntVec r(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) r[i] = idot(rows[i], v);
    return r;
}

int rank_of(const std::vector<IntVec>& rows, std::size_t n) {
    return rank(RatMatrix::from_rows(to_rat_rows(rows), n));
}

} // namespace

NewtonPolytope NewtonPolytope::from_points(const std::vector<IntVec>& pts,
                                           std::size_t n) {
    NewtonPolytope np;
    np.ambient = n;
    if (n == 0) throw invariant_error("newton-degenerate", "ambient dimension zero");
    {
        std::set<IntVec> seen;
        for (const auto& p : pts) {
            if (p.size() != n)
                throw invariant_error("newton-degenerate",
                                      "exponent length differs from variable count");
            if (seen.insert(p).second) np.points.push_back(p);
        }
    }
    std::sort(np.points.begin(), np.points.end());
    if (np.points.size() < 2)
        throw invariant_error("newton-degenerate", "fewer than two distinct exponents");

    std::vector<IntVec> diffs;
    for (std::size_t i = 1; i < np.points.size(); ++i)
        diffs.push_back(isub(np.points[i], np.points[0]));
    if (rank_of(diffs, n) != static_cast<int>(n))
        throw invariant_error("newton-degenerate",
                              "the hull is not full-dimensional");

    // An unordered pair spans an edge exactly when the directions w with
    // <a,w> = <b,w> <= <c,w> for every c form a cone of dimension n-1.
    // Distinct pairs on a common edge share that cone, so keying the dual
    // cone dedups them; the full edge is then read off with a probe from
    // its relative interior.
    std::map<std::pair<std::size_t, std::vector<IntVec>>, Cone> duals;
    for (std::size_t i = 0; i < np.points.size(); ++i) {
        for (std::size_t j = i + 1; j < np.points.size(); ++j) {
            const auto& a = np.points[i];
            const auto& b = np.points[j];
            std::vector<IntVec> ineqs;
            for (std::size_t k = 0; k < np.points.size(); ++k)
                if (k != i && k != j) ineqs.push_back(isub(np.points[k], a));
            auto rays = cone_rays_from_inequalities(ineqs, {isub(a, b)}, n);
            if (rank_of(rays, n) != static_cast<int>(n) - 1) continue;
            auto dual = Cone::make(0, n, rays);
            duals.emplace(dual.key(), dual);
        }
    }

    std::set<IntVec> vert;
    for (const auto& [key, dual] : duals) {
        RatVec probe = dual.relint_point();
        Rat best;
        bool first = true;
        std::vector<IntVec> face;
        for (const auto& p : np.points) {
            Rat s = rdot(probe, p);
            if (first || s < best) {
                best = s;
                face.clear();
                first = false;
            }
            if (s == best) face.push_back(p);
        }
        // the minimizing face of an edge dual is a segment; its input
        // points are collinear, so lexicographic order is the line order
        std::sort(face.begin(), face.end());
        const IntVec& lo = face.front();
        const IntVec& hi = face.back();
        IntVec d = isub(hi, lo);
        NewtonEdge e;
        e.length = content(d);
        e.direction = primitive(d);
        e.normal_cone = dual;
        np.edges.push_back(std::move(e));
        vert.insert(lo);
        vert.insert(hi);
    }
    np.vertices.assign(vert.begin(), vert.end());
    return np;
}

WeightedCycle trop_hypersurface(const std::vector<PolyTerm>& poly) {
    std::map<IntVec, Rat> combined;
    std::size_t n = poly.empty() ? 0 : poly.front().second.size();
    for (const auto& [c, e] : poly) {
        if (e.size() != n)
            throw invariant_error("newton-degenerate",
                                  "terms use different variable counts");
        combined[e] += c;
    }
    std::vector<IntVec> pts;
    for (const auto& [e, c] : combined)
        if (c != 0) pts.push_back(e);
    if (pts.size() < 2)
        throw invariant_error("newton-degenerate",
                              "the support has fewer than two points");

    auto np = NewtonPolytope::from_points(pts, n);

    auto ambient = AmbientFan::trivial(n);
    std::map<std::pair<std::size_t, std::vector<IntVec>>, Cone> cones;
    std::map<std::pair<std::size_t, std::vector<IntVec>>, Rat> weight;
    for (const auto& e : np.edges) {
        weight[e.normal_cone.key()] += Rat(e.length);
        for (const auto& f : cone_faces(ambient, e.normal_cone))
            cones.emplace(f.key(), f);
    }
    std::vector<Cone> all;
    for (const auto& [k, c] : cones) all.push_back(c);

    WeightedCycle cyc;
    cyc.fan = Fan::build(ambient, std::move(all));
    cyc.dim = n - 1;
    cyc.weights.assign(cyc.fan.cones.size(), Rat(0));
    for (const auto& [k, w] : weight) {
        auto idx = cyc.fan.find(cones.at(k));
        cyc.weights[*idx] = w;
    }
    for (std::size_t i = 0; i < cyc.fan.cones.size(); ++i) {
        const auto& c = cyc.fan.cones[i];
        if (c.dim() != cyc.dim) continue;
        cyc.oriented.push_back({c, orientation_generator(c, c.rays)});
    }
    return cyc;
}

IntVec lattice_normal(const Cone& p, const Cone& tau) {
    if (p.orbit != tau.orbit || !p.contains_cone(tau) || tau.dim() + 1 != p.dim())
        throw invariant_error("facet-expected",
                              "lattice normals are defined along facets");
    std::size_t d = p.dim();
    std::vector<IntVec> trows;
    for (const auto& r : tau.rays) {
        auto c = lattice_coordinates(p.span_lattice, r, p.chart_dim);
        if (!c)
            throw invariant_error("facet-expected", "facet outside the span lattice");
        trows.push_back(*c);
    }
    auto phi = kernel_lattice(trows, d);
    if (phi.size() != 1)
        throw invariant_error("facet-expected", "facet is not of codimension one");
    IntVec u = dual_partner(phi[0]);

    // orient into p: the relative interior pairs positively with phi
    RatMatrix cols(p.chart_dim, d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < p.chart_dim; ++i)
            cols.at(i, j) = Rat(p.span_lattice[j][i]);
    auto rp = solve(cols, p.relint_point());
    if (!rp)
        throw invariant_error("facet-expected", "interior point outside the span");
    Rat side = 0;
    for (std::size_t k = 0; k < d; ++k) side += Rat(phi[0][k]) * (*rp)[k];
    if (side < 0)
        for (auto& x : u) x = -x;

    IntVec chart(p.chart_dim, Int(0));
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t i = 0; i < p.chart_dim; ++i)
            chart[i] += u[k] * p.span_lattice[k][i];
    return chart;
}

BalanceReport check_balanced(const WeightedCycle& c) {
    BalanceReport rep;
    rep.balanced = true;
    if (c.dim == 0) return rep;
    for (std::size_t ti = 0; ti < c.fan.cones.size(); ++ti) {
        const auto& tau = c.fan.cones[ti];
        if (tau.dim() + 1 != c.dim) continue;
        bool any = false;
        RatVec rsum(tau.chart_dim, Rat(0));
        for (std::size_t pi = 0; pi < c.fan.cones.size(); ++pi) {
            const auto& p = c.fan.cones[pi];
            if (p.dim() != c.dim || p.orbit != tau.orbit) continue;
            if (!p.contains_cone(tau)) continue;
            auto u = lattice_normal(p, tau);
            for (std::size_t k = 0; k < u.size(); ++k)
                rsum[k] += c.weights[pi] * Rat(u[k]);
            any = true;
        }
        if (!any) continue;
        auto span = Subspace::span_of(to_rat_rows(tau.span_lattice), tau.chart_dim);
        if (!span.contains(rsum)) {
            rep.balanced = false;
            rep.violating_cone = ti;
            return rep;
        }
    }
    return rep;
}

TropChainClass weighted_chain(const WeightedCycle& c, std::size_t degree) {
    if (degree != c.dim)
        throw invariant_error("chain-degree",
                              "the chain lives in the top dimension of the cycle");
    TropChainClass ch;
    ch.fan = c.fan;
    ch.degree = degree;
    bool neg = (degree * (degree - 1) / 2) % 2 == 1;
    for (std::size_t i = 0; i < c.fan.cones.size(); ++i) {
        const auto& cone = c.fan.cones[i];
        std::size_t w = WedgeIndex(cone.chart_dim, degree).size();
        RatVec v(w, Rat(0));
        if (cone.dim() == degree && c.weights[i] != 0) {
            auto gen = orientation_generator(cone, cone.rays);
            for (std::size_t k = 0; k < w; ++k) {
                v[k] = c.weights[i] * Rat(gen[k]);
                if (neg) v[k] = -v[k];
            }
        }
        ch.coeff.push_back(std::move(v));
    }
    return ch;
}

RatVec chain_boundary_vector(const TropChainClass& chain) {
    auto cc = build_complex(chain.fan, chain.degree);
    std::size_t q = chain.degree;
    if (q >= cc.block_dim.size()) return {};
    RatVec x(cc.block_dim[q], Rat(0));
    for (std::size_t i = 0; i < chain.fan.cones.size(); ++i) {
        if (chain.fan.cones[i].dim() != q) continue;
        bool zero = true;
        for (const auto& t : chain.coeff[i])
            if (t != 0) { zero = false; break; }
        if (zero) continue;
        auto coords = cc.coef[i].space.coordinates_of(chain.coeff[i]);
        if (!coords)
            throw invariant_error("chain-coefficient",
                                  "coefficient outside the cell's space");
        for (std::size_t k = 0; k < coords->size(); ++k)
            x[cc.offset[i] + k] = (*coords)[k];
    }
    if (q == 0 || cc.boundary.size() <= q) return RatVec{};
    return cc.boundary[q].apply(x);
}

PushforwardResult pushforward(const WeightedCycle& c, const std::vector<IntVec>& psi) {
    std::size_t m = psi.size();
    std::size_t n = c.fan.ambient.rank;
    if (m == 0) throw invariant_error("map-shape", "empty exponent matrix");
    for (const auto& row : psi)
        if (row.size() != n)
            throw invariant_error("map-shape", "row length differs from source rank");
    if (!c.fan.all_interior())
        throw invariant_error("interior-expected",
                              "pushforward acts on torus cycles");

    std::map<std::pair<std::size_t, std::vector<IntVec>>, Cone> imgs;
    std::map<std::pair<std::size_t, std::vector<IntVec>>, Rat> weight;
    for (std::size_t i = 0; i < c.fan.cones.size(); ++i) {
        const auto& p = c.fan.cones[i];
        if (p.dim() != c.dim || c.weights[i] == 0) continue;
        std::vector<IntVec> images;
        for (const auto& r : p.rays) images.push_back(apply_rows(psi, r));
        if (rank_of(images, m) != static_cast<int>(c.dim)) continue;
        auto q = Cone::make(0, m, images);
        std::vector<IntVec> imgL;
        for (const auto& b : p.span_lattice) imgL.push_back(apply_rows(psi, b));
        Int index = c.dim == 0
                        ? Int(1)
                        : lattice_index_in(hnf_basis(imgL, m), q.span_lattice, m);
        weight[q.key()] += c.weights[i] * Rat(index);
        imgs.emplace(q.key(), std::move(q));
    }

    auto ambient = AmbientFan::trivial(m);
    std::map<std::pair<std::size_t, std::vector<IntVec>>, Cone> cones;
    cones.emplace(Cone::make(0, m, {}).key(), Cone::make(0, m, {}));
    for (const auto& [k, q] : imgs)
        for (const auto& f : cone_faces(ambient, q)) cones.emplace(f.key(), f);
    std::vector<Cone> all;
    for (const auto& [k, q] : cones) all.push_back(q);

    PushforwardResult res;
    res.cycle.fan = Fan::build(ambient, std::move(all));
    res.cycle.dim = c.dim;
    res.cycle.weights.assign(res.cycle.fan.cones.size(), Rat(0));
    for (const auto& [k, w] : weight) {
        auto idx = res.cycle.fan.find(imgs.at(k));
        res.cycle.weights[*idx] = w;
    }
    for (std::size_t i = 0; i < res.cycle.fan.cones.size(); ++i) {
        const auto& q = res.cycle.fan.cones[i];
        if (q.dim() != c.dim || res.cycle.weights[i] == 0) continue;
        res.cycle.oriented.push_back({q, orientation_generator(q, q.rays)});
    }
    res.balance = check_balanced(res.cycle);
    return res;
}

} // namespace tropmap
