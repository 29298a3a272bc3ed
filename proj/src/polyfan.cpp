#include "tropmap/polyfan.hpp"

#include "tropmap/errors.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace tropmap {

namespace {

Rat dot(const IntVec& a, const RatVec& x) {
    Rat acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += Rat(a[i]) * x[i];
    return acc;
}

Int idot(const IntVec& a, const IntVec& b) {
    Int acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

// Equations of the rational span of the given vectors.
std::vector<IntVec> span_equations(const std::vector<IntVec>& gens, std::size_t n) {
    auto comp = kernel_basis(RatMatrix::from_rows(to_rat_rows(gens), n));
    std::vector<IntVec> eqs;
    for (const auto& c : comp.basis) eqs.push_back(scale_to_int(c));
    return eqs;
}

std::size_t rank_of(const std::vector<IntVec>& rows, std::size_t n) {
    if (rows.empty()) return 0;
    return std::size_t(rank(RatMatrix::from_rows(to_rat_rows(rows), n)));
}

void subsets_rec(std::size_t n, std::size_t k, std::vector<std::size_t>& cur,
                 std::size_t start, std::vector<std::vector<std::size_t>>& out) {
    if (cur.size() == k) { out.push_back(cur); return; }
    for (std::size_t i = start; i + (k - cur.size()) <= n; ++i) {
        cur.push_back(i);
        subsets_rec(n, k, cur, i + 1, out);
        cur.pop_back();
    }
}

std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    subsets_rec(n, k, cur, 0, out);
    return out;
}

// Facet inequalities of cone(gens) within its span: every facet of a
// finitely generated cone is generated by the generators lying on it, so
// each facet normal shows up as the 1-dimensional solution of some
// (d-1)-subset of generators together with the span equations.
std::vector<IntVec> facets_from_rays(const std::vector<IntVec>& gens,
                                     const std::vector<IntVec>& span_eqs,
                                     std::size_t n) {
    std::size_t d = n - rank_of(span_eqs, n);
    std::vector<IntVec> facets;
    if (d == 0) return facets;
    std::set<IntVec> seen;
    for (const auto& pick : subsets(gens.size(), d - 1)) {
        std::vector<IntVec> rows = span_eqs;
        for (auto i : pick) rows.push_back(gens[i]);
        auto ker = kernel_lattice(rows, n);
        if (ker.size() != 1) continue;
        IntVec a = ker[0];
        bool nonneg = true, nonpos = true;
        for (const auto& g : gens) {
            Int s = idot(a, g);
            if (s > 0) nonpos = false;
            if (s < 0) nonneg = false;
        }
        if (nonneg == nonpos) continue; // mixed signs or all zero
        if (nonpos)
            for (auto& x : a) x = -x;
        if (seen.insert(a).second) facets.push_back(a);
    }
    std::sort(facets.begin(), facets.end());
    return facets;
}

// Extreme rays of the pointed cone {x : eqs x = 0, ineqs x >= 0}.
std::vector<Cone> chart_faces(const Cone& p);

std::vector<IntVec> rays_from_hrep(const std::vector<IntVec>& ineqs,
                                   const std::vector<IntVec>& eqs, std::size_t n) {
    std::size_t d = n - rank_of(eqs, n);
    std::vector<IntVec> rays;
    if (d == 0) return rays;
    std::set<IntVec> seen;
    for (const auto& pick : subsets(ineqs.size(), d - 1)) {
        std::vector<IntVec> rows = eqs;
        for (auto i : pick) rows.push_back(ineqs[i]);
        auto ker = kernel_lattice(rows, n);
        if (ker.size() != 1) continue;
        for (int sign = 0; sign < 2; ++sign) {
            IntVec v = ker[0];
            if (sign)
                for (auto& x : v) x = -x;
            bool ok = true;
            for (const auto& a : ineqs)
                if (idot(a, v) < 0) { ok = false; break; }
            if (ok && seen.insert(primitive(v)).second) rays.push_back(primitive(v));
        }
    }
    std::sort(rays.begin(), rays.end());
    return rays;
}

} // namespace

Cone Cone::make(std::size_t orbit, std::size_t chart_dim,
                const std::vector<IntVec>& generators) {
    Cone c;
    c.orbit = orbit;
    c.chart_dim = chart_dim;

    std::set<IntVec> gset;
    std::vector<IntVec> gens;
    for (const auto& g : generators) {
        if (g.size() != chart_dim)
            throw invariant_error("cone-shape", "ray length differs from chart dimension");
        bool zero = true;
        for (const auto& x : g)
            if (x != 0) { zero = false; break; }
        if (zero) throw invariant_error("cone-shape", "zero vector given as a ray");
        auto p = primitive(g);
        if (gset.insert(p).second) gens.push_back(p);
    }

    c.span_perp = span_equations(gens, chart_dim);
    c.facet_normals = facets_from_rays(gens, c.span_perp, chart_dim);

    std::vector<IntVec> all_rows = c.facet_normals;
    all_rows.insert(all_rows.end(), c.span_perp.begin(), c.span_perp.end());
    if (rank_of(all_rows, chart_dim) != chart_dim)
        throw invariant_error("cone-not-pointed", "cone contains a line");

    c.rays = rays_from_hrep(c.facet_normals, c.span_perp, chart_dim);
    c.span_lattice = gens.empty() ? std::vector<IntVec>{}
                                  : saturate_span(gens, chart_dim);
    if (c.rays.size() < gens.size() && c.dim() > 0) {
        // redundant generators were pruned; spans must agree
        if (rank_of(c.rays, chart_dim) != c.dim())
            throw invariant_error("cone-shape", "extreme ray extraction failed");
    }
    return c;
}

bool Cone::contains(const RatVec& x) const {
    for (const auto& e : span_perp)
        if (dot(e, x) != 0) return false;
    for (const auto& a : facet_normals)
        if (dot(a, x) < 0) return false;
    return true;
}

bool Cone::relint_contains(const RatVec& x) const {
    for (const auto& e : span_perp)
        if (dot(e, x) != 0) return false;
    for (const auto& a : facet_normals)
        if (dot(a, x) <= 0) return false;
    return true;
}

RatVec Cone::relint_point() const {
    RatVec x(chart_dim, Rat(0));
    for (const auto& r : rays)
        for (std::size_t i = 0; i < chart_dim; ++i) x[i] += Rat(r[i]);
    return x;
}

bool Cone::same_cone(const Cone& other) const {
    return orbit == other.orbit && chart_dim == other.chart_dim && rays == other.rays;
}

bool Cone::contains_cone(const Cone& other) const {
    if (orbit != other.orbit || chart_dim != other.chart_dim) return false;
    if (other.rays.empty()) return true;
    for (const auto& r : other.rays)
        if (!contains(to_rat(r))) return false;
    return true;
}

AmbientFan AmbientFan::trivial(std::size_t rank) {
    return make(rank, {}, {{}});
}

AmbientFan AmbientFan::make(std::size_t rank, std::vector<IntVec> rays,
                            std::vector<std::vector<std::size_t>> cones) {
    AmbientFan f;
    f.rank = rank;
    for (auto& r : rays) {
        if (r.size() != rank) throw invariant_error("ambient-shape", "ray length mismatch");
        f.rays.push_back(primitive(r));
    }
    for (auto& c : cones) std::sort(c.begin(), c.end());
    std::sort(cones.begin(), cones.end(),
              [](const auto& a, const auto& b) {
                  return a.size() != b.size() ? a.size() < b.size() : a < b;
              });
    cones.erase(std::unique(cones.begin(), cones.end()), cones.end());
    if (cones.empty() || !cones[0].empty())
        throw invariant_error("ambient-shape", "the zero cone must be listed");
    f.cones = cones;

    // validate each cone and closure under faces
    std::map<std::vector<IntVec>, std::size_t> by_rayset;
    for (std::size_t i = 0; i < f.cones.size(); ++i) {
        std::vector<IntVec> rs;
        for (auto idx : f.cones[i]) {
            if (idx >= f.rays.size())
                throw invariant_error("ambient-shape", "cone references unknown ray");
            rs.push_back(f.rays[idx]);
        }
        std::sort(rs.begin(), rs.end());
        by_rayset[rs] = i;
    }
    for (std::size_t i = 0; i < f.cones.size(); ++i) {
        std::vector<IntVec> rs;
        for (auto idx : f.cones[i]) rs.push_back(f.rays[idx]);
        auto c = Cone::make(0, rank, rs); // throws if not strongly convex
        for (const auto& face : chart_faces(c)) {
            if (by_rayset.find(face.rays) == by_rayset.end())
                throw invariant_error("ambient-shape", "ambient fan not closed under faces");
        }
    }

    for (const auto& c : f.cones) {
        std::vector<IntVec> rs;
        for (auto idx : c) rs.push_back(f.rays[idx]);
        f.operp.push_back(kernel_lattice(rs, rank));
    }
    return f;
}

std::size_t AmbientFan::cone_dim(std::size_t orbit) const {
    return rank - chart_dim(orbit);
}

bool AmbientFan::is_face_of(std::size_t a, std::size_t b) const {
    const auto& ca = cones[a];
    const auto& cb = cones[b];
    if (!std::includes(cb.begin(), cb.end(), ca.begin(), ca.end())) return false;
    if (a == b) return true;
    // the span of a must be carved out of b by tight facets of b
    std::vector<IntVec> rb;
    for (auto idx : cb) rb.push_back(rays[idx]);
    auto cone_b = Cone::make(0, rank, rb);
    std::vector<IntVec> tight = cone_b.span_perp;
    for (const auto& f : cone_b.facet_normals) {
        bool all_zero = true;
        for (auto idx : ca)
            if (idot(f, rays[idx]) != 0) { all_zero = false; break; }
        if (all_zero) tight.push_back(f);
    }
    auto face_rays = rays_from_hrep(cone_b.facet_normals, tight, rank);
    std::vector<IntVec> ra;
    for (auto idx : ca) ra.push_back(rays[idx]);
    std::sort(ra.begin(), ra.end());
    return face_rays == ra;
}

bool AmbientFan::same_as(const AmbientFan& other) const {
    return rank == other.rank && rays == other.rays && cones == other.cones;
}

std::vector<IntVec> orbit_projection(const AmbientFan& f, std::size_t sigma,
                                     std::size_t tau) {
    if (sigma >= f.cones.size() || tau >= f.cones.size())
        throw invariant_error("orbit-projection", "orbit index out of range");
    if (!f.is_face_of(tau, sigma))
        throw invariant_error("orbit-projection", "tau is not a face of sigma");
    std::vector<IntVec> rows;
    for (const auto& b : f.operp[sigma]) {
        auto coords = lattice_coordinates(f.operp[tau], b, f.rank);
        if (!coords)
            throw invariant_error("orbit-projection", "saturated bases incompatible");
        rows.push_back(*coords);
    }
    return rows;
}

namespace {

IntVec apply_int(const std::vector<IntVec>& m, const IntVec& x) {
    IntVec out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = idot(m[i], x);
    return out;
}

bool is_zero_vec(const IntVec& v) {
    for (const auto& x : v)
        if (x != 0) return false;
    return true;
}

// Same-chart faces of P: subcones carved out by subsets of facets.
std::vector<Cone> chart_faces(const Cone& p) {
    std::vector<Cone> out;
    std::set<std::pair<std::size_t, std::vector<IntVec>>> seen;
    std::size_t nf = p.facet_normals.size();
    if (nf > 20)
        throw invariant_error("cone-size", "facet count beyond desk scale");
    for (std::size_t mask = 0; mask < (std::size_t(1) << nf); ++mask) {
        std::vector<IntVec> eqs = p.span_perp;
        for (std::size_t i = 0; i < nf; ++i)
            if (mask & (std::size_t(1) << i)) eqs.push_back(p.facet_normals[i]);
        auto rays = rays_from_hrep(p.facet_normals, eqs, p.chart_dim);
        auto face = Cone::make(p.orbit, p.chart_dim, rays);
        if (seen.insert(face.key()).second) out.push_back(face);
    }
    return out;
}

// Image of ambient cone tau inside the chart of orbit sigma_p (the star
// picture); only meaningful when sigma_p is a face of tau.
Cone star_image(const AmbientFan& ambient, std::size_t sigma_p, std::size_t tau) {
    auto proj = orbit_projection(ambient, sigma_p, 0);
    std::vector<IntVec> gens;
    for (auto idx : ambient.cones[tau]) {
        auto im = apply_int(proj, ambient.rays[idx]);
        if (!is_zero_vec(im)) gens.push_back(im);
    }
    return Cone::make(sigma_p, ambient.chart_dim(sigma_p), gens);
}

} // namespace

std::vector<Cone> cone_faces(const AmbientFan& ambient, const Cone& p) {
    std::vector<Cone> out = chart_faces(p);
    std::set<std::pair<std::size_t, std::vector<IntVec>>> seen;
    for (const auto& f : out) seen.insert(f.key());

    for (std::size_t tau = 0; tau < ambient.cones.size(); ++tau) {
        if (tau == p.orbit || !ambient.is_face_of(p.orbit, tau)) continue;
        auto tbar = star_image(ambient, p.orbit, tau);
        auto proj = orbit_projection(ambient, tau, p.orbit);
        for (const auto& f : chart_faces(p)) {
            if (f.rays.empty()) continue;
            auto cut = intersect_cones(f, tbar);
            auto x = cut.relint_point();
            if (!tbar.relint_contains(x)) continue;
            std::vector<IntVec> gens;
            for (const auto& r : f.rays) {
                auto im = apply_int(proj, r);
                if (!is_zero_vec(im)) gens.push_back(im);
            }
            auto face = Cone::make(tau, ambient.chart_dim(tau), gens);
            if (seen.insert(face.key()).second) out.push_back(face);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Cone& a, const Cone& b) { return a.key() < b.key(); });
    return out;
}

std::optional<Cone> closure_part(const AmbientFan& ambient, const Cone& p,
                                 std::size_t tau) {
    if (tau == p.orbit) return p;
    if (!ambient.is_face_of(p.orbit, tau)) return std::nullopt;
    auto tbar = star_image(ambient, p.orbit, tau);
    Cone pc = p;
    auto cut = intersect_cones(pc, tbar);
    if (!tbar.relint_contains(cut.relint_point())) return std::nullopt;
    auto proj = orbit_projection(ambient, tau, p.orbit);
    std::vector<IntVec> gens;
    for (const auto& r : p.rays) {
        auto im = apply_int(proj, r);
        if (!is_zero_vec(im)) gens.push_back(im);
    }
    return Cone::make(tau, ambient.chart_dim(tau), gens);
}

Cone intersect_cones(const Cone& a, const Cone& b) {
    if (a.orbit != b.orbit || a.chart_dim != b.chart_dim)
        throw invariant_error("cone-intersect", "cones live in different charts");
    std::vector<IntVec> ineqs = a.facet_normals;
    ineqs.insert(ineqs.end(), b.facet_normals.begin(), b.facet_normals.end());
    std::vector<IntVec> eqs = a.span_perp;
    eqs.insert(eqs.end(), b.span_perp.begin(), b.span_perp.end());
    auto rays = rays_from_hrep(ineqs, eqs, a.chart_dim);
    // rays_from_hrep needs span equations of the intersection itself to
    // find low-dimensional faces; re-run with tightened equations.
    std::vector<IntVec> keep;
    for (const auto& r : rays) {
        bool ok = true;
        for (const auto& e : eqs)
            if (idot(e, r) != 0) { ok = false; break; }
        for (const auto& q : ineqs) {
            if (!ok) break;
            if (idot(q, r) < 0) ok = false;
        }
        if (ok) keep.push_back(r);
    }
    return Cone::make(a.orbit, a.chart_dim, keep);
}

std::vector<IntVec> cone_rays_from_inequalities(const std::vector<IntVec>& ineqs,
                                                const std::vector<IntVec>& eqs,
                                                std::size_t n) {
    return rays_from_hrep(ineqs, eqs, n);
}

IntVec orientation_generator(const Cone& c, const std::vector<IntVec>& ordered_rays) {
    std::size_t d = c.dim();
    if (d == 0) return IntVec{Int(1)};
    if (ordered_rays.size() != d)
        throw invariant_error("orientation", "ray count differs from cone dimension");

    std::vector<RatVec> basis_rows = to_rat_rows(c.span_lattice);
    auto gen_q = wedge_of_vectors(basis_rows, c.chart_dim);
    IntVec gen(gen_q.size());
    for (std::size_t i = 0; i < gen_q.size(); ++i) gen[i] = numerator(gen_q[i]);

    RatMatrix coords(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        auto cc = lattice_coordinates(c.span_lattice, ordered_rays[i], c.chart_dim);
        if (!cc) throw invariant_error("orientation", "ray outside the span lattice");
        for (std::size_t j = 0; j < d; ++j) coords.at(i, j) = Rat((*cc)[j]);
    }
    Rat dd = det(coords);
    if (dd == 0) throw invariant_error("orientation", "ordered rays do not span the cone");
    if (dd < 0)
        for (auto& x : gen) x = -x;
    return gen;
}

Fan Fan::build(AmbientFan ambient, std::vector<Cone> cones, bool validate) {
    Fan f;
    f.ambient = std::move(ambient);
    std::sort(cones.begin(), cones.end(),
              [](const Cone& a, const Cone& b) { return a.key() < b.key(); });
    for (std::size_t i = 0; i + 1 < cones.size(); ++i)
        if (cones[i].same_cone(cones[i + 1]))
            throw invariant_error("fan-duplicate", "duplicate cone in fan");
    f.cones = std::move(cones);

    for (const auto& c : f.cones) {
        if (c.orbit >= f.ambient.cones.size())
            throw invariant_error("fan-orbit", "cone orbit out of range");
        if (c.chart_dim != f.ambient.chart_dim(c.orbit))
            throw invariant_error("fan-orbit", "cone chart dimension mismatch");
    }
    if (!validate) return f;

    // face closure
    std::vector<std::vector<Cone>> faces;
    for (const auto& c : f.cones) faces.push_back(cone_faces(f.ambient, c));
    for (std::size_t i = 0; i < f.cones.size(); ++i)
        for (const auto& g : faces[i])
            if (!f.find(g))
                throw invariant_error("fan-closure",
                                      "fan not closed under faces (cone #" +
                                          std::to_string(i) + ")");

    // pairwise intersections are common faces
    for (std::size_t i = 0; i < f.cones.size(); ++i) {
        for (std::size_t j = i + 1; j < f.cones.size(); ++j) {
            const Cone& p = f.cones[i];
            const Cone& q = f.cones[j];
            // common faces
            std::vector<Cone> common;
            for (const auto& a : faces[i])
                for (const auto& b : faces[j])
                    if (a.same_cone(b)) common.push_back(a);
            const Cone* best = nullptr;
            bool tie = false;
            for (const auto& c : common) {
                if (!best || c.dim() > best->dim()) { best = &c; tie = false; }
                else if (c.dim() == best->dim() && !c.same_cone(*best)) tie = true;
            }
            for (std::size_t tau = 0; tau < f.ambient.cones.size(); ++tau) {
                auto ap = closure_part(f.ambient, p, tau);
                auto bq = closure_part(f.ambient, q, tau);
                std::optional<Cone> expect;
                if (best) expect = closure_part(f.ambient, *best, tau);
                if (!ap || !bq) {
                    if (ap && bq)
                        throw invariant_error("fan-overlap", "inconsistent closure parts");
                    continue;
                }
                auto cut = intersect_cones(*ap, *bq);
                if (cut.dim() == 0 && cut.rays.empty() &&
                    (!expect || expect->rays.empty())) {
                    // zero intersection is fine when the expected part is
                    // absent only if the charts' zero cone is not a common
                    // face; handled below through the expect check
                }
                if (!expect) {
                    if (!cut.rays.empty() || (best && tau == best->orbit))
                        throw invariant_error(
                            "fan-overlap", "cones " + std::to_string(i) + " and " +
                                               std::to_string(j) +
                                               " do not meet in a common face");
                    continue;
                }
                if (tie || !cut.same_cone(*expect))
                    throw invariant_error(
                        "fan-overlap", "cones " + std::to_string(i) + " and " +
                                           std::to_string(j) +
                                           " do not meet in a common face");
            }
        }
    }
    return f;
}

std::optional<std::size_t> Fan::find(const Cone& c) const {
    for (std::size_t i = 0; i < cones.size(); ++i)
        if (cones[i].same_cone(c)) return i;
    return std::nullopt;
}

std::size_t Fan::dim() const {
    std::size_t d = 0;
    for (const auto& c : cones) d = std::max(d, c.dim());
    return d;
}

bool Fan::all_interior() const {
    for (const auto& c : cones)
        if (c.orbit != 0) return false;
    return true;
}

namespace {

// Do the given full-dimensional pieces tile the cone C? Pieces are
// relint-disjoint subcones cut out by a fan, so tiling fails exactly when
// some piece facet interior to C is not shared with a second piece.
bool pieces_tile(const AmbientFan& ambient, const Cone& c,
                 const std::vector<Cone>& pieces) {
    if (c.dim() == 0) return !pieces.empty();
    if (pieces.empty()) return false;
    if (c.dim() == 1) {
        for (const auto& p : pieces)
            if (p.same_cone(c)) return true;
        return false;
    }
    std::map<std::vector<IntVec>, int> interior_count;
    for (const auto& p : pieces) {
        for (const auto& g : chart_faces(p)) {
            if (g.dim() + 1 != p.dim()) continue;
            if (c.relint_contains(g.relint_point()))
                interior_count[g.rays] += 1;
        }
    }
    for (const auto& [rays, count] : interior_count)
        if (count != 2) return false;
    return true;
}

} // namespace

Fan common_refinement(const Fan& a, const Fan& b) {
    if (!a.ambient.same_as(b.ambient))
        throw invariant_error("support-mismatch", "fans live over different ambient fans");

    // support equality, chart by chart, both directions
    auto check_covered = [&](const Fan& f, const Fan& g, const char* which) {
        for (std::size_t i = 0; i < f.cones.size(); ++i) {
            const Cone& c = f.cones[i];
            std::vector<Cone> pieces;
            for (const auto& d : g.cones) {
                if (d.orbit != c.orbit) continue;
                auto cut = intersect_cones(c, d);
                if (cut.dim() == c.dim()) pieces.push_back(cut);
            }
            if (!pieces_tile(f.ambient, c, pieces))
                throw invariant_error("support-mismatch",
                                      std::string("cone #") + std::to_string(i) +
                                          " of the " + which +
                                          " fan is not covered by the other support");
        }
    };
    check_covered(a, b, "first");
    check_covered(b, a, "second");

    std::set<std::pair<std::size_t, std::vector<IntVec>>> seen;
    std::vector<Cone> out;
    auto push = [&](const Cone& c) {
        if (seen.insert(c.key()).second) out.push_back(c);
    };
    for (const auto& ca : a.cones)
        for (const auto& cb : b.cones) {
            if (ca.orbit != cb.orbit) continue;
            auto cut = intersect_cones(ca, cb);
            push(cut);
            for (const auto& g : cone_faces(a.ambient, cut)) push(g);
        }
    return Fan::build(a.ambient, out);
}

Fan stellar_subdivide(const Fan& f, const IntVec& new_ray) {
    auto v = primitive(new_ray);
    if (v.size() != f.ambient.rank)
        throw invariant_error("stellar", "subdivision ray length mismatch");
    const Cone* target = nullptr;
    for (const auto& c : f.cones)
        if (c.orbit == 0 && c.relint_contains(to_rat(v))) { target = &c; break; }
    if (!target)
        throw invariant_error("stellar", "subdivision point outside the fan support");
    if (target->dim() <= 1)
        throw invariant_error("stellar", "subdivision point lies on an existing ray");

    // subdivide the interior cones; boundary cells are regenerated from
    // the faces of the result
    std::vector<Cone> next;
    for (const auto& c : f.cones) {
        if (c.orbit != 0 || !c.contains_cone(*target)) { next.push_back(c); continue; }
        for (const auto& g : chart_faces(c)) {
            if (g.contains_cone(*target)) continue;
            auto rays = g.rays;
            rays.push_back(v);
            next.push_back(Cone::make(c.orbit, c.chart_dim, rays));
        }
    }
    std::set<std::pair<std::size_t, std::vector<IntVec>>> seen;
    std::vector<Cone> out;
    auto push = [&](const Cone& c) {
        if (seen.insert(c.key()).second) out.push_back(c);
    };
    for (const auto& c : next) {
        push(c);
        for (const auto& g : cone_faces(f.ambient, c)) push(g);
    }
    return Fan::build(f.ambient, out);
}

} // namespace tropmap
