#ifndef TROPMAP_POLYFAN_HPP
#define TROPMAP_POLYFAN_HPP

#include "tropmap/exact_linalg.hpp"
#include "tropmap/intlattice.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace tropmap {

/**
 * Rational polyhedral cone inside one orbit chart of the partial
 * compactification attached to an ambient fan. A cone at the boundary is
 * stored by its relative-interior part: the chart index `orbit` plus its
 * extreme rays in chart coordinates. The topological closure is never
 * materialized; closure parts in deeper charts are computed on demand.
 *
 * Geometry caches (facet inequalities from the double description, span
 * equations, the saturated span lattice) are filled at construction.
 * Only strongly convex cones are accepted.
 */
struct Cone {
    std::size_t orbit = 0;     // index into AmbientFan::cones
    std::size_t chart_dim = 0; // dimension of the orbit chart
    std::vector<IntVec> rays;  // primitive extreme rays, sorted

    // cached by make():
    std::vector<IntVec> facet_normals; // facet inequalities within the span
    std::vector<IntVec> span_perp;     // equations cutting out the span
    std::vector<IntVec> span_lattice;  // canonical basis of Span_Z (saturated)

    static Cone make(std::size_t orbit, std::size_t chart_dim,
                     const std::vector<IntVec>& generators);

    std::size_t dim() const { return span_lattice.size(); }
    bool contains(const RatVec& x) const;
    bool relint_contains(const RatVec& x) const;
    // a point in the relative interior (sum of rays; 0 for the origin cone)
    RatVec relint_point() const;
    bool same_cone(const Cone& other) const;
    // true if `other` lives in the same chart and is a subset
    bool contains_cone(const Cone& other) const;

    // key for deterministic ordering and dedup
    std::pair<std::size_t, std::vector<IntVec>> key() const { return {orbit, rays}; }
};

/**
 * Ambient rational fan Sigma in N_R: the base of the partial
 * compactification. Cones are sorted ray-index lists; the zero cone {}
 * must be listed and is index 0 after normalization. For each cone the
 * canonical basis of M ∩ sigma-perp is cached; orbit-chart coordinates
 * are the pairings with these basis functionals.
 */
struct AmbientFan {
    std::size_t rank = 0;
    std::vector<IntVec> rays;
    std::vector<std::vector<std::size_t>> cones;
    std::vector<std::vector<IntVec>> operp; // per cone: basis of M ∩ cone^perp

    static AmbientFan trivial(std::size_t rank);
    static AmbientFan make(std::size_t rank, std::vector<IntVec> rays,
                           std::vector<std::vector<std::size_t>> cones);

    std::size_t chart_dim(std::size_t orbit) const { return operp[orbit].size(); }
    std::size_t cone_dim(std::size_t orbit) const;
    // true when cones[a] is a face of cones[b]
    bool is_face_of(std::size_t a, std::size_t b) const;
    bool same_as(const AmbientFan& other) const;
};

// Integer matrix of the projection N_{tau-chart} -> N_{sigma-chart} for
// tau a face of sigma (restriction of functionals along
// M ∩ sigma-perp ⊆ M ∩ tau-perp).
std::vector<IntVec> orbit_projection(const AmbientFan& f, std::size_t sigma,
                                     std::size_t tau);

/**
 * Fan over an ambient fan: finite set of cones across orbit charts,
 * closed under faces, pairwise intersecting in common faces. Cones are
 * kept in a deterministic sorted order.
 */
struct Fan {
    AmbientFan ambient;
    std::vector<Cone> cones;

    static Fan build(AmbientFan ambient, std::vector<Cone> cones, bool validate = true);

    std::optional<std::size_t> find(const Cone& c) const;
    std::size_t dim() const; // max cone dim
    bool all_interior() const; // every cone in the zero-orbit chart
};

// All faces of P over the given ambient fan: same-chart faces plus the
// closure parts in deeper orbit charts (each listed once, P included).
std::vector<Cone> cone_faces(const AmbientFan& ambient, const Cone& p);

// The intersection of the closure of P with the tau-chart, as a cone in
// that chart; nullopt when the closure misses the chart.
std::optional<Cone> closure_part(const AmbientFan& ambient, const Cone& p,
                                 std::size_t tau);

// Intersection of two cones in the same chart.
Cone intersect_cones(const Cone& a, const Cone& b);

// Extreme rays of the pointed cone {x : eqs x = 0, ineqs x >= 0}.
std::vector<IntVec> cone_rays_from_inequalities(const std::vector<IntVec>& ineqs,
                                                const std::vector<IntVec>& eqs,
                                                std::size_t n);

/**
 * Generator of wedge^dim of the saturated span lattice of c, in sorted
 * wedge coordinates of the chart, signed so that the ordered ray list is
 * positively oriented. The ordered rays must span the cone.
 */
IntVec orientation_generator(const Cone& c, const std::vector<IntVec>& ordered_rays);

struct OrientedCone {
    Cone cone;
    IntVec generator;
};

// Common refinement of two fans over the same ambient fan with equal
// support; throws invariant_error("support-mismatch", ...) otherwise.
Fan common_refinement(const Fan& a, const Fan& b);

// Stellar subdivision at new_ray, which must lie in the relative interior
// of an existing cone of the same chart. Only zero-orbit fans are
// supported.
Fan stellar_subdivide(const Fan& f, const IntVec& new_ray);

} // namespace tropmap

#endif
