#pragma once
// Weighted tropicalizations: hypersurface tropicalization through Newton
// polytope duality, balancing checks, the associated weighted chains, and
// pushforward under monomial maps.

#include "tropmap/exact_linalg.hpp"
#include "tropmap/polyfan.hpp"
#include "tropmap/rational.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace tropmap {

// One term of a sparse polynomial: coefficient and integer exponent vector.
using PolyTerm = std::pair<Rat, IntVec>;

struct NewtonEdge {
    IntVec direction; // primitive edge direction
    Int length;       // lattice length: one less than the lattice point count
    Cone normal_cone; // (n-1)-dimensional cone of the w minimizing on the edge
};

struct NewtonPolytope {
    std::size_t ambient = 0;
    std::vector<IntVec> points;
    std::vector<IntVec> vertices;
    std::vector<NewtonEdge> edges;

    // Requires a full-dimensional hull; throws invariant_error otherwise.
    static NewtonPolytope from_points(const std::vector<IntVec>& pts, std::size_t n);
};

struct WeightedCycle {
    Fan fan;
    std::size_t dim = 0;      // common dimension of the weighted cones
    std::vector<Rat> weights; // parallel to fan.cones, zero off the top cones
    std::vector<OrientedCone> oriented; // one per weighted top cone
};

// Tropicalization of the hypersurface {f = 0} under the -eps log limit: a
// direction w carries the terms with minimal <exponent, w>, so the cycle
// is the codimension-1 skeleton of the normal fan of the Newton polytope,
// weighted by the lattice lengths of the dual edges.
WeightedCycle trop_hypersurface(const std::vector<PolyTerm>& poly);

struct BalanceReport {
    bool balanced = false;
    std::optional<std::size_t> violating_cone; // index into fan.cones
};

// Exact balancing check at every codimension-1 cone of the cycle.
BalanceReport check_balanced(const WeightedCycle& c);

// Primitive generator of N_P / N_tau for a facet tau of P, signed to point
// from tau into P.
IntVec lattice_normal(const Cone& p, const Cone& tau);

struct TropChainClass {
    Fan fan;
    std::size_t degree = 0;    // p
    std::vector<RatVec> coeff; // per cone, in wedge^p chart coordinates
};

// The chain (-1)^{p(p-1)/2} sum_P m_P 1_{wedge^p Span_Z P} (x) [P] of a
// balanced p-dimensional cycle.
TropChainClass weighted_chain(const WeightedCycle& c, std::size_t degree);

// Cellular boundary of the chain as a vector in C_{p,p-1}; all zero for
// cycles.
RatVec chain_boundary_vector(const TropChainClass& chain);

struct PushforwardResult {
    WeightedCycle cycle;
    BalanceReport balance;
};

// Pushforward along the monomial map with exponent matrix psi (rows are
// target coordinates). Cones whose image drops dimension contribute
// nothing; weights of surviving cones are multiplied by the index of the
// image lattice in its saturation.
PushforwardResult pushforward(const WeightedCycle& c, const std::vector<IntVec>& psi);

} // namespace tropmap
