#pragma once
// Cellular tropical homology of rational fans in partial compactifications.
//
// Every cone of a fan is one cell of the compactified support; a simplicial
// cone with rays r_1 < ... < r_d closes up to a cube with coordinates
// lambda_i along the rays, whose facets pin one lambda_j to 0 (the
// same-chart facet) or to its limit at infinity (the face in the chart of
// the orbit the ray escapes to). Coefficients are the spaces F_p.

#include "tropmap/exact_linalg.hpp"
#include "tropmap/polyfan.hpp"

#include <utility>
#include <vector>

namespace tropmap {

// F_p(P): the sum of p-th wedge powers of the spans of the cones in the
// chart of P whose closure contains P.
struct CoefSpace {
    Cone cone;
    std::size_t degree = 0;
    Subspace space; // subspace of wedge^p of the chart
    std::size_t dual_dim() const { return space.dim(); }
};

CoefSpace coefficient_space(const Fan& fan, const Cone& p, std::size_t degree);

// i_{P2 in P1}: F_p(P1) -> F_p(P2) for a face P2 of P1; the same-chart
// inclusion, composed with the wedge power of the orbit projection when
// the face lives in a deeper chart.
struct RestrictionMap {
    CoefSpace source;
    CoefSpace target;
    RatMatrix matrix; // target dim x source dim, in the canonical bases
};

RestrictionMap restriction(const Fan& fan, const Cone& p1, const Cone& p2,
                           std::size_t degree);

struct CellComplex {
    Fan fan;
    std::size_t degree = 0;
    std::vector<CoefSpace> coef;      // parallel to fan.cones
    std::vector<std::size_t> offset;  // column offset of each cell in its block
    std::vector<std::vector<std::size_t>> cells_by_dim;
    std::vector<std::size_t> block_dim; // dim C_{p,q} per q
    std::vector<RatMatrix> boundary;    // boundary[q]: C_{p,q} -> C_{p,q-1}
};

// Throws invariant_error("non-simplicial") on fans with non-simplicial
// cones and invariant_error("boundary-square") if the assembled boundary
// fails to square to zero.
CellComplex build_complex(const Fan& fan, std::size_t degree);

struct HomologyResult {
    std::size_t degree = 0;
    std::vector<long> ranks; // ranks[q] = dim H_{p,q}; over Q this is also H^{p,q}
};

HomologyResult homology(const CellComplex& cc);

// dim F^p(0) together with the annihilator J0 of F_p(0) inside wedge^p M_Q;
// the fan presentation of the degree-p tropical K-group.
std::pair<std::size_t, Subspace> tropical_K_F0(const Fan& fan, std::size_t degree);

} // namespace tropmap
