#pragma once
// Lagerberg superform calculus on open subsets of a partially compactified
// vector space: construction, the differentials d' and d'', wedge products,
// verification of the boundary condition across orbit charts, and
// integration over tropical chains.
//
// Coefficient functions are finite sums of
//
//     c * x^e * prod_k  b(u_k)^m_k (1 - u_k^2)^{-j_k},
//
// one factor per selected coordinate, where b(u) = exp(-1/(1-u^2)) is the
// standard bump (zero outside |u| < 1) and u_k is an affine rescaling of a
// single chart coordinate. The class is closed under partial derivatives
// and under affine substitution of a single coordinate, which is what the
// symbolic identities and the exact integration paths rely on.

#include "tropmap/cycles.hpp"
#include "tropmap/exact_linalg.hpp"
#include "tropmap/polyfan.hpp"

#include <cstddef>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

namespace tropmap {

struct BumpFactor {
    std::size_t coord = 0;
    Rat center = 0;
    Rat radius = 1;    // support is |x_coord - center| < radius
    long bump_exp = 1; // power of b(u)
    long inv_exp = 0;  // power of (1 - u^2)^{-1}

    auto tie() const { return std::tie(coord, center, radius, bump_exp, inv_exp); }
    bool operator==(const BumpFactor& o) const = default;
};

struct CoefTerm {
    Rat c = 0;
    IntVec expo;                     // monomial exponents, one per coordinate
    std::vector<BumpFactor> factors; // sorted by coord, at most one per coord
};

// A coefficient function as a normalized sum of terms.
using CoefProfile = std::vector<CoefTerm>;

CoefProfile profile_normalize(CoefProfile p);
CoefProfile profile_add(const CoefProfile& a, const CoefProfile& b);
// Throws invariant_error("profile-product") when a coordinate carries bump
// windows that differ between the factors; equal windows multiply by adding
// exponents.
CoefProfile profile_mul(const CoefProfile& a, const CoefProfile& b);
CoefProfile profile_scale(const Rat& s, const CoefProfile& p);
CoefProfile profile_derivative(const CoefProfile& p, std::size_t coord);
double profile_eval(const CoefProfile& p, const std::vector<double>& x);
bool profile_is_polynomial(const CoefProfile& p);

// One summand alpha_{I,J} d'x_I (x) d''x_J; index sets strictly increasing.
struct FormTerm {
    std::vector<std::size_t> I;
    std::vector<std::size_t> J;
    CoefProfile coef;
};

struct ChartTerms {
    std::size_t orbit = 0;
    std::size_t chart_dim = 0;
    std::vector<FormTerm> terms;
};

// A (p,q)-superform given chart by chart. A missing chart means the form
// is zero there; bidegrees exceeding the chart dimension leave no terms.
struct Superform {
    std::size_t p = 0, q = 0;
    std::vector<ChartTerms> charts; // at most one entry per orbit

    static Superform make(std::size_t p, std::size_t q,
                          std::vector<ChartTerms> charts);
    const ChartTerms* chart(std::size_t orbit) const;
};

// id (x) d: degree (p, q+1).
Superform d_double_prime(const Superform& f);
// (-1)^q d (x) id: degree (p+1, q).
Superform d_prime(const Superform& f);
// Degree (p+p', q+q') with the sign (-1)^{p q'} on each term pair.
Superform wedge(const Superform& a, const Superform& b);
Superform form_add(const Superform& a, const Superform& b);
Superform form_scale(const Rat& s, const Superform& f);
bool form_is_zero(const Superform& f);

struct BoundaryWitness {
    std::size_t sigma_orbit = 0;
    std::size_t tau_orbit = 0;
    std::vector<double> point; // tau-chart coordinates
};

struct BoundaryVerdict {
    bool pass = true;
    std::optional<BoundaryWitness> witness;
};

// Checks, for every pair of declared charts tau < sigma of the fan's
// ambient, that the sigma-chart form pulled back along the orbit
// projection agrees with the tau-chart form near the sigma-boundary.
// Symbolic agreement (exact substitution, available when bump windows ride
// single coordinates of the projection) settles a pair; otherwise a grid
// of deep sample points decides numerically at tolerance 1e-9.
BoundaryVerdict boundary_condition_check(const Superform& f, const Fan& fan);

// Affine parametrization of one integration cell:
// x(t) = base + sum_k t_k * directions[k], with t_k in [lo_k, hi_k] and an
// absent hi meaning an unbounded parameter.
struct CellMap {
    std::size_t orbit = 0;
    RatVec base;
    std::vector<IntVec> directions;
    std::vector<std::pair<Rat, std::optional<Rat>>> range;
};

// Exact value when every contributing coefficient is polynomial on the
// cell and all parameters are bounded; nullopt when quadrature is needed.
// v is the wedge^p coefficient paired against d'x_I.
std::optional<Rat> integrate_cell_exact(const CellMap& cell, const RatVec& v,
                                        const Superform& f);

// The pairing <d'x_I, v> times int alpha_{I,J} dx_J over the cell, summed
// over terms of the chart. Polynomial integrands over bounded windows are
// integrated exactly; bump-supported integrands use composite
// Gauss-Legendre over the support box. Throws
// invariant_error("divergent-integral") when an unbounded parameter is not
// confined by any bump window.
double integrate_cell(const CellMap& cell, const RatVec& v, const Superform& f);

// Integral of a (q,q)-form against a weighted chain: cells are the
// top-dimensional cones with their sorted-ray parametrizations.
double integrate(const TropChainClass& chain, const Superform& f);

} // namespace tropmap
