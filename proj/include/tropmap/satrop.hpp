#pragma once
// Positive-part machinery for semi-algebraic sets: exponential basic
// cones, sampled logarithmic limit sets, the minimal-monomial dichotomy
// for orbit meeting, and phase boundary slices of parametrized chains.
//
// Logarithmic limit sets are approximated by seeded sampling and reported
// as direction clusters; the output is an approximation, never a
// certificate. Exact cell decompositions are out of scope.

#include "tropmap/analytic.hpp"
#include "tropmap/cycles.hpp"
#include "tropmap/exact_linalg.hpp"

#include <cstddef>
#include <vector>

namespace tropmap {

// The region {a in (0,h]^r : a_i <= a_{i+1}^{N_i}}, a cusp probe for the
// boundary behavior of definable sets near the coordinate divisors.
// Growing any N_i or shrinking h cuts a deeper cusp (for h <= 1 the sets
// are nested accordingly).
struct ExpBasicCone {
    std::size_t r = 0;
    std::vector<double> N; // r-1 entries, all positive
    double h = 1.0;
};

// Membership test; follows the definition literally, boundary included.
// Malformed cones (wrong N length, nonpositive N or h) are rejected with
// invariant_error("cone-shape").
bool in_exp_cone(const std::vector<double>& a, const ExpBasicCone& c);

enum class Rel { ge, gt, eq };

struct Constraint {
    std::vector<PolyTerm> poly; // exponent vectors of length n + m
    Rel rel = Rel::ge;
};

// A constraint set in R^n_{>0} x R^m. The first n coordinates are the
// positive ones; negative exponents are meaningful only there.
struct SemialgSet {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<Constraint> constraints;
};

// Unit directions in R^n accumulated from deep samples and merged into
// clusters of angular radius tol; weight counts the samples absorbed.
struct DirectionCloud {
    std::vector<std::vector<double>> dir;
    std::vector<double> weight;
    double tol = 0.05;
};

// Samples points of S whose -log image (on the positive part) has norm at
// least the current radius, walking the given non-increasing radius
// schedule, and clusters the observed directions. Equality constraints
// are honored by a damped Gauss-Newton projection in log coordinates;
// inequalities by rejection. Raises numeric_error when no point of S at
// all is found within the budget; a set whose points simply stay inside
// every radius yields an empty cloud.
DirectionCloud log_limit_sample(const SemialgSet& S, const std::vector<double>& radii,
                                std::size_t samples, unsigned seed,
                                double cluster_tol = 0.05);

enum class OrbitVerdict { meets_fully, empty, indeterminate };

// Whether the closure of S meets the orbit of the ray direction w: each
// constraint is reduced to the terms of minimal <exponent, w>. A unique
// minimal monomial free of the R^m variables decides: for inequalities a
// negative coefficient empties the intersection and a positive one is
// neutral, for equalities any nonzero coefficient empties it; the verdict
// is meets_fully when every constraint is neutral. Ties (checked exactly
// through a continued-fraction approximation of w with denominators up to
// 10^6) and minimal monomials involving the R^m variables are
// indeterminate. Strict inequalities are tested through their closure.
OrbitVerdict orbit_meets(const SemialgSet& S, const std::vector<double>& w);

// Boundary slice of the chain at the divisor named by a coordinate ray:
// every chart with a declared product structure for the ray contributes
// the chart with its approach axis frozen at the divisor end (walked
// inward to the nearest representable value), orientation adjusted by the
// boundary sign of peeling that axis. The radial part of the slice sits
// at the frozen modulus; the phase circle survives, so pairing the slice
// with log_integral against the ray monomial recovers the face-map
// weight. Charts without a declaration must stay away from the divisor.
ParamChain phase_boundary_slice(const ParamChain& V, const IntVec& ray);

} // namespace tropmap
