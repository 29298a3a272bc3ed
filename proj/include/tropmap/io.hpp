#pragma once
// JSON description documents for fans, cycles, polynomials, superforms,
// parametrized chains, and semialgebraic sets, plus the file utilities the
// command line reports use. Loaders check document shape and throw
// parse_error on violations; semantic invariants stay with the module
// constructors, so a well-formed document describing an invalid object
// still surfaces an invariant_error with the violated invariant named.

#include "tropmap/analytic.hpp"
#include "tropmap/cycles.hpp"
#include "tropmap/polyfan.hpp"
#include "tropmap/satrop.hpp"
#include "tropmap/superform.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace tropmap {

inline constexpr const char* toolkit_version = "0.1.0";

using Json = nlohmann::json;

// 64-bit FNV-1a of the raw bytes, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

// Whole file contents; parse_error naming the path when unreadable.
std::string read_file(const std::string& path);

// read_file plus JSON parsing; parse_error naming the path on bad syntax.
Json load_json_file(const std::string& path);

// Exact rationals travel as integers or "p/q" strings; floats are
// rejected so no document silently loses exactness.
Rat rat_from_json(const Json& j);
Json rat_to_json(const Rat& r);

// Fan document: { lattice_rank, rays: [[int]], cones: [...], ambient? }.
// A cone is a list of indices into the rays table (zero-orbit chart) or
// an object { orbit, rays: [[int]] } with explicit chart coordinates for
// boundary cones. The optional ambient is { rank, rays, cones } with
// cones as ray-index lists.
Fan fan_from_json(const Json& j);
Json fan_to_json(const Fan& f);

// Cycle document: the fan fields plus dim, weights (one rational per
// cone, in the listed cone order), and optional orientations
// [{ cone: index, generator: [int] }].
WeightedCycle cycle_from_json(const Json& j);
Json cycle_to_json(const WeightedCycle& c);

// Polynomial document: [[coeff, [exponent...]], ...].
std::vector<PolyTerm> poly_from_json(const Json& j);

// Superform document: { p, q, charts: [{ sigma, chart_dim, terms }] }
// with terms [{ I, J, poly: [[coeff, expo]], bump: [{coord, center,
// radius, bump_exp?, inv_exp?}] }]; the bump list applies to every
// monomial of the term's polynomial part.
Superform superform_from_json(const Json& j);

// Chain document: { torus_dim, dim, charts, boundary? }. Charts carry
// params (names for the box axes), box, coords as prefix expression
// trees, orientation, multiplicity, log_abs rows, and product-structure
// annotations near named rays. Expression leaves are numbers (real
// constants), the reserved name "i", or parameter names; interior nodes
// are ["add"|"sub"|"mul"|"div"|"polar", a, b], ["exp"|"log", a], or
// ["complex", re, im].
ParamChain chain_from_json(const Json& j);

// Monomial list document: [[int exponent vector], ...].
std::vector<IntVec> monomials_from_json(const Json& j);

// Semialgebraic set document: { n, m, constraints: [{ poly, rel }] }
// with rel one of "ge", "gt", "eq".
SemialgSet set_from_json(const Json& j);

} // namespace tropmap
