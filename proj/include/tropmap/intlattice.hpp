#ifndef TROPMAP_INTLATTICE_HPP
#define TROPMAP_INTLATTICE_HPP

#include "tropmap/rational.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace tropmap {

// Divides out the (positive) gcd of the entries. The zero vector is
// rejected. Signs of the entries are preserved.
IntVec primitive(const IntVec& v);

// Row-style Hermite normal form of the lattice spanned by the given rows:
// canonical basis with positive pivots and reduced entries above them.
// Zero rows are dropped; the result is a basis of the spanned lattice.
std::vector<IntVec> hnf_basis(const std::vector<IntVec>& rows, std::size_t ncols);

// ZZ-basis of {x in ZZ^ncols : rows . x = 0}. The kernel of an integer
// matrix is saturated by construction. Canonicalized via hnf_basis.
std::vector<IntVec> kernel_lattice(const std::vector<IntVec>& rows, std::size_t ncols);

// Canonical basis of (QQ-span of rows) intersect ZZ^ncols.
std::vector<IntVec> saturate_span(const std::vector<IntVec>& rows, std::size_t ncols);

// Index [span_ZZ(sup) : span_ZZ(sub)] for two bases of lattices of equal
// rank spanning the same QQ-subspace; throws if sub is not contained in sup
// or the spans differ.
Int lattice_index_in(const std::vector<IntVec>& sub, const std::vector<IntVec>& sup,
                     std::size_t ncols);

// For primitive a: some g with <a,g> = 1 (extended gcd across coordinates).
IntVec dual_partner(const IntVec& a);

// Integer coordinates of v in the given lattice basis; nullopt if v is not
// in the ZZ-span.
std::optional<IntVec> lattice_coordinates(const std::vector<IntVec>& basis,
                                          const IntVec& v, std::size_t ncols);

RatVec to_rat(const IntVec& v);
std::vector<RatVec> to_rat_rows(const std::vector<IntVec>& vs);
// Clears denominators of a rational vector to a primitive integer vector.
IntVec scale_to_int(const RatVec& v);

} // namespace tropmap

#endif
