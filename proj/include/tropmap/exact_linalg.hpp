#ifndef TROPMAP_EXACT_LINALG_HPP
#define TROPMAP_EXACT_LINALG_HPP

#include "tropmap/rational.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace tropmap {

/**
 * Dense matrix over the rationals. All elimination routines produce the
 * canonical reduced row echelon form (unit pivots, zeros above and below,
 * pivot columns scanned left to right), so equal row spaces always yield
 * identical output and subspace comparisons are decidable.
 */
class RatMatrix {
public:
    RatMatrix() : rows_(0), cols_(0) {}
    RatMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    static RatMatrix identity(std::size_t n);
    static RatMatrix from_rows(const std::vector<RatVec>& rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rat& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rat& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    RatVec row(std::size_t i) const;
    std::vector<RatVec> row_vectors() const;
    RatMatrix transpose() const;
    RatMatrix mul(const RatMatrix& other) const;
    RatVec apply(const RatVec& x) const;
    bool is_zero() const;

    bool operator==(const RatMatrix& other) const = default;

private:
    std::size_t rows_, cols_;
    std::vector<Rat> data_;
};

/**
 * Linear subspace of QQ^ambient. The basis is stored in canonical reduced
 * row echelon form; two Subspace values are equal as sets iff the stored
 * bases are identical.
 */
struct Subspace {
    std::size_t ambient = 0;
    std::vector<RatVec> basis; // canonical RREF rows, linearly independent

    static Subspace zero(std::size_t ambient);
    static Subspace span_of(const std::vector<RatVec>& vectors, std::size_t ambient);
    static Subspace full(std::size_t ambient);

    std::size_t dim() const { return basis.size(); }
    bool contains(const RatVec& v) const;
    bool contains_subspace(const Subspace& other) const;
    // Coordinates of v in the stored basis; nullopt if v lies outside.
    std::optional<RatVec> coordinates_of(const RatVec& v) const;

    bool operator==(const Subspace& other) const = default;
};

// Reduced row echelon form; if pivots is non-null it receives the pivot
// column indices in order.
RatMatrix rref(const RatMatrix& m, std::vector<std::size_t>* pivots = nullptr);

int rank(const RatMatrix& m);

// Basis of the right kernel {x : m x = 0}, canonicalized.
Subspace kernel_basis(const RatMatrix& m);

Subspace subspace_sum(const Subspace& a, const Subspace& b);
Subspace subspace_intersection(const Subspace& a, const Subspace& b);

// Determinant of a square matrix (fraction-free not required at this scale).
Rat det(const RatMatrix& m);

// Solves A x = b; nullopt when inconsistent. If the system is
// underdetermined the solution with zero free variables is returned.
std::optional<RatVec> solve(const RatMatrix& a, const RatVec& b);

/**
 * Enumeration of the sorted p-element subsets of {0,..,n-1} in
 * lexicographic order; provides the index <-> subset bijection used for
 * coordinates on wedge powers.
 */
class WedgeIndex {
public:
    WedgeIndex(std::size_t n, std::size_t p);
    std::size_t size() const { return subsets_.size(); }
    std::size_t n() const { return n_; }
    std::size_t p() const { return p_; }
    const std::vector<std::size_t>& subset(std::size_t k) const { return subsets_[k]; }
    // Index of a sorted subset.
    std::size_t index_of(const std::vector<std::size_t>& sorted) const;

private:
    std::size_t n_, p_;
    std::vector<std::vector<std::size_t>> subsets_;
};

// Wedge of p vectors in QQ^n as coordinates in the sorted-subset basis of
// wedge^p QQ^n (entries are the p x p minors).
RatVec wedge_of_vectors(const std::vector<RatVec>& vs, std::size_t n);

// Image of a subspace under wedge^p: span of all p-fold wedges of basis
// vectors. For a k-dimensional input the result has dimension C(k,p).
Subspace wedge_power_span(const Subspace& v, std::size_t p);

// Matrix of wedge^p(A) in sorted-subset coordinates (rows: p-subsets of
// target axes, cols: p-subsets of source axes; entries are minors).
RatMatrix wedge_power_matrix(const RatMatrix& a, std::size_t p);

/**
 * Nearest rational with denominator <= max_den within tol of x, found by
 * walking the continued-fraction convergents (semiconvergents included);
 * nullopt when no such rational exists.
 */
std::optional<Rat> rational_reconstruct(double x, long max_den, double tol);

} // namespace tropmap

#endif
