#include "tropmap/intlattice.hpp"

#include "tropmap/errors.hpp"
#include "tropmap/exact_linalg.hpp"

#include <algorithm>
#include <cstdlib>

namespace tropmap {

namespace {

// floor division for big integers
Int fdiv(const Int& a, const Int& b) {
    Int q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

void xgcd(const Int& a, const Int& b, Int& g, Int& s, Int& t) {
    Int old_r = a, r = b;
    Int old_s = 1, s_ = 0;
    Int old_t = 0, t_ = 1;
    while (r != 0) {
        Int q = old_r / r;
        Int tmp;
        tmp = old_r - q * r; old_r = r; r = tmp;
        tmp = old_s - q * s_; old_s = s_; s_ = tmp;
        tmp = old_t - q * t_; old_t = t_; t_ = tmp;
    }
    g = old_r; s = old_s; t = old_t;
    if (g < 0) { g = -g; s = -s; t = -t; }
}

// In-place integer row HNF on the leading `lead` columns; returns the
// number of pivot rows. Rows beyond the pivots have zero leading block.
std::size_t hnf_in_place(std::vector<IntVec>& rows, std::size_t lead) {
    std::size_t m = rows.size();
    std::size_t r = 0;
    for (std::size_t col = 0; col < lead && r < m; ++col) {
        while (true) {
            std::size_t best = m;
            for (std::size_t i = r; i < m; ++i) {
                if (rows[i][col] == 0) continue;
                if (best == m || abs(rows[i][col]) < abs(rows[best][col])) best = i;
            }
            if (best == m) break;
            std::swap(rows[r], rows[best]);
            bool clean = true;
            for (std::size_t i = r + 1; i < m; ++i) {
                if (rows[i][col] == 0) continue;
                Int q = rows[i][col] / rows[r][col];
                if (q != 0)
                    for (std::size_t j = 0; j < rows[i].size(); ++j)
                        rows[i][j] -= q * rows[r][j];
                if (rows[i][col] != 0) clean = false;
            }
            if (clean) break;
        }
        if (rows[r][col] == 0) continue;
        if (rows[r][col] < 0)
            for (auto& x : rows[r]) x = -x;
        for (std::size_t i = 0; i < r; ++i) {
            Int q = fdiv(rows[i][col], rows[r][col]);
            if (q != 0)
                for (std::size_t j = 0; j < rows[i].size(); ++j)
                    rows[i][j] -= q * rows[r][j];
        }
        ++r;
    }
    return r;
}

} // namespace

IntVec primitive(const IntVec& v) {
    Int g = 0;
    for (const auto& x : v) g = gcd(g, x);
    if (g == 0) throw invariant_error("primitive-zero", "primitive of the zero vector");
    IntVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / g;
    return out;
}

std::vector<IntVec> hnf_basis(const std::vector<IntVec>& rows, std::size_t ncols) {
    std::vector<IntVec> work;
    for (const auto& row : rows) {
        if (row.size() != ncols) throw invariant_error("lattice-shape", "row length mismatch");
        work.push_back(row);
    }
    std::size_t r = hnf_in_place(work, ncols);
    work.resize(r);
    return work;
}

std::vector<IntVec> kernel_lattice(const std::vector<IntVec>& rows, std::size_t ncols) {
    std::size_t m = rows.size();
    // Rows of [A^T | I]; after HNF on the left block, rows with zero left
    // part carry a basis of {x : A x = 0} in the right part.
    std::vector<IntVec> work(ncols, IntVec(m + ncols));
    for (std::size_t j = 0; j < ncols; ++j) {
        for (std::size_t i = 0; i < m; ++i) work[j][i] = rows[i][j];
        work[j][m + j] = 1;
    }
    std::size_t r = hnf_in_place(work, m);
    std::vector<IntVec> gens;
    for (std::size_t i = r; i < work.size(); ++i)
        gens.emplace_back(work[i].begin() + m, work[i].end());
    return hnf_basis(gens, ncols);
}

std::vector<IntVec> saturate_span(const std::vector<IntVec>& rows, std::size_t ncols) {
    std::vector<RatVec> qrows;
    for (const auto& r : rows) qrows.push_back(to_rat(r));
    auto comp = kernel_basis(RatMatrix::from_rows(qrows, ncols));
    std::vector<IntVec> eqs;
    for (const auto& c : comp.basis) eqs.push_back(scale_to_int(c));
    return kernel_lattice(eqs, ncols);
}

Int lattice_index_in(const std::vector<IntVec>& sub, const std::vector<IntVec>& sup,
                     std::size_t ncols) {
    if (sub.size() != sup.size())
        throw invariant_error("lattice-index", "rank mismatch between lattices");
    std::size_t k = sub.size();
    if (k == 0) return 1;
    RatMatrix coords(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        auto c = lattice_coordinates(sup, sub[i], ncols);
        std::optional<RatVec> qc;
        {
            // rational coordinates first: membership in the QQ-span
            std::vector<RatVec> supq;
            for (const auto& s : sup) supq.push_back(to_rat(s));
            auto sys = RatMatrix::from_rows(supq, ncols).transpose();
            qc = solve(sys, to_rat(sub[i]));
        }
        if (!qc) throw invariant_error("lattice-index", "sub vector outside the span");
        if (!c) throw invariant_error("lattice-index", "sub lattice not inside sup lattice");
        for (std::size_t j = 0; j < k; ++j) coords.at(i, j) = Rat((*c)[j]);
    }
    Rat d = det(coords);
    if (d == 0) throw invariant_error("lattice-index", "sub lattice has lower rank");
    Int num = numerator(d);
    return num < 0 ? Int(-num) : num;
}

IntVec dual_partner(const IntVec& a) {
    Int g = 0;
    IntVec coeff(a.size());
    bool started = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!started) {
            if (a[i] == 0) continue;
            g = a[i];
            coeff[i] = 1;
            started = true;
            continue;
        }
        if (a[i] == 0) continue;
        Int g2, s, t;
        xgcd(g, a[i], g2, s, t);
        for (std::size_t j = 0; j < i; ++j) coeff[j] *= s;
        coeff[i] = t;
        g = g2;
    }
    if (g == 1) return coeff;
    if (g == -1) {
        for (auto& x : coeff) x = -x;
        return coeff;
    }
    throw invariant_error("dual-partner", "vector is not primitive");
}

std::optional<IntVec> lattice_coordinates(const std::vector<IntVec>& basis,
                                          const IntVec& v, std::size_t ncols) {
    std::vector<RatVec> rows;
    for (const auto& b : basis) rows.push_back(to_rat(b));
    auto sys = RatMatrix::from_rows(rows, ncols).transpose();
    auto x = solve(sys, to_rat(v));
    if (!x) return std::nullopt;
    // consistency of an underdetermined basis is a caller bug
    IntVec out(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (denominator((*x)[i]) != 1) return std::nullopt;
        out[i] = numerator((*x)[i]);
    }
    // verify (guards the underdetermined branch of solve)
    IntVec check(ncols);
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < ncols; ++j) check[j] += out[i] * basis[i][j];
    if (check != v) return std::nullopt;
    return out;
}

RatVec to_rat(const IntVec& v) {
    RatVec out;
    out.reserve(v.size());
    for (const auto& x : v) out.emplace_back(x);
    return out;
}

std::vector<RatVec> to_rat_rows(const std::vector<IntVec>& vs) {
    std::vector<RatVec> out;
    out.reserve(vs.size());
    for (const auto& v : vs) out.push_back(to_rat(v));
    return out;
}

IntVec scale_to_int(const RatVec& v) {
    Int lcm_den = 1;
    for (const auto& x : v) lcm_den = lcm(lcm_den, Int(denominator(x)));
    IntVec out(v.size());
    Int g = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = numerator(v[i]) * (lcm_den / denominator(v[i]));
        g = gcd(g, out[i]);
    }
    if (g > 1)
        for (auto& x : out) x /= g;
    return out;
}

} // namespace tropmap
