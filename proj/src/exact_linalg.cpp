#include "tropmap/exact_linalg.hpp"

#include "tropmap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tropmap {

double to_double(const Rat& x) { return x.convert_to<double>(); }

Rat parse_rational(const std::string& s) {
    if (s.empty()) throw parse_error("empty rational literal");
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            Int num(s.substr(0, slash));
            Int den(s.substr(slash + 1));
            if (den == 0) throw parse_error("zero denominator in '" + s + "'");
            return Rat(num, den);
        }
        auto dot = s.find('.');
        if (dot == std::string::npos) return Rat(Int(s));
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t frac_len = s.size() - dot - 1;
        Int den = 1;
        for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
        bool neg = !digits.empty() && digits[0] == '-';
        if (neg) digits = digits.substr(1);
        if (digits.empty()) throw parse_error("malformed rational '" + s + "'");
        Rat r(Int(digits), den);
        return neg ? -r : r;
    } catch (const std::exception& e) {
        throw parse_error("malformed rational '" + s + "'");
    }
}

std::string format_rational(const Rat& x) {
    std::ostringstream os;
    os << numerator(x);
    if (denominator(x) != 1) os << "/" << denominator(x);
    return os.str();
}

RatMatrix RatMatrix::identity(std::size_t n) {
    RatMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

RatMatrix RatMatrix::from_rows(const std::vector<RatVec>& rows, std::size_t cols) {
    RatMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols)
            throw invariant_error("matrix-shape", "row length mismatch");
        for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = rows[i][j];
    }
    return m;
}

RatVec RatMatrix::row(std::size_t i) const {
    RatVec v(cols_);
    for (std::size_t j = 0; j < cols_; ++j) v[j] = at(i, j);
    return v;
}

std::vector<RatVec> RatMatrix::row_vectors() const {
    std::vector<RatVec> out;
    out.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out.push_back(row(i));
    return out;
}

RatMatrix RatMatrix::transpose() const {
    RatMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
}

RatMatrix RatMatrix::mul(const RatMatrix& other) const {
    if (cols_ != other.rows_) throw invariant_error("matrix-shape", "product shape mismatch");
    RatMatrix out(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            if (at(i, k) == 0) continue;
            for (std::size_t j = 0; j < other.cols_; ++j)
                out.at(i, j) += at(i, k) * other.at(k, j);
        }
    return out;
}

RatVec RatMatrix::apply(const RatVec& x) const {
    if (x.size() != cols_) throw invariant_error("matrix-shape", "apply shape mismatch");
    RatVec out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out[i] += at(i, j) * x[j];
    return out;
}

bool RatMatrix::is_zero() const {
    for (const auto& x : data_)
        if (x != 0) return false;
    return true;
}

RatMatrix rref(const RatMatrix& m, std::vector<std::size_t>* pivots) {
    RatMatrix a = m;
    std::size_t pr = 0;
    if (pivots) pivots->clear();
    for (std::size_t col = 0; col < a.cols() && pr < a.rows(); ++col) {
        std::size_t piv = pr;
        while (piv < a.rows() && a.at(piv, col) == 0) ++piv;
        if (piv == a.rows()) continue;
        if (piv != pr)
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a.at(piv, j), a.at(pr, j));
        Rat inv = 1 / a.at(pr, col);
        for (std::size_t j = col; j < a.cols(); ++j) a.at(pr, j) *= inv;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == pr || a.at(i, col) == 0) continue;
            Rat f = a.at(i, col);
            for (std::size_t j = col; j < a.cols(); ++j) a.at(i, j) -= f * a.at(pr, j);
        }
        if (pivots) pivots->push_back(col);
        ++pr;
    }
    return a;
}

int rank(const RatMatrix& m) {
    std::vector<std::size_t> piv;
    rref(m, &piv);
    return int(piv.size());
}

Subspace Subspace::zero(std::size_t ambient) {
    Subspace s;
    s.ambient = ambient;
    return s;
}

Subspace Subspace::span_of(const std::vector<RatVec>& vectors, std::size_t ambient) {
    auto m = RatMatrix::from_rows(vectors, ambient);
    std::vector<std::size_t> piv;
    auto r = rref(m, &piv);
    Subspace s;
    s.ambient = ambient;
    for (std::size_t i = 0; i < piv.size(); ++i) s.basis.push_back(r.row(i));
    return s;
}

Subspace Subspace::full(std::size_t ambient) {
    return span_of(RatMatrix::identity(ambient).row_vectors(), ambient);
}

bool Subspace::contains(const RatVec& v) const {
    return coordinates_of(v).has_value();
}

bool Subspace::contains_subspace(const Subspace& other) const {
    for (const auto& b : other.basis)
        if (!contains(b)) return false;
    return true;
}

std::optional<RatVec> Subspace::coordinates_of(const RatVec& v) const {
    if (v.size() != ambient) throw invariant_error("subspace-ambient", "vector dimension mismatch");
    // Basis rows are RREF: coordinates can be read off at the pivot columns,
    // then the residual must vanish.
    RatVec coords(basis.size());
    RatVec resid = v;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        std::size_t pivcol = 0;
        while (pivcol < ambient && basis[i][pivcol] == 0) ++pivcol;
        coords[i] = resid[pivcol];
        if (coords[i] != 0)
            for (std::size_t j = 0; j < ambient; ++j) resid[j] -= coords[i] * basis[i][j];
    }
    for (const auto& x : resid)
        if (x != 0) return std::nullopt;
    return coords;
}

Subspace kernel_basis(const RatMatrix& m) {
    std::vector<std::size_t> piv;
    auto r = rref(m, &piv);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : piv) is_pivot[c] = true;
    std::vector<RatVec> gens;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        RatVec v(m.cols());
        v[free] = 1;
        for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -r.at(i, free);
        gens.push_back(v);
    }
    return Subspace::span_of(gens, m.cols());
}

Subspace subspace_sum(const Subspace& a, const Subspace& b) {
    if (a.ambient != b.ambient) throw invariant_error("subspace-ambient", "sum ambient mismatch");
    auto gens = a.basis;
    gens.insert(gens.end(), b.basis.begin(), b.basis.end());
    return Subspace::span_of(gens, a.ambient);
}

Subspace subspace_intersection(const Subspace& a, const Subspace& b) {
    if (a.ambient != b.ambient)
        throw invariant_error("subspace-ambient", "intersection ambient mismatch");
    // x = u.A = w.B  <=>  (u, w) in kernel of [A^T | -B^T]
    std::size_t ka = a.dim(), kb = b.dim();
    if (ka == 0 || kb == 0) return Subspace::zero(a.ambient);
    RatMatrix sys(a.ambient, ka + kb);
    for (std::size_t j = 0; j < ka; ++j)
        for (std::size_t i = 0; i < a.ambient; ++i) sys.at(i, j) = a.basis[j][i];
    for (std::size_t j = 0; j < kb; ++j)
        for (std::size_t i = 0; i < a.ambient; ++i) sys.at(i, ka + j) = -b.basis[j][i];
    auto ker = kernel_basis(sys);
    std::vector<RatVec> gens;
    for (const auto& uw : ker.basis) {
        RatVec x(a.ambient);
        for (std::size_t j = 0; j < ka; ++j)
            for (std::size_t i = 0; i < a.ambient; ++i) x[i] += uw[j] * a.basis[j][i];
        gens.push_back(x);
    }
    return Subspace::span_of(gens, a.ambient);
}

Rat det(const RatMatrix& m) {
    if (m.rows() != m.cols()) throw invariant_error("matrix-shape", "det of non-square matrix");
    RatMatrix a = m;
    Rat d = 1;
    std::size_t n = a.rows();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a.at(piv, col) == 0) ++piv;
        if (piv == n) return 0;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a.at(piv, j), a.at(col, j));
            d = -d;
        }
        d *= a.at(col, col);
        Rat inv = 1 / a.at(col, col);
        for (std::size_t i = col + 1; i < n; ++i) {
            if (a.at(i, col) == 0) continue;
            Rat f = a.at(i, col) * inv;
            for (std::size_t j = col; j < n; ++j) a.at(i, j) -= f * a.at(col, j);
        }
    }
    return d;
}

std::optional<RatVec> solve(const RatMatrix& a, const RatVec& b) {
    if (b.size() != a.rows()) throw invariant_error("matrix-shape", "solve shape mismatch");
    RatMatrix aug(a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
        aug.at(i, a.cols()) = b[i];
    }
    std::vector<std::size_t> piv;
    auto r = rref(aug, &piv);
    for (auto c : piv)
        if (c == a.cols()) return std::nullopt; // inconsistent
    RatVec x(a.cols());
    for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = r.at(i, a.cols());
    return x;
}

WedgeIndex::WedgeIndex(std::size_t n, std::size_t p) : n_(n), p_(p) {
    if (p > n) return;
    std::vector<std::size_t> cur(p);
    auto rec = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
        if (depth == p_) { subsets_.push_back(cur); return; }
        for (std::size_t i = start; i + (p_ - depth) <= n_; ++i) {
            cur[depth] = i;
            self(self, i + 1, depth + 1);
        }
    };
    rec(rec, 0, 0);
}

std::size_t WedgeIndex::index_of(const std::vector<std::size_t>& sorted) const {
    auto it = std::lower_bound(subsets_.begin(), subsets_.end(), sorted);
    if (it == subsets_.end() || *it != sorted)
        throw invariant_error("wedge-index", "subset not in range");
    return std::size_t(it - subsets_.begin());
}

RatVec wedge_of_vectors(const std::vector<RatVec>& vs, std::size_t n) {
    std::size_t p = vs.size();
    WedgeIndex wi(n, p);
    RatVec out(wi.size());
    for (std::size_t k = 0; k < wi.size(); ++k) {
        const auto& cols = wi.subset(k);
        RatMatrix minor(p, p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) minor.at(i, j) = vs[i][cols[j]];
        out[k] = det(minor);
    }
    return out;
}

Subspace wedge_power_span(const Subspace& v, std::size_t p) {
    WedgeIndex wi(v.ambient, p);
    if (p == 0) return Subspace::span_of({RatVec{Rat(1)}}, 1);
    if (p > v.dim()) return Subspace::zero(wi.size());
    std::vector<RatVec> gens;
    WedgeIndex pick(v.dim(), p);
    for (std::size_t k = 0; k < pick.size(); ++k) {
        std::vector<RatVec> chosen;
        for (auto idx : pick.subset(k)) chosen.push_back(v.basis[idx]);
        gens.push_back(wedge_of_vectors(chosen, v.ambient));
    }
    return Subspace::span_of(gens, wi.size());
}

RatMatrix wedge_power_matrix(const RatMatrix& a, std::size_t p) {
    WedgeIndex rows(a.rows(), p), cols(a.cols(), p);
    RatMatrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) {
            RatMatrix minor(p, p);
            for (std::size_t r = 0; r < p; ++r)
                for (std::size_t c = 0; c < p; ++c)
                    minor.at(r, c) = a.at(rows.subset(i)[r], cols.subset(j)[c]);
            out.at(i, j) = det(minor);
        }
    return out;
}

std::optional<Rat> rational_reconstruct(double x, long max_den, double tol) {
    if (!std::isfinite(x) || max_den < 1 || tol < 0) return std::nullopt;

    // Continued-fraction walk collecting convergents and the largest
    // admissible semiconvergent at the denominator cap.
    std::vector<Rat> candidates;
    Int h_prev2 = 0, k_prev2 = 1; // h_{-2}/k_{-2}
    Int h_prev = 1, k_prev = 0;   // h_{-1}/k_{-1}
    double y = x;
    for (int iter = 0; iter < 64; ++iter) {
        double fl = std::floor(y);
        if (fl > 1e17 || fl < -1e17) break;
        Int a(static_cast<long long>(fl));
        Int h_new = a * h_prev + h_prev2;
        Int k_new = a * k_prev + k_prev2;
        if (k_new > max_den) {
            // semiconvergent: largest t with t*k_prev + k_prev2 <= max_den
            Int t = (Int(max_den) - k_prev2) / k_prev;
            if (t >= 1) candidates.emplace_back(t * h_prev + h_prev2, t * k_prev + k_prev2);
            break;
        }
        candidates.emplace_back(h_new, k_new);
        h_prev2 = h_prev; k_prev2 = k_prev;
        h_prev = h_new; k_prev = k_new;
        double frac = y - fl;
        if (frac < 1e-15) break;
        y = 1.0 / frac;
    }

    std::optional<Rat> best;
    double best_err = 0;
    for (const auto& c : candidates) {
        if (denominator(c) > max_den) continue;
        double err = std::fabs(x - to_double(c));
        if (err <= tol && (!best || err < best_err)) {
            best = c;
            best_err = err;
        }
    }
    return best;
}

} // namespace tropmap
