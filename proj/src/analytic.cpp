#include "tropmap/analytic.hpp"

#include "tropmap/errors.hpp"
#include "tropmap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace tropmap {

namespace {

const double PI = 3.14159265358979323846;

// -1/(2 pi i) = i/(2 pi), the closed holomorphic period normalization.
const Cpx HOLO{0.0, 1.0 / (2.0 * PI)};

Cpx pairwise_sum(std::vector<Cpx>& xs, std::size_t lo, std::size_t hi) {
    if (hi - lo == 0) return {0.0, 0.0};
    if (hi - lo == 1) return xs[lo];
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(xs, lo, mid) + pairwise_sum(xs, mid, hi);
}

Cpx pairwise_sum(std::vector<Cpx> xs) { return pairwise_sum(xs, 0, xs.size()); }

double eval_factor(const BumpFactor& f, double x) {
    double u = (x - to_double(f.center)) / to_double(f.radius);
    if (!(std::abs(u) < 1.0)) return 0.0;
    double s = 1.0 - u * u;
    double v = 1.0;
    for (long i = 0; i < f.bump_exp; ++i) v *= std::exp(-1.0 / s);
    for (long i = 0; i < f.inv_exp; ++i) v /= s;
    return v;
}

double eval_term(const CoefTerm& t, const std::vector<double>& x) {
    double v = to_double(t.c);
    for (std::size_t i = 0; i < t.expo.size(); ++i) {
        long e = t.expo[i].convert_to<long>();
        for (long k = 0; k < e; ++k) v *= x[i];
    }
    for (const auto& f : t.factors) v *= eval_factor(f, x[f.coord]);
    return v;
}

Cpx det_small(std::vector<std::vector<Cpx>> m) {
    std::size_t n = m.size();
    Cpx d{1.0, 0.0};
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (m[piv][c] == Cpx(0.0, 0.0)) return {0.0, 0.0};
        if (piv != c) {
            std::swap(m[piv], m[c]);
            d = -d;
        }
        d *= m[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            Cpx f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return d;
}

} // namespace

void validate_chain(const ParamChain& V) {
    for (const auto& c : V.charts) {
        if (c.box.size() != V.dim)
            throw invariant_error("chain-shape",
                                  "chart box rank disagrees with the chain dimension");
        if (c.coords.size() != V.torus_dim)
            throw invariant_error("chain-shape",
                                  "one coordinate tree per torus coordinate is required");
        if (c.orientation != 1 && c.orientation != -1)
            throw invariant_error("chain-shape", "orientation must be +1 or -1");
        if (c.log_abs.size() > V.torus_dim)
            throw invariant_error("chain-shape",
                                  "log row list longer than the coordinate list");
        for (const auto& row : c.log_abs)
            if (row && row->row.size() != V.dim)
                throw invariant_error("chain-shape",
                                      "log row length disagrees with the box rank");
        for (const auto& [lo, hi] : c.box)
            if (!(lo <= hi))
                throw invariant_error("chain-shape", "empty box range");
    }
}

std::pair<std::size_t, int> coordinate_ray_axis(const IntVec& ray) {
    std::optional<std::size_t> j;
    int sgn = 0;
    for (std::size_t k = 0; k < ray.size(); ++k) {
        if (ray[k] == 0) continue;
        if (j || (ray[k] != 1 && ray[k] != -1))
            throw invariant_error("product-structure",
                                  "face maps support only coordinate rays");
        j = k;
        sgn = ray[k] > 0 ? 1 : -1;
    }
    if (!j)
        throw invariant_error("product-structure",
                              "face maps support only coordinate rays");
    return {*j, sgn};
}

namespace {

// Spot-check every declared -log|z_j| row at the box midpoint and near the
// ends of each axis; samples where z_j leaves the representable range are
// skipped, but at least one must survive.
void check_log_rows(const ParamChain& V) {
    for (const auto& c : V.charts) {
        std::vector<double> mid(V.dim);
        for (std::size_t a = 0; a < V.dim; ++a)
            mid[a] = 0.5 * (c.box[a].first + c.box[a].second);
        std::vector<std::vector<double>> samples = {mid};
        for (std::size_t a = 0; a < V.dim; ++a) {
            double w = c.box[a].second - c.box[a].first;
            auto s1 = mid, s2 = mid;
            s1[a] = c.box[a].first + 0.05 * w;
            s2[a] = c.box[a].second - 0.05 * w;
            samples.push_back(s1);
            samples.push_back(s2);
        }
        for (std::size_t j = 0; j < c.log_abs.size(); ++j) {
            if (!c.log_abs[j]) continue;
            const LogAffine& la = *c.log_abs[j];
            std::size_t valid = 0;
            for (const auto& t : samples) {
                double mag = std::abs(expr_eval(c.coords[j], t).value);
                if (!(mag > 0.0) || !std::isfinite(mag)) continue;
                double actual = -std::log(mag);
                double pred = la.offset;
                for (std::size_t a = 0; a < V.dim; ++a) pred += la.row[a] * t[a];
                if (std::abs(actual - pred) > 1e-6 * std::max(1.0, std::abs(actual)))
                    throw invariant_error("log-profile",
                                          "declared log row disagrees with the chart");
                ++valid;
            }
            if (valid == 0)
                throw invariant_error("log-profile",
                                      "no representable sample to validate the row");
        }
    }
}

using Box = std::vector<std::pair<double, double>>;

// Intersects the chart box with the parameter windows that the bump
// factors of the term cut out through declared log rows; nullopt when the
// term cannot meet the chart.
std::optional<Box> term_window(const ChainChart& c, const CoefTerm& t, double eps) {
    Box b = c.box;
    for (const auto& f : t.factors) {
        if (f.coord >= c.log_abs.size() || !c.log_abs[f.coord]) continue;
        const LogAffine& la = *c.log_abs[f.coord];
        double lo = (to_double(f.center) - to_double(f.radius)) / eps - la.offset;
        double hi = (to_double(f.center) + to_double(f.radius)) / eps - la.offset;
        std::vector<std::size_t> nz;
        for (std::size_t k = 0; k < la.row.size(); ++k)
            if (la.row[k] != 0.0) nz.push_back(k);
        if (nz.empty()) {
            if (lo >= 0.0 || hi <= 0.0) return std::nullopt;
            continue;
        }
        if (nz.size() != 1) continue; // no single-axis window to carve
        std::size_t k = nz[0];
        double wlo = lo / la.row[k], whi = hi / la.row[k];
        if (wlo > whi) std::swap(wlo, whi);
        b[k].first = std::max(b[k].first, wlo);
        b[k].second = std::min(b[k].second, whi);
        if (!(b[k].first < b[k].second)) return std::nullopt;
    }
    return b;
}

struct QuadOut {
    Cpx value;
    double error = 0;
};

// Composite tensor Gauss-Legendre with dyadic panel refinement; the
// refinement difference is the error estimate.
template <class F>
QuadOut quad_box(const Box& box, const QuadratureCfg& cfg, F&& f) {
    auto guard = [&](Cpx v) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw numeric_error("integrand is not finite on the chart");
        if (std::abs(v) > cfg.magnitude_budget)
            throw numeric_error("integrand magnitude exceeded the admissibility budget");
        return v;
    };
    if (box.empty()) return {guard(f(std::vector<double>{})), 0.0};
    const GaussRule& rule = gauss_legendre(cfg.gl_order);
    Cpx prev{0.0, 0.0};
    bool have = false;
    for (std::size_t depth = 0; depth <= cfg.max_depth; ++depth) {
        std::size_t panels = std::size_t(1) << depth;
        std::size_t per_axis = panels * rule.node.size();
        double total_pts = 1;
        for (std::size_t a = 0; a < box.size(); ++a) total_pts *= double(per_axis);
        if (total_pts > 2e7)
            throw numeric_error("quadrature refinement exhausted its point budget");

        std::vector<std::vector<std::pair<double, double>>> axes(box.size());
        for (std::size_t a = 0; a < box.size(); ++a) {
            double h = (box[a].second - box[a].first) / double(panels);
            for (std::size_t p = 0; p < panels; ++p)
                for (std::size_t k = 0; k < rule.node.size(); ++k)
                    axes[a].push_back({box[a].first + h * (p + 0.5 * (rule.node[k] + 1.0)),
                                       0.5 * h * rule.weight[k]});
        }
        std::vector<Cpx> parts;
        parts.reserve(std::size_t(total_pts));
        std::vector<std::size_t> at(box.size(), 0);
        std::vector<double> t(box.size());
        for (;;) {
            double w = 1;
            for (std::size_t a = 0; a < box.size(); ++a) {
                t[a] = axes[a][at[a]].first;
                w *= axes[a][at[a]].second;
            }
            parts.push_back(w * guard(f(t)));
            std::size_t a = 0;
            while (a < box.size() && ++at[a] == per_axis) at[a++] = 0;
            if (a == box.size()) break;
        }
        Cpx cur = pairwise_sum(std::move(parts));
        if (have) {
            double diff = std::abs(cur - prev);
            if (diff <= cfg.tol * std::max(1.0, std::abs(cur))) return {cur, diff};
        }
        prev = cur;
        have = true;
    }
    throw numeric_error("quadrature refinement exhausted its depth budget");
}

std::vector<ExprJet> eval_coords(const ChainChart& c, const std::vector<double>& t) {
    std::vector<ExprJet> js;
    js.reserve(c.coords.size());
    for (const auto& e : c.coords) js.push_back(expr_eval(e, t));
    return js;
}

} // namespace

// ---------------------------------------------------------------------
// Expression trees.

static Expr node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

Expr expr_const(Cpx v) { return node({ExprOp::Constant, v, 0, nullptr, nullptr}); }
Expr expr_param(std::size_t k) { return node({ExprOp::Param, {}, k, nullptr, nullptr}); }
Expr expr_add(Expr a, Expr b) { return node({ExprOp::Add, {}, 0, std::move(a), std::move(b)}); }
Expr expr_sub(Expr a, Expr b) { return node({ExprOp::Sub, {}, 0, std::move(a), std::move(b)}); }
Expr expr_mul(Expr a, Expr b) { return node({ExprOp::Mul, {}, 0, std::move(a), std::move(b)}); }
Expr expr_div(Expr a, Expr b) { return node({ExprOp::Div, {}, 0, std::move(a), std::move(b)}); }
Expr expr_exp(Expr a) { return node({ExprOp::Exp, {}, 0, std::move(a), nullptr}); }
Expr expr_log(Expr a) { return node({ExprOp::Log, {}, 0, std::move(a), nullptr}); }
Expr expr_polar(Expr r, Expr t) { return node({ExprOp::Polar, {}, 0, std::move(r), std::move(t)}); }

ExprJet expr_eval(const Expr& e, const std::vector<double>& t) {
    if (!e) throw invariant_error("chain-shape", "empty expression tree");
    ExprJet r;
    r.d.assign(t.size(), Cpx(0.0, 0.0));
    switch (e->op) {
    case ExprOp::Constant:
        r.value = e->value;
        break;
    case ExprOp::Param:
        if (e->param >= t.size())
            throw invariant_error("chain-shape", "parameter index outside the box");
        r.value = t[e->param];
        r.d[e->param] = 1.0;
        break;
    case ExprOp::Add: {
        ExprJet a = expr_eval(e->a, t), b = expr_eval(e->b, t);
        r.value = a.value + b.value;
        for (std::size_t k = 0; k < t.size(); ++k) r.d[k] = a.d[k] + b.d[k];
        break;
    }
    case ExprOp::Sub: {
        ExprJet a = expr_eval(e->a, t), b = expr_eval(e->b, t);
        r.value = a.value - b.value;
        for (std::size_t k = 0; k < t.size(); ++k) r.d[k] = a.d[k] - b.d[k];
        break;
    }
    case ExprOp::Mul: {
        ExprJet a = expr_eval(e->a, t), b = expr_eval(e->b, t);
        r.value = a.value * b.value;
        for (std::size_t k = 0; k < t.size(); ++k)
            r.d[k] = a.d[k] * b.value + a.value * b.d[k];
        break;
    }
    case ExprOp::Div: {
        ExprJet a = expr_eval(e->a, t), b = expr_eval(e->b, t);
        r.value = a.value / b.value;
        for (std::size_t k = 0; k < t.size(); ++k)
            r.d[k] = (a.d[k] - r.value * b.d[k]) / b.value;
        break;
    }
    case ExprOp::Exp: {
        ExprJet a = expr_eval(e->a, t);
        r.value = std::exp(a.value);
        for (std::size_t k = 0; k < t.size(); ++k) r.d[k] = r.value * a.d[k];
        break;
    }
    case ExprOp::Log: {
        ExprJet a = expr_eval(e->a, t);
        r.value = std::log(a.value);
        for (std::size_t k = 0; k < t.size(); ++k) r.d[k] = a.d[k] / a.value;
        break;
    }
    case ExprOp::Polar: {
        ExprJet a = expr_eval(e->a, t), b = expr_eval(e->b, t);
        Cpx ph = std::exp(Cpx(0.0, 1.0) * b.value);
        r.value = a.value * ph;
        for (std::size_t k = 0; k < t.size(); ++k)
            r.d[k] = a.d[k] * ph + Cpx(0.0, 1.0) * r.value * b.d[k];
        break;
    }
    }
    return r;
}

// ---------------------------------------------------------------------
// Pullback evaluation.

namespace {

// Rows of the pulled-back factor matrix: antiholomorphic factors for J
// first, then holomorphic factors for I. Column k pairs against the k-th
// tangent vector, given by its complexified coordinates and their
// conjugates' role handled here.
Cpx term_pullback(const FormTerm& ft, double fval, double eps,
                  const std::vector<Cpx>& z,
                  const std::vector<std::vector<Cpx>>& cols) {
    std::size_t rows = ft.J.size() + ft.I.size();
    std::vector<std::vector<Cpx>> m(rows, std::vector<Cpx>(cols.size()));
    for (std::size_t r = 0; r < ft.J.size(); ++r) {
        std::size_t j = ft.J[r];
        for (std::size_t k = 0; k < cols.size(); ++k)
            m[r][k] = (-eps / 2.0) * std::conj(cols[k][j]) / std::conj(z[j]);
    }
    for (std::size_t r = 0; r < ft.I.size(); ++r) {
        std::size_t i = ft.I[r];
        for (std::size_t k = 0; k < cols.size(); ++k)
            m[ft.J.size() + r][k] = HOLO * cols[k][i] / z[i];
    }
    return fval * det_small(std::move(m));
}

} // namespace

Cpx pullback_eval(const Superform& w, double eps, const std::vector<Cpx>& z,
                  const std::vector<std::vector<Cpx>>& frame) {
    const ChartTerms* ch = w.chart(0);
    if (!ch) return {0.0, 0.0};
    std::size_t n = ch->chart_dim;
    if (z.size() != n)
        throw invariant_error("chain-shape", "one value per torus coordinate");
    if (frame.size() != w.p + w.q)
        throw invariant_error("chain-shape", "frame rank must match the form degree");
    for (const auto& v : frame)
        if (v.size() != n)
            throw invariant_error("chain-shape", "frame vector of the wrong dimension");
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) {
        double mag = std::abs(z[j]);
        if (!(mag > 0.0) || !std::isfinite(mag))
            throw invariant_error("chain-shape",
                                  "evaluation point must lie in the dense torus");
        x[j] = -eps * std::log(mag);
    }
    std::vector<Cpx> parts;
    for (const auto& ft : ch->terms) {
        double fval = 0;
        for (const auto& ct : ft.coef) fval += eval_term(ct, x);
        if (fval == 0.0) continue;
        parts.push_back(term_pullback(ft, fval, eps, z, frame));
    }
    return pairwise_sum(std::move(parts));
}

// ---------------------------------------------------------------------
// Integration of pullbacks.

Estimate eps_integral(const ParamChain& V, const Superform& w, double eps,
                      const QuadratureCfg& cfg) {
    if (!(eps > 0.0))
        throw invariant_error("eps-schedule", "eps must be positive");
    validate_chain(V);
    check_log_rows(V);
    if (w.p + w.q != V.dim)
        throw invariant_error("degree-mismatch",
                              "form degree must match the chain dimension");
    const ChartTerms* ch = w.chart(0);
    if (!ch) return {Cpx(0.0, 0.0), 0.0};
    if (ch->chart_dim != V.torus_dim)
        throw invariant_error("chart-mismatch", "form lives on a different torus");

    std::vector<Cpx> parts;
    double err = 0;
    Cpx mc_total{0.0, 0.0};
    double mc_var = 0;
    std::size_t piece = 0;

    for (const auto& c : V.charts) {
        double om = double(c.orientation) * to_double(c.multiplicity);
        for (const auto& ft : ch->terms) {
            for (const auto& ct : ft.coef) {
                ++piece;
                auto win = term_window(c, ct, eps);
                if (!win) continue;
                auto f = [&](const std::vector<double>& t) -> Cpx {
                    auto js = eval_coords(c, t);
                    std::vector<Cpx> z(js.size());
                    std::vector<double> x(js.size());
                    for (std::size_t j = 0; j < js.size(); ++j) {
                        z[j] = js[j].value;
                        x[j] = -eps * std::log(std::abs(z[j]));
                    }
                    double fval = eval_term(ct, x);
                    if (fval == 0.0) return {0.0, 0.0};
                    std::vector<std::vector<Cpx>> cols(V.dim,
                                                       std::vector<Cpx>(js.size()));
                    for (std::size_t k = 0; k < V.dim; ++k)
                        for (std::size_t j = 0; j < js.size(); ++j)
                            cols[k][j] = js[j].d[k];
                    return term_pullback(ft, fval, eps, z, cols);
                };
                QuadOut qo = quad_box(*win, cfg, f);
                parts.push_back(om * qo.value);
                err += std::abs(om) * qo.error;

                if (cfg.mc_samples > 0) {
                    std::mt19937_64 rng(cfg.mc_seed + 0x9e3779b9u * piece);
                    std::uniform_real_distribution<double> uni(0.0, 1.0);
                    double vol = 1;
                    for (const auto& [lo, hi] : *win) vol *= hi - lo;
                    Cpx mean{0.0, 0.0};
                    double m2 = 0;
                    std::vector<double> t(win->size());
                    for (std::size_t s = 1; s <= cfg.mc_samples; ++s) {
                        for (std::size_t a = 0; a < win->size(); ++a)
                            t[a] = (*win)[a].first +
                                   uni(rng) * ((*win)[a].second - (*win)[a].first);
                        Cpx v = f(t);
                        Cpx delta = v - mean;
                        mean += delta / double(s);
                        m2 += std::norm(delta) * (double(s) - 1.0) / double(s);
                    }
                    double var = cfg.mc_samples > 1 ? m2 / (double(cfg.mc_samples) - 1.0) : 0.0;
                    mc_total += om * vol * mean;
                    mc_var += (om * vol) * (om * vol) * var / double(cfg.mc_samples);
                }
            }
        }
    }
    Cpx total = pairwise_sum(std::move(parts));
    if (cfg.mc_samples > 0) {
        double sd = std::sqrt(mc_var);
        if (std::abs(mc_total - total) >
            std::max(12.0 * sd, 0.02 * std::max(1.0, std::abs(total))))
            throw numeric_error("Monte Carlo cross-check disagrees with the quadrature");
    }
    return {total, err};
}

LimitResult limit_integral(const ParamChain& V, const Superform& w,
                           const EpsSchedule& s, const QuadratureCfg& cfg) {
    if (!(s.eps0 > 0.0) || !(s.ratio > 0.0) || !(s.ratio < 1.0) || s.levels < 2 ||
        s.order < 1)
        throw invariant_error("eps-schedule", "schedule parameters out of range");
    if (!(s.eps0 * std::pow(s.ratio, double(s.levels)) > 1e-12))
        throw invariant_error("eps-schedule", "schedule dips under the 1e-12 floor");

    LimitResult out;
    double prev_diff = -1.0;
    int grow = 0;
    double eps = s.eps0;
    for (std::size_t k = 0; k < s.levels; ++k) {
        Estimate e = eps_integral(V, w, eps, cfg);
        out.level.push_back({eps, e.value, e.error});
        if (k >= 1) {
            double diff = std::abs(e.value - out.level[k - 1].value);
            double noise = 100.0 * cfg.tol * std::max(1.0, std::abs(e.value));
            if (prev_diff >= 0.0 && diff > prev_diff && diff > noise)
                ++grow;
            else
                grow = 0;
            if (grow >= 3)
                throw numeric_error(
                    "level differences grew three times in a row; the limit diverges");
            prev_diff = diff;
        }
        eps *= s.ratio;
    }

    std::vector<Cpx> cur;
    for (const auto& lv : out.level) cur.push_back(lv.value);
    auto step = [&](double q) {
        std::vector<Cpx> nx;
        for (std::size_t k = 0; k + 1 < cur.size(); ++k)
            nx.push_back((cur[k + 1] - q * cur[k]) / (1.0 - q));
        cur = std::move(nx);
    };
    if (cur.size() >= 2) step(s.ratio);
    if (s.order >= 2 && cur.size() >= 2) step(s.ratio * s.ratio);
    out.value = cur.back();

    // estimated order from the level differences, once they clear the
    // quadrature noise
    double acc = 0;
    std::size_t cnt = 0;
    for (std::size_t k = 0; k + 2 < out.level.size(); ++k) {
        double d0 = std::abs(out.level[k + 1].value - out.level[k].value);
        double d1 = std::abs(out.level[k + 2].value - out.level[k + 1].value);
        double n0 = 50.0 * cfg.tol * std::max(1.0, std::abs(out.level[k + 1].value)) +
                    10.0 * (out.level[k].error + out.level[k + 1].error);
        double n1 = 50.0 * cfg.tol * std::max(1.0, std::abs(out.level[k + 2].value)) +
                    10.0 * (out.level[k + 1].error + out.level[k + 2].error);
        if (d0 > n0 && d1 > n1) {
            acc += std::log(d0 / d1) / std::log(1.0 / s.ratio);
            ++cnt;
        }
    }
    out.slope = cnt ? acc / double(cnt) : 0.0;
    return out;
}

// ---------------------------------------------------------------------
// Logarithmic periods.

Estimate log_integral(const ParamChain& V, const std::vector<IntVec>& monomials,
                      const QuadratureCfg& cfg) {
    validate_chain(V);
    check_log_rows(V);
    if (monomials.size() != V.dim)
        throw invariant_error("degree-mismatch",
                              "one monomial per chain dimension is required");
    for (const auto& m : monomials)
        if (m.size() != V.torus_dim)
            throw invariant_error("chain-shape",
                                  "monomial exponent of the wrong rank");

    if (V.dim == 0) {
        Rat mass = 0;
        for (const auto& c : V.charts) mass += Rat(c.orientation) * c.multiplicity;
        return {Cpx(to_double(mass), 0.0), 0.0};
    }

    std::vector<Cpx> parts;
    double err = 0;
    for (const auto& c : V.charts) {
        double om = double(c.orientation) * to_double(c.multiplicity);
        auto f = [&](const std::vector<double>& t) -> Cpx {
            auto js = eval_coords(c, t);
            std::vector<std::vector<Cpx>> m(monomials.size(),
                                            std::vector<Cpx>(V.dim));
            for (std::size_t r = 0; r < monomials.size(); ++r)
                for (std::size_t k = 0; k < V.dim; ++k) {
                    Cpx acc{0.0, 0.0};
                    for (std::size_t j = 0; j < js.size(); ++j) {
                        long e = monomials[r][j].convert_to<long>();
                        if (e != 0) acc += double(e) * js[j].d[k] / js[j].value;
                    }
                    m[r][k] = HOLO * acc;
                }
            return det_small(std::move(m));
        };
        QuadOut qo = quad_box(c.box, cfg, f);
        parts.push_back(om * qo.value);
        err += std::abs(om) * qo.error;
    }
    return {pairwise_sum(std::move(parts)), err};
}

// ---------------------------------------------------------------------
// Face maps.

ParamChain face_map(const ParamChain& V, const IntVec& ray) {
    validate_chain(V);
    if (ray.size() != V.torus_dim)
        throw invariant_error("chain-shape", "ray of the wrong rank");
    auto [j, sgn] = coordinate_ray_axis(ray);

    ParamChain out;
    out.torus_dim = V.torus_dim - 1;
    out.dim = V.dim >= 2 ? V.dim - 2 : 0;

    for (const auto& c : V.charts) {
        const ProductStructure* st = nullptr;
        for (const auto& s : c.structures)
            if (s.ray == ray) st = &s;

        auto zeta_at = [&](const std::vector<double>& t) -> Cpx {
            Cpx z = expr_eval(c.coords[j], t).value;
            return sgn > 0 ? z : Cpx(1.0, 0.0) / z;
        };

        if (!st) {
            // the chart must stay away from the divisor
            if (V.dim == 0) {
                Cpx zt = zeta_at({});
                if (std::abs(zt) < 1e-6)
                    throw invariant_error(
                        "product-structure",
                        "chart approaches the divisor without a declared splitting");
                continue;
            }
            std::vector<std::size_t> at(V.dim, 0);
            const std::size_t G = 5;
            std::vector<double> t(V.dim);
            for (;;) {
                for (std::size_t a = 0; a < V.dim; ++a)
                    t[a] = c.box[a].first +
                           (c.box[a].second - c.box[a].first) * double(at[a]) / double(G - 1);
                double mag = std::abs(zeta_at(t));
                if (mag < 1e-6)
                    throw invariant_error(
                        "product-structure",
                        "chart approaches the divisor without a declared splitting");
                std::size_t a = 0;
                while (a < V.dim && ++at[a] == G) at[a++] = 0;
                if (a == V.dim) break;
            }
            continue;
        }

        if (V.dim < 2)
            throw invariant_error("chain-degree",
                                  "face maps need at least two box axes");
        if (st->approach_axis >= V.dim || st->circle_axis >= V.dim ||
            st->approach_axis == st->circle_axis)
            throw invariant_error("product-structure", "invalid split axes");
        if (st->divisor_coord != j)
            throw invariant_error("product-structure",
                                  "declared divisor coordinate disagrees with the ray");

        // winding of the divisor coordinate around the phase circle, taken
        // at the divisor end of the approach axis (walked inward when the
        // end leaves the representable range)
        std::vector<double> t(V.dim);
        for (std::size_t a = 0; a < V.dim; ++a)
            t[a] = 0.5 * (c.box[a].first + c.box[a].second);
        const auto& abox = c.box[st->approach_axis];
        double amid = 0.5 * (abox.first + abox.second);
        t[st->approach_axis] = st->at_max_end ? abox.second : abox.first;
        t[st->circle_axis] = c.box[st->circle_axis].first;
        for (int tries = 0; tries < 80; ++tries) {
            double mag = std::abs(zeta_at(t));
            if (mag > 0.0 && std::isfinite(mag)) break;
            t[st->approach_axis] = 0.5 * (t[st->approach_axis] + amid);
        }
        {
            double mag = std::abs(zeta_at(t));
            if (!(mag > 0.0) || !std::isfinite(mag))
                throw invariant_error("product-structure",
                                      "divisor coordinate is not representable");
            if (mag >= 1e-3)
                throw invariant_error("product-structure",
                                      "chart does not approach its declared divisor");
        }
        const std::size_t NS = 256;
        const auto& cbox = c.box[st->circle_axis];
        double total = 0;
        Cpx prev = zeta_at(t);
        for (std::size_t k = 1; k <= NS; ++k) {
            t[st->circle_axis] =
                cbox.first + (cbox.second - cbox.first) * double(k) / double(NS);
            Cpx cur = zeta_at(t);
            double step = std::arg(cur / prev);
            if (!(std::abs(step) < PI / 2))
                throw invariant_error("product-structure",
                                      "phase step too large around the circle");
            total += step;
            prev = cur;
        }
        double turns = total / (2.0 * PI);
        long W = std::lround(turns);
        if (std::abs(turns - double(W)) > 1e-6)
            throw invariant_error("product-structure",
                                  "phase circle winding is not integral");

        // peel the two axes off the box orientation
        std::size_t pos_a = st->approach_axis;
        std::size_t pos_c =
            st->circle_axis - (st->approach_axis < st->circle_axis ? 1 : 0);
        int sign = c.orientation;
        if (st->at_max_end) sign = -sign;
        if (pos_a % 2) sign = -sign;
        if (pos_c % 2) sign = -sign;

        for (const auto& b : st->boundary) {
            if (b.box.size() != out.dim || b.coords.size() != out.torus_dim)
                throw invariant_error("chain-shape",
                                      "boundary chart of the wrong dimensions");
            ChainChart nb = b;
            nb.multiplicity = b.multiplicity * c.multiplicity * Rat(sign * W);
            out.charts.push_back(std::move(nb));
        }
    }
    return out;
}

// ---------------------------------------------------------------------
// Rationality and the weighted tropicalization.

RationalityResult rationality_check(const ParamChain& V,
                                    const std::vector<IntVec>& monomials,
                                    const QuadratureCfg& cfg) {
    if (!V.boundary.empty())
        throw invariant_error("chain-boundary",
                              "rationality applies to closed chains only");
    Estimate e = log_integral(V, monomials, cfg);
    RationalityResult out{e.value, e.error, std::nullopt};
    double tol = std::max(1e-7, 10.0 * e.error);
    if (std::abs(e.value.imag()) <= tol)
        out.reconstructed = rational_reconstruct(e.value.real(), 100, tol);
    return out;
}

TropChainClass weighted_tropicalization(const ParamChain& V, const Fan& lambda,
                                        const QuadratureCfg& cfg) {
    validate_chain(V);
    if (V.torus_dim != lambda.ambient.rank)
        throw invariant_error("chart-mismatch",
                              "chain and fan live in different tori");
    if (V.dim % 2 != 0)
        throw invariant_error("chain-degree",
                              "tropicalized chains must have even dimension");
    std::size_t p = V.dim / 2;

    TropChainClass ch;
    ch.fan = lambda;
    ch.degree = p;
    bool neg = (p * (p - 1) / 2) % 2 == 1;
    for (const auto& cone : lambda.cones) {
        RatVec v(WedgeIndex(cone.chart_dim, p).size(), Rat(0));
        if (cone.orbit == 0 && cone.dim() == p) {
            ParamChain cur = V;
            std::vector<std::size_t> alive(V.torus_dim);
            for (std::size_t k = 0; k < V.torus_dim; ++k) alive[k] = k;
            for (const auto& ray : cone.rays) {
                auto [j, sgn] = coordinate_ray_axis(ray);
                auto it = std::find(alive.begin(), alive.end(), j);
                if (it == alive.end())
                    throw invariant_error("product-structure",
                                          "cone rays repeat a coordinate");
                std::size_t jc = std::size_t(it - alive.begin());
                IntVec cray(alive.size(), Int(0));
                cray[jc] = Int(sgn);
                cur = face_map(cur, cray);
                alive.erase(it);
            }
            Estimate e = log_integral(cur, {}, cfg);
            if (std::abs(e.value.imag()) > 1e-9)
                throw invariant_error("rationality", "weight has an imaginary part");
            auto rec =
                rational_reconstruct(e.value.real(), 100, std::max(1e-6, 10.0 * e.error));
            if (!rec)
                throw invariant_error("rationality",
                                      "weight did not reconstruct to a small rational");
            if (*rec != 0) {
                IntVec gen = orientation_generator(cone, cone.rays);
                for (std::size_t k = 0; k < v.size(); ++k) {
                    v[k] = *rec * Rat(gen[k]);
                    if (neg) v[k] = -v[k];
                }
            }
        }
        ch.coeff.push_back(std::move(v));
    }
    return ch;
}

} // namespace tropmap
