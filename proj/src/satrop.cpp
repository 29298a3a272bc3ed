#include "tropmap/satrop.hpp"

#include "tropmap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace tropmap {

namespace {

const double PI = 3.14159265358979323846;

void validate_cone(const ExpBasicCone& c) {
    if (c.r == 0 || c.N.size() + 1 != c.r)
        throw invariant_error("cone-shape", "N must have one entry per adjacent pair");
    for (double n : c.N)
        if (!(n > 0.0))
            throw invariant_error("cone-shape", "exponents must be positive");
    if (!(c.h > 0.0))
        throw invariant_error("cone-shape", "height must be positive");
}

void validate_set(const SemialgSet& S) {
    for (const auto& con : S.constraints) {
        if (con.poly.empty())
            throw invariant_error("constraint-shape", "constraint polynomial is empty");
        bool live = false;
        for (const auto& [c, e] : con.poly) {
            if (e.size() != S.n + S.m)
                throw invariant_error("constraint-shape",
                                      "exponent vector of the wrong rank");
            if (c != 0) live = true;
        }
        if (!live)
            throw invariant_error("constraint-shape", "constraint polynomial is zero");
    }
}

// Log-magnitude and sign of one term at x = e^{-u}, y; zero marks a term
// killed by a vanishing y power, bad a negative power of zero.
struct TermMag {
    double logmag = 0;
    int sign = 0;
    bool zero = false;
    bool bad = false;
};

TermMag term_mag(const PolyTerm& tm, const std::vector<double>& u,
                 const std::vector<double>& y, std::size_t n) {
    double cv = to_double(tm.first);
    if (cv == 0.0) return {0, 0, true, false};
    TermMag r;
    r.sign = cv > 0 ? 1 : -1;
    r.logmag = std::log(std::abs(cv));
    for (std::size_t i = 0; i < n; ++i) {
        double e = tm.second[i].convert_to<double>();
        r.logmag -= e * u[i];
    }
    for (std::size_t j = 0; j + n < tm.second.size(); ++j) {
        double e = tm.second[n + j].convert_to<double>();
        if (e == 0.0) continue;
        if (y[j] == 0.0) {
            if (e > 0.0) return {0, 0, true, false};
            return {0, 0, false, true};
        }
        r.logmag += e * std::log(std::abs(y[j]));
        long el = tm.second[n + j].convert_to<long>();
        if (y[j] < 0.0 && (el % 2 != 0)) r.sign = -r.sign;
    }
    return r;
}

// Value of the polynomial divided by its largest term magnitude; exact
// sign information survives arbitrarily deep points.
struct ScaledValue {
    double value = 0;
    bool bad = false;
    bool all_zero = false;
};

ScaledValue scaled_eval(const std::vector<PolyTerm>& poly, const std::vector<double>& u,
                        const std::vector<double>& y, std::size_t n) {
    std::vector<TermMag> tm;
    tm.reserve(poly.size());
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& t : poly) {
        TermMag m = term_mag(t, u, y, n);
        if (m.bad) return {0, true, false};
        if (!m.zero) top = std::max(top, m.logmag);
        tm.push_back(m);
    }
    if (!std::isfinite(top)) return {0, false, true};
    double v = 0;
    for (const auto& m : tm)
        if (!m.zero) v += m.sign * std::exp(m.logmag - top);
    return {v, false, false};
}

// Log-gap residual of an equality constraint: log of the positive mass
// minus log of the negative mass, linear in u for binomials, zero exactly
// on the constraint set. nullopt when one side has no terms (the
// constraint cannot vanish on R^n_{>0} for this sign pattern) or a term
// is not representable.
std::optional<double> log_gap(const std::vector<PolyTerm>& poly,
                              const std::vector<double>& u,
                              const std::vector<double>& y, std::size_t n,
                              std::vector<double>* grad) {
    std::size_t m = y.size();
    double top_p = -std::numeric_limits<double>::infinity();
    double top_n = top_p;
    std::vector<TermMag> tm;
    tm.reserve(poly.size());
    for (const auto& t : poly) {
        TermMag mg = term_mag(t, u, y, n);
        if (mg.bad) return std::nullopt;
        if (!mg.zero) (mg.sign > 0 ? top_p : top_n) = std::max(mg.sign > 0 ? top_p : top_n, mg.logmag);
        tm.push_back(mg);
    }
    if (!std::isfinite(top_p) || !std::isfinite(top_n)) return std::nullopt;
    double sum_p = 0, sum_n = 0;
    for (const auto& mg : tm) {
        if (mg.zero) continue;
        if (mg.sign > 0)
            sum_p += std::exp(mg.logmag - top_p);
        else
            sum_n += std::exp(mg.logmag - top_n);
    }
    double lse_p = top_p + std::log(sum_p);
    double lse_n = top_n + std::log(sum_n);
    if (grad) {
        grad->assign(n + m, 0.0);
        for (std::size_t ti = 0; ti < poly.size(); ++ti) {
            const auto& mg = tm[ti];
            if (mg.zero) continue;
            double w = std::exp(mg.logmag - (mg.sign > 0 ? lse_p : lse_n));
            double s = mg.sign > 0 ? 1.0 : -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                double e = poly[ti].second[i].convert_to<double>();
                (*grad)[i] += s * w * (-e);
            }
            for (std::size_t j = 0; j < m; ++j) {
                double e = poly[ti].second[n + j].convert_to<double>();
                if (e != 0.0 && y[j] != 0.0) (*grad)[n + j] += s * w * e / y[j];
            }
        }
    }
    return lse_p - lse_n;
}

bool solve_sym(std::vector<std::vector<double>> a, std::vector<double> b,
               std::vector<double>& out) {
    std::size_t d = a.size();
    for (std::size_t c = 0; c < d; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < d; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) < 1e-300) return false;
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = c + 1; r < d; ++r) {
            double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < d; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    out.assign(d, 0.0);
    for (std::size_t c = d; c-- > 0;) {
        double s = b[c];
        for (std::size_t k = c + 1; k < d; ++k) s -= a[c][k] * out[k];
        out[c] = s / a[c][c];
    }
    return true;
}

// Damped Gauss-Newton on the log-gap residuals of the equality
// constraints; returns false when the projection fails to converge.
bool project_equalities(const SemialgSet& S, std::vector<double>& u,
                        std::vector<double>& y) {
    std::vector<const std::vector<PolyTerm>*> eqs;
    for (const auto& con : S.constraints)
        if (con.rel == Rel::eq) eqs.push_back(&con.poly);
    if (eqs.empty()) return true;

    std::size_t d = S.n + S.m;
    auto residuals = [&](const std::vector<double>& uu, const std::vector<double>& yy,
                         std::vector<std::vector<double>>* jac) -> std::optional<std::vector<double>> {
        std::vector<double> r;
        if (jac) jac->clear();
        for (const auto* p : eqs) {
            std::vector<double> g;
            auto v = log_gap(*p, uu, yy, S.n, jac ? &g : nullptr);
            if (!v) return std::nullopt;
            r.push_back(*v);
            if (jac) jac->push_back(std::move(g));
        }
        return r;
    };

    std::vector<std::vector<double>> J;
    auto r0 = residuals(u, y, &J);
    if (!r0) return false;
    double s0 = 0;
    for (double v : *r0) s0 += v * v;
    for (int it = 0; it < 100; ++it) {
        if (s0 < 1e-24) break;
        std::vector<std::vector<double>> jtj(d, std::vector<double>(d, 0.0));
        std::vector<double> rhs(d, 0.0);
        for (std::size_t e = 0; e < J.size(); ++e)
            for (std::size_t i = 0; i < d; ++i) {
                rhs[i] -= J[e][i] * (*r0)[e];
                for (std::size_t k = 0; k < d; ++k) jtj[i][k] += J[e][i] * J[e][k];
            }
        double tr = 0;
        for (std::size_t i = 0; i < d; ++i) tr += jtj[i][i];
        for (std::size_t i = 0; i < d; ++i) jtj[i][i] += 1e-12 * (1.0 + tr);
        std::vector<double> delta;
        if (!solve_sym(jtj, rhs, delta)) return false;

        double step = 1.0;
        bool moved = false;
        for (int h = 0; h < 30; ++h) {
            std::vector<double> un = u, yn = y;
            for (std::size_t i = 0; i < S.n; ++i) un[i] += step * delta[i];
            for (std::size_t j = 0; j < S.m; ++j) yn[j] += step * delta[S.n + j];
            std::vector<std::vector<double>> Jn;
            auto rn = residuals(un, yn, &Jn);
            if (rn) {
                double sn = 0;
                for (double v : *rn) sn += v * v;
                if (sn < s0) {
                    u = std::move(un);
                    y = std::move(yn);
                    r0 = std::move(rn);
                    J = std::move(Jn);
                    s0 = sn;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!moved) return false;
    }
    if (s0 >= 1e-24) return false;
    for (const auto& con : S.constraints)
        if (con.rel == Rel::eq) {
            ScaledValue v = scaled_eval(con.poly, u, y, S.n);
            if (v.bad || (!v.all_zero && std::abs(v.value) > 1e-9)) return false;
        }
    return true;
}

bool inequalities_hold(const SemialgSet& S, const std::vector<double>& u,
                       const std::vector<double>& y) {
    for (const auto& con : S.constraints) {
        if (con.rel == Rel::eq) continue;
        ScaledValue v = scaled_eval(con.poly, u, y, S.n);
        if (v.bad) return false;
        if (v.all_zero) {
            if (con.rel == Rel::gt) return false;
            continue;
        }
        if (con.rel == Rel::ge ? v.value < -1e-12 : v.value <= 1e-12) return false;
    }
    return true;
}

// Best continued-fraction approximation with denominator at most max_den.
Rat cf_approx(double x, long max_den) {
    bool negx = x < 0;
    double a = std::abs(x);
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = a;
    for (int it = 0; it < 64; ++it) {
        double fl = std::floor(frac);
        if (fl > 9e17 || double(q1) * fl + q0 > double(max_den) + 0.5 ||
            fl * double(p1) + double(p0) > 9e17)
            break;
        long ai = long(fl);
        long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        double rem = frac - fl;
        if (rem < 1e-15) break;
        frac = 1.0 / rem;
    }
    if (q1 == 0) return Rat(0);
    Rat r = Rat(Int(p1)) / Rat(Int(q1));
    return negx ? -r : r;
}

} // namespace

bool in_exp_cone(const std::vector<double>& a, const ExpBasicCone& c) {
    validate_cone(c);
    if (a.size() != c.r)
        throw invariant_error("cone-shape", "point of the wrong dimension");
    for (double v : a)
        if (!(v > 0.0 && v <= c.h)) return false;
    for (std::size_t i = 0; i + 1 < c.r; ++i)
        if (!(a[i] <= std::pow(a[i + 1], c.N[i]))) return false;
    return true;
}

DirectionCloud log_limit_sample(const SemialgSet& S, const std::vector<double>& radii,
                                std::size_t samples, unsigned seed,
                                double cluster_tol) {
    validate_set(S);
    if (S.n == 0)
        throw invariant_error("constraint-shape", "no positive coordinates to project");
    if (radii.empty())
        throw invariant_error("radius-schedule", "empty radius schedule");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0))
            throw invariant_error("radius-schedule", "radii must be positive");
        if (i > 0 && radii[i] > radii[i - 1] + 1e-12)
            throw invariant_error("radius-schedule", "radii must not increase");
    }
    if (samples == 0)
        throw invariant_error("radius-schedule", "at least one sample per radius");
    if (!(cluster_tol > 0.0))
        throw invariant_error("radius-schedule", "cluster tolerance must be positive");

    bool witness = false;
    std::vector<std::vector<double>> raw;
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        double R = radii[ri];
        std::mt19937_64 rng(seed + 1000003u * unsigned(ri + 1));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::size_t accepted = 0;
        std::size_t budget = std::max<std::size_t>(200 * samples, 2000);
        for (std::size_t at = 0; at < budget && accepted < samples; ++at) {
            std::vector<double> u(S.n);
            double norm = 0;
            for (auto& v : u) {
                v = gauss(rng);
                norm += v * v;
            }
            norm = std::sqrt(norm);
            if (norm < 1e-12) continue;
            double rho = R * (1.0 + 0.5 * uni(rng));
            for (auto& v : u) v *= rho / norm;
            std::vector<double> y(S.m);
            for (auto& v : y) v = -3.0 + 6.0 * uni(rng);

            if (!project_equalities(S, u, y)) continue;
            if (!inequalities_hold(S, u, y)) continue;
            witness = true;
            double un = 0;
            for (double v : u) un += v * v;
            un = std::sqrt(un);
            if (un < R) continue;
            for (auto& v : u) v /= un;
            raw.push_back(std::move(u));
            ++accepted;
        }
    }
    if (!witness)
        throw numeric_error("no point of the constraint set found within the sampling budget");

    std::sort(raw.begin(), raw.end());
    DirectionCloud cloud;
    cloud.tol = cluster_tol;
    std::vector<std::vector<double>> sums;
    for (const auto& d : raw) {
        std::size_t best = cloud.dir.size();
        for (std::size_t k = 0; k < cloud.dir.size(); ++k) {
            double dot = 0;
            for (std::size_t i = 0; i < S.n; ++i) dot += d[i] * cloud.dir[k][i];
            if (std::acos(std::clamp(dot, -1.0, 1.0)) <= cluster_tol) {
                best = k;
                break;
            }
        }
        if (best == cloud.dir.size()) {
            cloud.dir.push_back(d);
            cloud.weight.push_back(1.0);
            sums.push_back(d);
        } else {
            cloud.weight[best] += 1.0;
            double norm = 0;
            for (std::size_t i = 0; i < S.n; ++i) {
                sums[best][i] += d[i];
                norm += sums[best][i] * sums[best][i];
            }
            norm = std::sqrt(norm);
            for (std::size_t i = 0; i < S.n; ++i) cloud.dir[best][i] = sums[best][i] / norm;
        }
    }
    std::vector<std::size_t> order(cloud.dir.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (cloud.weight[a] != cloud.weight[b]) return cloud.weight[a] > cloud.weight[b];
        return cloud.dir[a] < cloud.dir[b];
    });
    DirectionCloud out;
    out.tol = cluster_tol;
    for (std::size_t i : order) {
        out.dir.push_back(cloud.dir[i]);
        out.weight.push_back(cloud.weight[i]);
    }
    return out;
}

OrbitVerdict orbit_meets(const SemialgSet& S, const std::vector<double>& w) {
    validate_set(S);
    if (w.size() != S.n)
        throw invariant_error("constraint-shape", "ray of the wrong rank");

    bool any_empty = false;
    bool any_indet = false;
    for (const auto& con : S.constraints) {
        // an equality is the pair of opposite closed inequalities
        std::vector<std::pair<std::vector<PolyTerm>, bool>> parts;
        parts.push_back({con.poly, false});
        if (con.rel == Rel::eq) {
            std::vector<PolyTerm> negp = con.poly;
            for (auto& [c, e] : negp) c = -c;
            parts.push_back({std::move(negp), false});
        }
        for (auto& [poly, dummy] : parts) {
            (void)dummy;
            std::map<IntVec, Rat> combined;
            for (const auto& [c, e] : poly) combined[e] += c;
            std::vector<PolyTerm> terms;
            for (auto& [e, c] : combined)
                if (c != 0) terms.push_back({c, e});
            if (terms.empty())
                throw invariant_error("constraint-shape",
                                      "constraint polynomial is zero");

            std::vector<double> score(terms.size());
            double smax = 1.0;
            for (std::size_t t = 0; t < terms.size(); ++t) {
                double s = 0;
                for (std::size_t i = 0; i < S.n; ++i)
                    s += terms[t].second[i].convert_to<double>() * w[i];
                score[t] = s;
                smax = std::max(smax, std::abs(s));
            }
            double lo = *std::min_element(score.begin(), score.end());
            std::vector<std::size_t> near;
            for (std::size_t t = 0; t < terms.size(); ++t)
                if (score[t] <= lo + 1e-9 * smax) near.push_back(t);

            std::optional<std::size_t> winner;
            if (near.size() == 1) {
                winner = near[0];
            } else {
                std::vector<Rat> wr(S.n);
                for (std::size_t i = 0; i < S.n; ++i) wr[i] = cf_approx(w[i], 1000000);
                std::vector<Rat> exact(near.size());
                for (std::size_t k = 0; k < near.size(); ++k) {
                    Rat s = 0;
                    for (std::size_t i = 0; i < S.n; ++i)
                        s += Rat(terms[near[k]].second[i]) * wr[i];
                    exact[k] = s;
                }
                Rat emin = *std::min_element(exact.begin(), exact.end());
                std::vector<std::size_t> hits;
                for (std::size_t k = 0; k < near.size(); ++k)
                    if (exact[k] == emin) hits.push_back(near[k]);
                if (hits.size() == 1)
                    winner = hits[0];
            }
            if (!winner) {
                any_indet = true;
                continue;
            }
            const auto& [coef, expo] = terms[*winner];
            bool touches_y = false;
            for (std::size_t j = S.n; j < expo.size(); ++j)
                if (expo[j] != 0) touches_y = true;
            if (touches_y) {
                any_indet = true;
                continue;
            }
            if (con.rel == Rel::eq) {
                // a nonzero dominant coefficient keeps the polynomial away
                // from zero deep along the ray
                any_empty = true;
            } else if (coef < 0) {
                any_empty = true;
            }
        }
    }
    if (any_empty) return OrbitVerdict::empty;
    if (any_indet) return OrbitVerdict::indeterminate;
    return OrbitVerdict::meets_fully;
}

namespace {

Expr subst_param(const Expr& e, std::size_t axis, double value) {
    if (!e) throw invariant_error("chain-shape", "empty expression tree");
    switch (e->op) {
    case ExprOp::Constant:
        return e;
    case ExprOp::Param:
        if (e->param == axis) return expr_const(Cpx(value, 0.0));
        if (e->param > axis) return expr_param(e->param - 1);
        return e;
    default: {
        Expr a = e->a ? subst_param(e->a, axis, value) : nullptr;
        Expr b = e->b ? subst_param(e->b, axis, value) : nullptr;
        return std::make_shared<const ExprNode>(ExprNode{e->op, e->value, e->param, a, b});
    }
    }
}

} // namespace

ParamChain phase_boundary_slice(const ParamChain& V, const IntVec& ray) {
    validate_chain(V);
    if (ray.size() != V.torus_dim)
        throw invariant_error("chain-shape", "ray of the wrong rank");
    auto [j, sgn] = coordinate_ray_axis(ray);

    ParamChain out;
    out.torus_dim = V.torus_dim;
    out.dim = V.dim >= 1 ? V.dim - 1 : 0;

    for (const auto& c : V.charts) {
        const ProductStructure* st = nullptr;
        for (const auto& s : c.structures)
            if (s.ray == ray) st = &s;

        auto zeta_at = [&, j = j, sgn = sgn](const std::vector<double>& t) -> Cpx {
            Cpx z = expr_eval(c.coords[j], t).value;
            return sgn > 0 ? z : Cpx(1.0, 0.0) / z;
        };

        if (!st) {
            const std::size_t G = 5;
            std::vector<std::size_t> at(V.dim, 0);
            std::vector<double> t(V.dim);
            for (;;) {
                for (std::size_t a = 0; a < V.dim; ++a)
                    t[a] = c.box[a].first +
                           (c.box[a].second - c.box[a].first) * double(at[a]) / double(G - 1);
                if (std::abs(zeta_at(t)) < 1e-6)
                    throw invariant_error(
                        "product-structure",
                        "chart approaches the divisor without a declared splitting");
                std::size_t a = 0;
                while (a < V.dim && ++at[a] == G) at[a++] = 0;
                if (a == V.dim) break;
            }
            continue;
        }

        if (st->approach_axis >= V.dim || st->circle_axis >= V.dim ||
            st->approach_axis == st->circle_axis)
            throw invariant_error("product-structure", "invalid split axes");
        if (st->divisor_coord != j)
            throw invariant_error("product-structure",
                                  "declared divisor coordinate disagrees with the ray");

        std::vector<double> t(V.dim);
        for (std::size_t a = 0; a < V.dim; ++a)
            t[a] = 0.5 * (c.box[a].first + c.box[a].second);
        const auto& abox = c.box[st->approach_axis];
        double amid = 0.5 * (abox.first + abox.second);
        t[st->approach_axis] = st->at_max_end ? abox.second : abox.first;
        for (int tries = 0; tries < 80; ++tries) {
            double mag = std::abs(zeta_at(t));
            if (mag > 0.0 && std::isfinite(mag)) break;
            t[st->approach_axis] = 0.5 * (t[st->approach_axis] + amid);
        }
        double frozen = t[st->approach_axis];
        double mag = std::abs(zeta_at(t));
        if (!(mag > 0.0) || !std::isfinite(mag))
            throw invariant_error("product-structure",
                                  "divisor coordinate is not representable");
        if (mag >= 1e-3)
            throw invariant_error("product-structure",
                                  "chart does not approach its declared divisor");

        int orient = c.orientation;
        if (!st->at_max_end) orient = -orient;
        if (st->approach_axis % 2) orient = -orient;

        ChainChart nc;
        nc.orientation = orient;
        nc.multiplicity = c.multiplicity;
        for (std::size_t a = 0; a < V.dim; ++a)
            if (a != st->approach_axis) nc.box.push_back(c.box[a]);
        for (const auto& tree : c.coords)
            nc.coords.push_back(subst_param(tree, st->approach_axis, frozen));
        for (const auto& row : c.log_abs) {
            if (!row) {
                nc.log_abs.push_back(std::nullopt);
                continue;
            }
            LogAffine nr;
            nr.offset = row->offset + row->row[st->approach_axis] * frozen;
            for (std::size_t a = 0; a < V.dim; ++a)
                if (a != st->approach_axis) nr.row.push_back(row->row[a]);
            nc.log_abs.push_back(std::move(nr));
        }
        out.charts.push_back(std::move(nc));
    }
    return out;
}

} // namespace tropmap
