#include "tropmap/superform.hpp"
#include "tropmap/quadrature.hpp"

#include "tropmap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <utility>

namespace tropmap {

namespace {

Rat rat_pow(const Rat& x, unsigned long e) {
    Rat r = 1;
    for (unsigned long i = 0; i < e; ++i) r *= x;
    return r;
}

bool factor_less(const BumpFactor& a, const BumpFactor& b) {
    return a.tie() < b.tie();
}

using TermKey = std::pair<IntVec, std::vector<BumpFactor>>;

TermKey term_key(const CoefTerm& t) { return {t.expo, t.factors}; }

bool key_less(const TermKey& a, const TermKey& b) {
    if (a.first != b.first) return a.first < b.first;
    if (a.second.size() != b.second.size())
        return a.second.size() < b.second.size();
    for (std::size_t i = 0; i < a.second.size(); ++i) {
        if (!(a.second[i] == b.second[i]))
            return factor_less(a.second[i], b.second[i]);
    }
    return false;
}

void validate_term(const CoefTerm& t) {
    for (const auto& e : t.expo)
        if (e < 0)
            throw invariant_error("profile-shape", "negative monomial exponent");
    std::set<std::size_t> coords;
    for (const auto& f : t.factors) {
        if (f.radius <= 0)
            throw invariant_error("profile-shape", "bump radius must be positive");
        if (f.bump_exp < 0 || f.inv_exp < 0)
            throw invariant_error("profile-shape", "negative factor exponent");
        if (f.bump_exp == 0 && f.inv_exp > 0)
            throw invariant_error("profile-shape",
                                  "inverse powers need a bump to stay bounded");
        if (!coords.insert(f.coord).second)
            throw invariant_error("profile-shape", "repeated bump coordinate");
    }
}

double eval_factor(const BumpFactor& f, double x) {
    double u = (x - to_double(f.center)) / to_double(f.radius);
    if (std::abs(u) >= 1.0) return 0.0;
    double s = 1.0 - u * u;
    double v = 1.0;
    for (long i = 0; i < f.bump_exp; ++i) v *= std::exp(-1.0 / s);
    for (long i = 0; i < f.inv_exp; ++i) v /= s;
    return v;
}

double pairwise_sum(std::vector<double>& xs, std::size_t lo, std::size_t hi) {
    if (hi - lo == 0) return 0.0;
    if (hi - lo == 1) return xs[lo];
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(xs, lo, mid) + pairwise_sum(xs, mid, hi);
}

double pairwise_sum(std::vector<double> xs) {
    return pairwise_sum(xs, 0, xs.size());
}

const GaussRule& gl16() { return gauss_legendre(16); }

} // namespace

CoefProfile profile_normalize(CoefProfile p) {
    std::map<TermKey, Rat, decltype(&key_less)> acc(&key_less);
    for (auto& t : p) {
        validate_term(t);
        if (t.c == 0) continue;
        // drop exponent-free factors
        std::vector<BumpFactor> fs;
        for (const auto& f : t.factors)
            if (f.bump_exp != 0 || f.inv_exp != 0) fs.push_back(f);
        std::sort(fs.begin(), fs.end(), factor_less);
        t.factors = std::move(fs);
        while (!t.expo.empty() && t.expo.back() == 0) t.expo.pop_back();
        acc[term_key(t)] += t.c;
    }
    CoefProfile out;
    for (const auto& [k, c] : acc) {
        if (c == 0) continue;
        CoefTerm t;
        t.c = c;
        t.expo = k.first;
        t.factors = k.second;
        out.push_back(std::move(t));
    }
    return out;
}

CoefProfile profile_add(const CoefProfile& a, const CoefProfile& b) {
    CoefProfile all = a;
    all.insert(all.end(), b.begin(), b.end());
    return profile_normalize(std::move(all));
}

CoefProfile profile_scale(const Rat& s, const CoefProfile& p) {
    CoefProfile out = p;
    for (auto& t : out) t.c *= s;
    return profile_normalize(std::move(out));
}

CoefProfile profile_mul(const CoefProfile& a, const CoefProfile& b) {
    CoefProfile out;
    for (const auto& ta : a) {
        for (const auto& tb : b) {
            CoefTerm t;
            t.c = ta.c * tb.c;
            std::size_t n = std::max(ta.expo.size(), tb.expo.size());
            t.expo.assign(n, Int(0));
            for (std::size_t i = 0; i < ta.expo.size(); ++i) t.expo[i] += ta.expo[i];
            for (std::size_t i = 0; i < tb.expo.size(); ++i) t.expo[i] += tb.expo[i];
            t.factors = ta.factors;
            for (const auto& f : tb.factors) {
                auto it = std::find_if(
                    t.factors.begin(), t.factors.end(),
                    [&](const BumpFactor& g) { return g.coord == f.coord; });
                if (it == t.factors.end()) {
                    t.factors.push_back(f);
                } else if (it->center == f.center && it->radius == f.radius) {
                    it->bump_exp += f.bump_exp;
                    it->inv_exp += f.inv_exp;
                } else {
                    throw invariant_error(
                        "profile-product",
                        "a coordinate carries two different bump windows");
                }
            }
            out.push_back(std::move(t));
        }
    }
    return profile_normalize(std::move(out));
}

CoefProfile profile_derivative(const CoefProfile& p, std::size_t coord) {
    CoefProfile out;
    for (const auto& t : p) {
        // monomial part
        if (coord < t.expo.size() && t.expo[coord] > 0) {
            CoefTerm d = t;
            d.c *= Rat(t.expo[coord]);
            d.expo[coord] -= 1;
            out.push_back(std::move(d));
        }
        // bump part: with u = (x - c0)/r,
        // (b^m s^{-k})' = (-2m) (u/r) b^m s^{-(k+2)} + (2k) (u/r) b^m s^{-(k+1)}
        // where s = 1 - u^2 and u/r = (x - c0)/r^2
        auto it = std::find_if(
            t.factors.begin(), t.factors.end(),
            [&](const BumpFactor& f) { return f.coord == coord; });
        if (it == t.factors.end()) continue;
        const Rat r2 = it->radius * it->radius;
        auto emit = [&](const Rat& scale, long dk) {
            if (scale == 0) return;
            CoefTerm base = t;
            for (auto& f : base.factors)
                if (f.coord == coord) f.inv_exp += dk;
            CoefTerm lin = base; // carries the extra x factor of u
            if (coord >= lin.expo.size()) lin.expo.resize(coord + 1, Int(0));
            lin.expo[coord] += 1;
            lin.c = t.c * scale / r2;
            out.push_back(std::move(lin));
            CoefTerm cst = base;
            cst.c = t.c * scale * (-it->center) / r2;
            out.push_back(std::move(cst));
        };
        emit(Rat(-2 * it->bump_exp), 2);
        if (it->inv_exp > 0) emit(Rat(2 * it->inv_exp), 1);
    }
    return profile_normalize(std::move(out));
}

double profile_eval(const CoefProfile& p, const std::vector<double>& x) {
    std::vector<double> vals;
    for (const auto& t : p) {
        double v = to_double(t.c);
        for (std::size_t i = 0; i < t.expo.size(); ++i) {
            long e = t.expo[i].convert_to<long>();
            for (long k = 0; k < e; ++k) v *= x[i];
        }
        for (const auto& f : t.factors) v *= eval_factor(f, x[f.coord]);
        vals.push_back(v);
    }
    return pairwise_sum(std::move(vals));
}

bool profile_is_polynomial(const CoefProfile& p) {
    for (const auto& t : p)
        if (!t.factors.empty()) return false;
    return true;
}

Superform Superform::make(std::size_t p, std::size_t q,
                          std::vector<ChartTerms> charts) {
    Superform f;
    f.p = p;
    f.q = q;
    std::sort(charts.begin(), charts.end(),
              [](const ChartTerms& a, const ChartTerms& b) {
                  return a.orbit < b.orbit;
              });
    for (std::size_t i = 0; i + 1 < charts.size(); ++i)
        if (charts[i].orbit == charts[i + 1].orbit)
            throw invariant_error("form-shape", "orbit declared twice");
    for (auto& ch : charts) {
        std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>,
                 CoefProfile>
            acc;
        for (auto& t : ch.terms) {
            if (t.I.size() != p || t.J.size() != q)
                throw invariant_error("form-shape",
                                      "index sets disagree with the bidegree");
            auto increasing = [&](const std::vector<std::size_t>& v) {
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (v[i] >= ch.chart_dim) return false;
                    if (i > 0 && v[i] <= v[i - 1]) return false;
                }
                return true;
            };
            if (!increasing(t.I) || !increasing(t.J))
                throw invariant_error("form-shape",
                                      "index sets must strictly increase");
            for (const auto& ct : t.coef) {
                if (ct.expo.size() > ch.chart_dim)
                    throw invariant_error("form-shape",
                                          "exponent list longer than the chart");
                for (const auto& fb : ct.factors)
                    if (fb.coord >= ch.chart_dim)
                        throw invariant_error("form-shape",
                                              "bump coordinate outside chart");
            }
            auto& slot = acc[{t.I, t.J}];
            slot = profile_add(slot, t.coef);
        }
        ch.terms.clear();
        for (auto& [key, coef] : acc) {
            if (coef.empty()) continue;
            ch.terms.push_back({key.first, key.second, std::move(coef)});
        }
        f.charts.push_back(std::move(ch));
    }
    return f;
}

const ChartTerms* Superform::chart(std::size_t orbit) const {
    for (const auto& ch : charts)
        if (ch.orbit == orbit) return &ch;
    return nullptr;
}

namespace {

// sign of inserting index i in front of the sorted set J, then resorting
int insertion_sign(const std::vector<std::size_t>& J, std::size_t i) {
    std::size_t before = 0;
    for (auto j : J)
        if (j < i) ++before;
    return before % 2 ? -1 : 1;
}

std::vector<std::size_t> inserted(const std::vector<std::size_t>& J,
                                  std::size_t i) {
    std::vector<std::size_t> out = J;
    out.push_back(i);
    std::sort(out.begin(), out.end());
    return out;
}

Superform differentiate(const Superform& f, bool double_prime) {
    std::vector<ChartTerms> charts;
    const Rat global = (!double_prime && f.q % 2 == 1) ? Rat(-1) : Rat(1);
    for (const auto& ch : f.charts) {
        ChartTerms out{ch.orbit, ch.chart_dim, {}};
        for (const auto& t : ch.terms) {
            const auto& target = double_prime ? t.J : t.I;
            for (std::size_t i = 0; i < ch.chart_dim; ++i) {
                if (std::find(target.begin(), target.end(), i) != target.end())
                    continue;
                auto der = profile_derivative(t.coef, i);
                if (der.empty()) continue;
                Rat s = global * Rat(insertion_sign(target, i));
                if (double_prime)
                    out.terms.push_back({t.I, inserted(t.J, i),
                                         profile_scale(s, der)});
                else
                    out.terms.push_back({inserted(t.I, i), t.J,
                                         profile_scale(s, der)});
            }
        }
        charts.push_back(std::move(out));
    }
    return Superform::make(double_prime ? f.p : f.p + 1,
                           double_prime ? f.q + 1 : f.q, std::move(charts));
}

// number of transpositions needed to merge two increasing disjoint sets
int merge_sign(const std::vector<std::size_t>& a,
               const std::vector<std::size_t>& b) {
    std::size_t inv = 0;
    for (auto x : a)
        for (auto y : b)
            if (y < x) ++inv;
    return inv % 2 ? -1 : 1;
}

bool disjoint(const std::vector<std::size_t>& a,
              const std::vector<std::size_t>& b) {
    for (auto x : a)
        if (std::find(b.begin(), b.end(), x) != b.end()) return false;
    return true;
}

std::vector<std::size_t> merged(const std::vector<std::size_t>& a,
                                const std::vector<std::size_t>& b) {
    std::vector<std::size_t> out = a;
    out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

Superform d_double_prime(const Superform& f) { return differentiate(f, true); }

Superform d_prime(const Superform& f) { return differentiate(f, false); }

Superform wedge(const Superform& a, const Superform& b) {
    std::map<std::size_t, std::size_t> dims; // orbit -> chart_dim
    for (const auto& ch : a.charts) dims[ch.orbit] = ch.chart_dim;
    for (const auto& ch : b.charts) {
        auto it = dims.find(ch.orbit);
        if (it != dims.end() && it->second != ch.chart_dim)
            throw invariant_error("chart-mismatch",
                                  "chart dimensions differ between factors");
        dims[ch.orbit] = ch.chart_dim;
    }
    const Rat global = (a.p * b.q) % 2 ? Rat(-1) : Rat(1);
    std::vector<ChartTerms> charts;
    for (const auto& [orbit, dim] : dims) {
        ChartTerms out{orbit, dim, {}};
        const ChartTerms* ca = a.chart(orbit);
        const ChartTerms* cb = b.chart(orbit);
        if (ca && cb) {
            for (const auto& ta : ca->terms) {
                for (const auto& tb : cb->terms) {
                    if (!disjoint(ta.I, tb.I) || !disjoint(ta.J, tb.J)) continue;
                    Rat s = global * Rat(merge_sign(ta.I, tb.I)) *
                            Rat(merge_sign(ta.J, tb.J));
                    out.terms.push_back({merged(ta.I, tb.I), merged(ta.J, tb.J),
                                         profile_scale(s, profile_mul(ta.coef,
                                                                      tb.coef))});
                }
            }
        }
        charts.push_back(std::move(out));
    }
    return Superform::make(a.p + b.p, a.q + b.q, std::move(charts));
}

Superform form_add(const Superform& a, const Superform& b) {
    if (a.p != b.p || a.q != b.q)
        throw invariant_error("degree-mismatch", "cannot add forms of different bidegree");
    std::map<std::size_t, ChartTerms> merged;
    for (const auto& ch : a.charts) merged[ch.orbit] = ch;
    for (const auto& ch : b.charts) {
        auto it = merged.find(ch.orbit);
        if (it == merged.end()) {
            merged[ch.orbit] = ch;
        } else {
            if (it->second.chart_dim != ch.chart_dim)
                throw invariant_error("chart-mismatch",
                                      "chart dimensions differ between summands");
            it->second.terms.insert(it->second.terms.end(), ch.terms.begin(),
                                    ch.terms.end());
        }
    }
    std::vector<ChartTerms> charts;
    for (auto& [o, ch] : merged) charts.push_back(std::move(ch));
    return Superform::make(a.p, a.q, std::move(charts));
}

Superform form_scale(const Rat& s, const Superform& f) {
    std::vector<ChartTerms> charts = f.charts;
    for (auto& ch : charts)
        for (auto& t : ch.terms) t.coef = profile_scale(s, t.coef);
    return Superform::make(f.p, f.q, std::move(charts));
}

bool form_is_zero(const Superform& f) {
    for (const auto& ch : f.charts)
        if (!ch.terms.empty()) return false;
    return true;
}

namespace {

Rat int_minor(const std::vector<IntVec>& rows,
              const std::vector<std::size_t>& ri,
              const std::vector<std::size_t>& ci) {
    std::size_t k = ri.size();
    RatMatrix m(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            m.at(i, j) = Rat(rows[ri[i]][ci[j]]);
    return det(m);
}

// exact composition of a profile with a linear map given by integer rows:
// x_sigma = pi * x_tau. Fails (nullopt) when a bump window does not ride a
// single coordinate.
std::optional<CoefProfile> compose_linear(const CoefProfile& p,
                                          const std::vector<IntVec>& pi,
                                          std::size_t tdim) {
    CoefProfile out;
    for (const auto& t : p) {
        // polynomial part: expand prod_c (pi_c . x)^{e_c}
        std::map<IntVec, Rat> poly;
        poly[IntVec(tdim, Int(0))] = t.c;
        for (std::size_t c = 0; c < t.expo.size(); ++c) {
            long e = t.expo[c].convert_to<long>();
            for (long rep = 0; rep < e; ++rep) {
                std::map<IntVec, Rat> next;
                for (const auto& [expo, coef] : poly) {
                    for (std::size_t b = 0; b < tdim; ++b) {
                        if (pi[c][b] == 0) continue;
                        IntVec e2 = expo;
                        e2[b] += 1;
                        next[e2] += coef * Rat(pi[c][b]);
                    }
                }
                poly = std::move(next);
            }
            if (poly.empty()) break;
        }
        if (poly.empty()) continue;
        // bump factors
        std::vector<BumpFactor> fs;
        bool term_zero = false;
        for (const auto& f : t.factors) {
            std::size_t nz = 0, col = 0;
            for (std::size_t b = 0; b < tdim; ++b)
                if (pi[f.coord][b] != 0) { ++nz; col = b; }
            if (nz == 0) {
                Rat u0 = -f.center / f.radius;
                if (u0 >= 1 || u0 <= -1) { term_zero = true; break; }
                return std::nullopt; // irrational constant factor
            }
            if (nz > 1) return std::nullopt;
            Rat slope = Rat(pi[f.coord][col]);
            Rat r = f.radius / abs(slope);
            BumpFactor g{col, f.center / slope, r, f.bump_exp, f.inv_exp};
            auto it = std::find_if(fs.begin(), fs.end(), [&](const BumpFactor& h) {
                return h.coord == g.coord;
            });
            if (it == fs.end()) {
                fs.push_back(g);
            } else if (it->center == g.center && it->radius == g.radius) {
                it->bump_exp += g.bump_exp;
                it->inv_exp += g.inv_exp;
            } else {
                return std::nullopt;
            }
        }
        if (term_zero) continue;
        for (const auto& [expo, coef] : poly) {
            CoefTerm nt;
            nt.c = coef;
            nt.expo = expo;
            nt.factors = fs;
            out.push_back(std::move(nt));
        }
    }
    return profile_normalize(std::move(out));
}

std::vector<std::vector<std::size_t>> index_subsets(std::size_t n, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    if (k > n) return out;
    WedgeIndex wi(n, k);
    for (std::size_t i = 0; i < wi.size(); ++i) out.push_back(wi.subset(i));
    return out;
}

} // namespace

BoundaryVerdict boundary_condition_check(const Superform& f, const Fan& fan) {
    const AmbientFan& amb = fan.ambient;
    for (const auto& ch : f.charts) {
        if (ch.orbit >= amb.cones.size() || ch.chart_dim != amb.chart_dim(ch.orbit))
            throw invariant_error("chart-mismatch",
                                  "declared chart does not match the ambient fan");
    }
    for (std::size_t so = 0; so < amb.cones.size(); ++so) {
        for (std::size_t to = 0; to < amb.cones.size(); ++to) {
            if (so == to || !amb.is_face_of(to, so)) continue;
            const ChartTerms* cs = f.chart(so);
            const ChartTerms* ct = f.chart(to);
            if (!cs && !ct) continue;
            std::size_t tdim = amb.chart_dim(to);
            auto pi = orbit_projection(amb, so, to);

            auto asets = index_subsets(tdim, f.p);
            auto bsets = index_subsets(tdim, f.q);

            // symbolic pullback where the class allows
            bool symbolic_ok = true;
            std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>,
                     CoefProfile>
                pulled;
            if (cs) {
                for (const auto& t : cs->terms) {
                    auto comp = compose_linear(t.coef, pi, tdim);
                    if (!comp) { symbolic_ok = false; break; }
                    if (comp->empty()) continue;
                    for (const auto& A : asets) {
                        Rat dI = f.p == 0 ? Rat(1) : int_minor(pi, t.I, A);
                        if (dI == 0) continue;
                        for (const auto& B : bsets) {
                            Rat dJ = f.q == 0 ? Rat(1) : int_minor(pi, t.J, B);
                            if (dJ == 0) continue;
                            auto& slot = pulled[{A, B}];
                            slot = profile_add(slot,
                                               profile_scale(dI * dJ, *comp));
                        }
                    }
                }
            }
            if (symbolic_ok) {
                std::map<std::pair<std::vector<std::size_t>,
                                   std::vector<std::size_t>>,
                         CoefProfile>
                    taus;
                if (ct)
                    for (const auto& t : ct->terms) taus[{t.I, t.J}] = t.coef;
                bool equal = true;
                std::set<std::pair<std::vector<std::size_t>,
                                   std::vector<std::size_t>>>
                    keys;
                for (const auto& [k, v] : pulled) keys.insert(k);
                for (const auto& [k, v] : taus) keys.insert(k);
                for (const auto& k : keys) {
                    auto itp = pulled.find(k);
                    auto itt = taus.find(k);
                    CoefProfile diff = profile_add(
                        itp == pulled.end() ? CoefProfile{} : itp->second,
                        profile_scale(Rat(-1), itt == taus.end() ? CoefProfile{}
                                                                 : itt->second));
                    if (!diff.empty()) { equal = false; break; }
                }
                if (equal) continue; // pair certified symbolically
            }

            // numeric decision on deep sample points
            auto p0 = orbit_projection(amb, to, 0);
            std::vector<double> w(tdim, 0.0);
            for (auto ridx : amb.cones[so]) {
                for (std::size_t i = 0; i < tdim; ++i) {
                    double acc = 0;
                    for (std::size_t j = 0; j < amb.rank; ++j)
                        acc += to_double(Rat(p0[i][j])) *
                               to_double(Rat(amb.rays[ridx][j]));
                    w[i] += acc;
                }
            }
            std::mt19937 rng(9001u + 131u * static_cast<unsigned>(so) +
                             static_cast<unsigned>(to));
            std::uniform_real_distribution<double> box(-2.5, 2.5);
            for (int sample = 0; sample < 334; ++sample) {
                std::vector<double> x0(tdim);
                for (auto& xi : x0) xi = box(rng);
                for (double t : {6.0, 9.0, 12.0}) {
                    std::vector<double> x(tdim);
                    for (std::size_t i = 0; i < tdim; ++i)
                        x[i] = x0[i] + t * w[i];
                    std::vector<double> px(pi.size());
                    for (std::size_t i = 0; i < pi.size(); ++i) {
                        double acc = 0;
                        for (std::size_t j = 0; j < tdim; ++j)
                            acc += to_double(Rat(pi[i][j])) * x[j];
                        px[i] = acc;
                    }
                    for (const auto& A : asets) {
                        for (const auto& B : bsets) {
                            double lhs = 0;
                            if (ct)
                                for (const auto& tm : ct->terms)
                                    if (tm.I == A && tm.J == B)
                                        lhs += profile_eval(tm.coef, x);
                            double rhs = 0;
                            if (cs) {
                                for (const auto& tm : cs->terms) {
                                    Rat dI = f.p == 0 ? Rat(1)
                                                      : int_minor(pi, tm.I, A);
                                    Rat dJ = f.q == 0 ? Rat(1)
                                                      : int_minor(pi, tm.J, B);
                                    if (dI == 0 || dJ == 0) continue;
                                    rhs += to_double(dI * dJ) *
                                           profile_eval(tm.coef, px);
                                }
                            }
                            double scale = std::max(
                                1.0, std::max(std::abs(lhs), std::abs(rhs)));
                            if (std::abs(lhs - rhs) > 1e-9 * scale) {
                                BoundaryVerdict v;
                                v.pass = false;
                                v.witness = BoundaryWitness{so, to, x};
                                return v;
                            }
                        }
                    }
                }
            }
        }
    }
    return {};
}

namespace {

struct CellContext {
    const ChartTerms* chart = nullptr;
    std::size_t dim = 0;
    std::size_t nt = 0; // parameters
};

CellContext cell_context(const CellMap& cell, const Superform& f) {
    CellContext cx;
    cx.chart = f.chart(cell.orbit);
    cx.nt = cell.directions.size();
    if (cx.chart) {
        cx.dim = cx.chart->chart_dim;
        if (cell.base.size() != cx.dim)
            throw invariant_error("cell-shape", "base point outside the chart");
        for (const auto& d : cell.directions)
            if (d.size() != cx.dim)
                throw invariant_error("cell-shape", "direction outside the chart");
        if (cell.range.size() != cx.nt)
            throw invariant_error("cell-shape", "one range per direction required");
        if (cx.nt != f.q)
            throw invariant_error("cell-shape",
                                  "cell dimension must match the d'' degree");
    }
    return cx;
}

Rat pairing(const CellContext& cx, const RatVec& v,
            const std::vector<std::size_t>& I, std::size_t p) {
    WedgeIndex wi(cx.dim, p);
    if (v.size() != wi.size())
        throw invariant_error("cell-shape", "coefficient size differs from wedge");
    return v[wi.index_of(I)];
}

Rat direction_det(const CellMap& cell, const std::vector<std::size_t>& J) {
    std::size_t q = J.size();
    if (q == 0) return 1;
    RatMatrix m(q, q);
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = 0; b < q; ++b)
            m.at(a, b) = Rat(cell.directions[b][J[a]]);
    return det(m);
}

// multivariate polynomial in the cell parameters
using TPoly = std::map<IntVec, Rat>;

TPoly compose_poly(const CoefTerm& t, const CellMap& cell, std::size_t nt) {
    TPoly poly;
    poly[IntVec(nt, Int(0))] = t.c;
    for (std::size_t c = 0; c < t.expo.size(); ++c) {
        long e = t.expo[c].convert_to<long>();
        for (long rep = 0; rep < e; ++rep) {
            TPoly next;
            for (const auto& [expo, coef] : poly) {
                if (cell.base[c] != 0) next[expo] += coef * cell.base[c];
                for (std::size_t b = 0; b < nt; ++b) {
                    if (cell.directions[b][c] == 0) continue;
                    IntVec e2 = expo;
                    e2[b] += 1;
                    next[e2] += coef * Rat(cell.directions[b][c]);
                }
            }
            poly = std::move(next);
            if (poly.empty()) break;
        }
    }
    return poly;
}

Rat box_integral(const TPoly& poly, const CellMap& cell) {
    Rat total = 0;
    for (const auto& [expo, coef] : poly) {
        Rat part = coef;
        for (std::size_t b = 0; b < expo.size(); ++b) {
            unsigned long e = expo[b].convert_to<unsigned long>();
            const Rat lo = cell.range[b].first;
            const Rat hi = *cell.range[b].second;
            part *= (rat_pow(hi, e + 1) - rat_pow(lo, e + 1)) / Rat(e + 1);
        }
        total += part;
    }
    return total;
}

// support box of one coefficient term over the cell parameters; nullopt
// when the region is empty. Throws on an unconfined unbounded direction.
std::optional<std::vector<std::pair<Rat, Rat>>>
term_support_box(const CoefTerm& t, const CellMap& cell, std::size_t nt) {
    // rows a.t >= rhs
    std::vector<RatVec> rows;
    RatVec rhs;
    std::vector<IntVec> rec_eqs, rec_ineqs;
    for (std::size_t b = 0; b < nt; ++b) {
        RatVec e(nt, Rat(0));
        e[b] = 1;
        rows.push_back(e);
        rhs.push_back(cell.range[b].first);
        IntVec ei(nt, Int(0));
        ei[b] = 1;
        if (cell.range[b].second) {
            RatVec me(nt, Rat(0));
            me[b] = -1;
            rows.push_back(me);
            rhs.push_back(-*cell.range[b].second);
            rec_eqs.push_back(ei);
        } else {
            rec_ineqs.push_back(ei);
        }
    }
    for (const auto& f : t.factors) {
        RatVec d(nt, Rat(0));
        IntVec di(nt, Int(0));
        bool nonzero = false;
        for (std::size_t b = 0; b < nt; ++b) {
            d[b] = Rat(cell.directions[b][f.coord]);
            di[b] = cell.directions[b][f.coord];
            if (d[b] != 0) nonzero = true;
        }
        Rat x0 = cell.base[f.coord];
        if (!nonzero) {
            Rat u0 = (x0 - f.center) / f.radius;
            if (u0 >= 1 || u0 <= -1) return std::nullopt; // term vanishes
            continue;
        }
        rows.push_back(d);
        rhs.push_back(f.center - f.radius - x0);
        RatVec md(nt, Rat(0));
        for (std::size_t b = 0; b < nt; ++b) md[b] = -d[b];
        rows.push_back(md);
        rhs.push_back(x0 - f.center - f.radius);
        rec_eqs.push_back(di);
    }
    if (!cone_rays_from_inequalities(rec_ineqs, rec_eqs, nt).empty())
        throw invariant_error("divergent-integral",
                              "unbounded direction without a confining bump");
    if (nt == 0) return std::vector<std::pair<Rat, Rat>>{};
    // vertex enumeration over nt-subsets of active constraints
    std::vector<RatVec> verts;
    std::vector<std::size_t> pick(nt);
    auto feasible = [&](const RatVec& x) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            Rat s = 0;
            for (std::size_t b = 0; b < nt; ++b) s += rows[r][b] * x[b];
            if (s < rhs[r]) return false;
        }
        return true;
    };
    // iterate subsets via combination stepping
    std::vector<std::size_t> comb(nt);
    for (std::size_t i = 0; i < nt; ++i) comb[i] = i;
    while (true) {
        RatMatrix m(nt, nt);
        RatVec b(nt);
        for (std::size_t i = 0; i < nt; ++i) {
            for (std::size_t j = 0; j < nt; ++j) m.at(i, j) = rows[comb[i]][j];
            b[i] = rhs[comb[i]];
        }
        if (det(m) != 0) {
            auto x = solve(m, b);
            if (x && feasible(*x)) verts.push_back(*x);
        }
        // next combination
        std::size_t i = nt;
        while (i > 0) {
            --i;
            if (comb[i] + (nt - i) < rows.size()) {
                ++comb[i];
                for (std::size_t j = i + 1; j < nt; ++j) comb[j] = comb[j - 1] + 1;
                break;
            }
            if (i == 0) { i = nt + 1; break; }
        }
        if (i == nt + 1 || nt == 0) break;
    }
    if (verts.empty()) return std::nullopt;
    std::vector<std::pair<Rat, Rat>> box;
    for (std::size_t b = 0; b < nt; ++b) {
        Rat lo = verts[0][b], hi = verts[0][b];
        for (const auto& v : verts) {
            lo = std::min(lo, v[b]);
            hi = std::max(hi, v[b]);
        }
        box.emplace_back(lo, hi);
    }
    return box;
}

double eval_term_at(const CoefTerm& t, const CellMap& cell,
                    const std::vector<double>& tp) {
    std::size_t dim = cell.base.size();
    std::vector<double> x(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        double acc = to_double(cell.base[c]);
        for (std::size_t b = 0; b < tp.size(); ++b)
            acc += to_double(Rat(cell.directions[b][c])) * tp[b];
        x[c] = acc;
    }
    double v = to_double(t.c);
    for (std::size_t i = 0; i < t.expo.size(); ++i) {
        long e = t.expo[i].convert_to<long>();
        for (long k = 0; k < e; ++k) v *= x[i];
    }
    for (const auto& f : t.factors) v *= eval_factor(f, x[f.coord]);
    return v;
}

double quad_term(const CoefTerm& t, const CellMap& cell,
                 const std::vector<std::pair<Rat, Rat>>& box) {
    std::size_t nt = box.size();
    if (nt == 0) return eval_term_at(t, cell, {});
    const int panels = 8;
    const auto& rule = gl16();
    // per-axis node/weight lists over all panels
    std::vector<std::vector<double>> nodes(nt), weights(nt);
    for (std::size_t b = 0; b < nt; ++b) {
        double lo = to_double(box[b].first), hi = to_double(box[b].second);
        if (!(hi > lo)) return 0.0;
        double width = (hi - lo) / panels;
        for (int pnl = 0; pnl < panels; ++pnl) {
            double a = lo + pnl * width;
            double half = width / 2;
            for (std::size_t k = 0; k < rule.node.size(); ++k) {
                nodes[b].push_back(a + half * (rule.node[k] + 1.0));
                weights[b].push_back(half * rule.weight[k]);
            }
        }
    }
    std::vector<double> contributions;
    std::vector<std::size_t> at(nt, 0);
    while (true) {
        std::vector<double> tp(nt);
        double w = 1.0;
        for (std::size_t b = 0; b < nt; ++b) {
            tp[b] = nodes[b][at[b]];
            w *= weights[b][at[b]];
        }
        contributions.push_back(w * eval_term_at(t, cell, tp));
        std::size_t b = 0;
        while (b < nt && ++at[b] == nodes[b].size()) {
            at[b] = 0;
            ++b;
        }
        if (b == nt) break;
    }
    return pairwise_sum(std::move(contributions));
}

} // namespace

std::optional<Rat> integrate_cell_exact(const CellMap& cell, const RatVec& v,
                                        const Superform& f) {
    auto cx = cell_context(cell, f);
    if (!cx.chart) return Rat(0);
    Rat total = 0;
    for (const auto& t : cx.chart->terms) {
        Rat pv = pairing(cx, v, t.I, f.p);
        if (pv == 0) continue;
        Rat dj = direction_det(cell, t.J);
        if (dj == 0) continue;
        if (!profile_is_polynomial(t.coef)) return std::nullopt;
        for (std::size_t b = 0; b < cx.nt; ++b)
            if (!cell.range[b].second) return std::nullopt;
        Rat cellint = 0;
        for (const auto& ct : t.coef)
            cellint += box_integral(compose_poly(ct, cell, cx.nt), cell);
        total += pv * dj * cellint;
    }
    return total;
}

double integrate_cell(const CellMap& cell, const RatVec& v, const Superform& f) {
    auto exact = integrate_cell_exact(cell, v, f);
    if (exact) return to_double(*exact);
    auto cx = cell_context(cell, f);
    std::vector<double> parts;
    for (const auto& t : cx.chart->terms) {
        Rat pv = pairing(cx, v, t.I, f.p);
        if (pv == 0) continue;
        Rat dj = direction_det(cell, t.J);
        if (dj == 0) continue;
        for (const auto& ct : t.coef) {
            auto box = term_support_box(ct, cell, cx.nt);
            if (!box) continue;
            parts.push_back(to_double(pv * dj) * quad_term(ct, cell, *box));
        }
    }
    return pairwise_sum(std::move(parts));
}

double integrate(const TropChainClass& chain, const Superform& f) {
    if (f.p != chain.degree || f.q != chain.degree)
        throw invariant_error("degree-mismatch",
                              "the form bidegree must match the chain degree");
    std::vector<double> parts;
    for (std::size_t i = 0; i < chain.fan.cones.size(); ++i) {
        const auto& cone = chain.fan.cones[i];
        if (cone.dim() != chain.degree) continue;
        bool zero = true;
        for (const auto& c : chain.coeff[i])
            if (c != 0) { zero = false; break; }
        if (zero) continue;
        if (!f.chart(cone.orbit)) continue;
        CellMap cell;
        cell.orbit = cone.orbit;
        cell.base.assign(cone.chart_dim, Rat(0));
        cell.directions = cone.rays;
        cell.range.assign(cone.rays.size(), {Rat(0), std::nullopt});
        parts.push_back(integrate_cell(cell, chain.coeff[i], f));
    }
    return pairwise_sum(std::move(parts));
}

} // namespace tropmap
