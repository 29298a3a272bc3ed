#include "doctest.h"

#include "tropmap/cycles.hpp"
#include "tropmap/errors.hpp"
#include "tropmap/superform.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace tropmap;

namespace {

IntVec iv(std::vector<long> xs) {
    IntVec v;
    for (auto x : xs) v.push_back(Int(x));
    return v;
}

CoefTerm mono(long c, std::vector<long> e) {
    CoefTerm t;
    t.c = Rat(c);
    t.expo = iv(std::move(e));
    return t;
}

CoefTerm bumped(long c, std::vector<long> e, std::size_t coord, Rat center,
                Rat radius, long m = 1, long k = 0) {
    CoefTerm t = mono(c, std::move(e));
    t.factors.push_back({coord, center, radius, m, k});
    return t;
}

Superform one_term(std::size_t p, std::size_t q, std::size_t dim,
                   std::vector<std::size_t> I, std::vector<std::size_t> J,
                   CoefProfile coef) {
    return Superform::make(p, q, {{0, dim, {{std::move(I), std::move(J),
                                             std::move(coef)}}}});
}

bool same_form(const Superform& a, const Superform& b) {
    return form_is_zero(form_add(a, form_scale(Rat(-1), b)));
}

double bump_val(double u) {
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u));
}

std::pair<Rat, std::optional<Rat>> seg(long lo, long hi) {
    return {Rat(lo), Rat(hi)};
}

std::pair<Rat, std::optional<Rat>> halfline(long lo) {
    return {Rat(lo), std::nullopt};
}

Superform random_form(std::mt19937& rng, std::size_t p, std::size_t q,
                      std::size_t dim) {
    std::uniform_int_distribution<int> coef(-4, 4);
    std::uniform_int_distribution<int> expo(0, 2);
    std::vector<FormTerm> terms;
    std::vector<std::size_t> idx(dim);
    for (std::size_t i = 0; i < dim; ++i) idx[i] = i;
    // all strictly increasing index pairs for small p,q over a small dim
    std::vector<std::vector<std::size_t>> psets, qsets;
    auto subsets = [&](std::size_t k) {
        std::vector<std::vector<std::size_t>> out;
        std::vector<std::size_t> cur;
        auto rec = [&](auto&& self, std::size_t start) -> void {
            if (cur.size() == k) {
                out.push_back(cur);
                return;
            }
            for (std::size_t i = start; i < dim; ++i) {
                cur.push_back(i);
                self(self, i + 1);
                cur.pop_back();
            }
        };
        rec(rec, 0);
        return out;
    };
    psets = subsets(p);
    qsets = subsets(q);
    for (const auto& I : psets) {
        for (const auto& J : qsets) {
            CoefProfile cp;
            for (int t = 0; t < 2; ++t) {
                std::vector<long> e;
                for (std::size_t i = 0; i < dim; ++i) e.push_back(expo(rng));
                cp.push_back(mono(coef(rng), e));
            }
            terms.push_back({I, J, std::move(cp)});
        }
    }
    return Superform::make(p, q, {{0, dim, std::move(terms)}});
}

} // namespace

TEST_CASE("profiles evaluate and differentiate exactly") {
    CoefProfile p = {mono(2, {2, 0}), mono(3, {0, 1})}; // 2 x1^2 + 3 x2
    CHECK(profile_eval(p, {2.0, 5.0}) == doctest::Approx(23.0).epsilon(1e-14));
    auto d1 = profile_derivative(p, 0); // 4 x1
    CHECK(profile_eval(d1, {2.0, 5.0}) == doctest::Approx(8.0).epsilon(1e-14));
    auto d2 = profile_derivative(p, 1);
    CHECK(profile_eval(d2, {7.0, 7.0}) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(profile_is_polynomial(p));

    CoefProfile b = {bumped(1, {0}, 0, Rat(0), Rat(1))};
    CHECK(!profile_is_polynomial(b));
    CHECK(profile_eval(b, {0.0}) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(profile_eval(b, {1.0}) == 0.0);
    CHECK(profile_eval(b, {-3.0}) == 0.0);
}

TEST_CASE("bump derivatives match difference quotients") {
    // plain bump and one carrying an inverse-power factor
    std::vector<CoefProfile> profs = {
        {bumped(1, {0, 0}, 0, Rat(0), Rat(1))},
        {bumped(2, {1, 0}, 0, Rat(1, 2), Rat(2), 1, 1)},
        {bumped(1, {0, 1}, 1, Rat(0), Rat(3), 2, 0)},
    };
    for (const auto& p : profs) {
        for (std::size_t coord = 0; coord < 2; ++coord) {
            auto dp = profile_derivative(p, coord);
            for (double x0 : {-0.7, -0.3, 0.2, 0.6}) {
                for (double x1 : {-1.5, 0.4, 2.1}) {
                    std::vector<double> x = {x0, x1};
                    const double h = 1e-5;
                    auto xp = x, xm = x;
                    xp[coord] += h;
                    xm[coord] -= h;
                    double fd =
                        (profile_eval(p, xp) - profile_eval(p, xm)) / (2 * h);
                    double ex = profile_eval(dp, x);
                    CHECK(std::abs(fd - ex) < 1e-4 * (1.0 + std::abs(ex)));
                }
            }
        }
    }
}

TEST_CASE("products merge equal windows and reject mismatched ones") {
    CoefProfile a = {bumped(2, {1}, 0, Rat(0), Rat(2))};
    CoefProfile b = {bumped(3, {0}, 0, Rat(0), Rat(2), 1, 1)};
    auto ab = profile_mul(a, b);
    REQUIRE(ab.size() == 1);
    CHECK(ab[0].c == 6);
    REQUIRE(ab[0].factors.size() == 1);
    CHECK(ab[0].factors[0].bump_exp == 2);
    CHECK(ab[0].factors[0].inv_exp == 1);

    CoefProfile c = {bumped(1, {0}, 0, Rat(1), Rat(2))};
    CHECK_THROWS_AS(profile_mul(a, c), invariant_error);
}

TEST_CASE("second differential acts as id tensor d") {
    // x1 d'x1 -> d'x1 (x) d''x1
    auto f = one_term(1, 0, 2, {0}, {}, {mono(1, {1, 0})});
    auto expected = one_term(1, 1, 2, {0}, {0}, {mono(1, {0, 0})});
    CHECK(same_form(d_double_prime(f), expected));

    // constant coefficients die
    auto c = one_term(1, 0, 2, {0}, {}, {mono(5, {0, 0})});
    CHECK(form_is_zero(d_double_prime(c)));
}

TEST_CASE("first differential carries the (-1)^q sign") {
    // x2 d''x1 -> -(d'x2 (x) d''x1)
    auto f = one_term(0, 1, 2, {}, {0}, {mono(1, {0, 1})});
    auto expected = one_term(1, 1, 2, {1}, {0}, {mono(-1, {0, 0})});
    CHECK(same_form(d_prime(f), expected));

    // functions pick up no sign: d'(x1^2 + 3 x2) = 2 x1 d'x1 + 3 d'x2
    auto g = one_term(0, 0, 2, {}, {}, {mono(1, {2, 0}), mono(3, {0, 1})});
    auto expected2 = Superform::make(
        1, 0,
        {{0, 2, {{{0}, {}, {mono(2, {1, 0})}}, {{1}, {}, {mono(3, {0, 0})}}}}});
    CHECK(same_form(d_prime(g), expected2));
}

TEST_CASE("differential identities hold on random polynomial forms") {
    std::mt19937 rng(20240822u);
    for (int it = 0; it < 8; ++it) {
        auto f = random_form(rng, 1, 1, 3);
        CHECK(form_is_zero(d_double_prime(d_double_prime(f))));
        CHECK(form_is_zero(d_prime(d_prime(f))));
        // d'd'' = -d''d'
        auto lhs = d_prime(d_double_prime(f));
        auto rhs = form_scale(Rat(-1), d_double_prime(d_prime(f)));
        CHECK(same_form(lhs, rhs));

        auto g = random_form(rng, 0, 1, 3);
        CHECK(form_is_zero(d_double_prime(d_double_prime(g))));
        CHECK(form_is_zero(d_prime(d_prime(g))));
    }
}

TEST_CASE("wedge products carry the bidegree sign") {
    auto a = one_term(1, 1, 2, {0}, {0}, {mono(1, {0, 0})});
    auto b = one_term(1, 1, 2, {1}, {1}, {mono(1, {0, 0})});
    // (d'x1 (x) d''x1) ^ (d'x2 (x) d''x2) = -(d'x1^d'x2 (x) d''x1^d''x2)
    auto expected = one_term(2, 2, 2, {0, 1}, {0, 1}, {mono(-1, {0, 0})});
    CHECK(same_form(wedge(a, b), expected));

    // repeated d' index annihilates
    CHECK(form_is_zero(wedge(a, a)));
}

TEST_CASE("graded Leibniz rule for the second differential") {
    std::mt19937 rng(777u);
    for (int it = 0; it < 6; ++it) {
        auto a = random_form(rng, 1, 0, 3); // p=1, q=0
        auto b = random_form(rng, 0, 1, 3);
        auto lhs = d_double_prime(wedge(a, b));
        auto rhs = form_add(wedge(d_double_prime(a), b),
                            form_scale(Rat(-1), wedge(a, d_double_prime(b))));
        // sign (-1)^{p+q} = -1 for (p,q) = (1,0)
        CHECK(same_form(lhs, rhs));

        auto c = random_form(rng, 1, 1, 3); // (-1)^{p+q} = +1
        auto d = random_form(rng, 0, 1, 3);
        auto lhs2 = d_double_prime(wedge(c, d));
        auto rhs2 = form_add(wedge(d_double_prime(c), d),
                             wedge(c, d_double_prime(d)));
        CHECK(same_form(lhs2, rhs2));
    }
}

namespace {

Fan line_compactified() {
    auto amb = AmbientFan::make(1, {iv({1}), iv({-1})}, {{}, {0}, {1}});
    std::vector<Cone> cones = {Cone::make(0, 1, {}),
                               Cone::make(0, 1, {iv({1})}),
                               Cone::make(0, 1, {iv({-1})}),
                               Cone::make(1, 0, {}), Cone::make(2, 0, {})};
    return Fan::build(amb, cones);
}

Fan halfplane_compactified() {
    auto amb = AmbientFan::make(2, {iv({1, 0})}, {{}, {0}});
    std::vector<Cone> cones = {Cone::make(0, 2, {}),
                               Cone::make(0, 2, {iv({1, 0})}),
                               Cone::make(1, 1, {})};
    return Fan::build(amb, cones);
}

} // namespace

TEST_CASE("boundary condition accepts forms that die toward the boundary") {
    auto fan = line_compactified();
    // (1,1) form supported in |x| < 2; the 0-dimensional boundary charts
    // carry no (1,1) terms, so the pullback comparison is 0 = 0 out deep
    auto f = Superform::make(
        1, 1,
        {{0, 1, {{{0}, {0}, {bumped(1, {0}, 0, Rat(0), Rat(2))}}}},
         {1, 0, {}},
         {2, 0, {}}});
    auto v = boundary_condition_check(f, fan);
    CHECK(v.pass);

    // a globally constant coefficient survives at infinity and fails
    auto g = Superform::make(1, 1,
                             {{0, 1, {{{0}, {0}, {mono(1, {0})}}},
                              },
                              {1, 0, {}},
                              {2, 0, {}}});
    auto w = boundary_condition_check(g, fan);
    CHECK(!w.pass);
    REQUIRE(w.witness.has_value());
    CHECK(w.witness->tau_orbit == 0);
}

TEST_CASE("boundary condition checks factorization through the projection") {
    auto fan = halfplane_compactified();
    // sigma = ray e1: its chart is the x2-line, projection (x1,x2) -> x2.
    // A coefficient with a surviving x1 factor cannot factor through it.
    auto bad = Superform::make(
        1, 1,
        {{0, 2, {{{1}, {1}, {bumped(1, {1, 0}, 1, Rat(0), Rat(2))}}}},
         {1, 1, {{{0}, {0}, {bumped(1, {0}, 0, Rat(0), Rat(2))}}}}});
    auto v = boundary_condition_check(bad, fan);
    CHECK(!v.pass);
    REQUIRE(v.witness.has_value());
    CHECK(v.witness->sigma_orbit == 1);
    CHECK(v.witness->tau_orbit == 0);

    // dropping the x1 dependence makes the two charts match symbolically
    auto good = Superform::make(
        1, 1,
        {{0, 2, {{{1}, {1}, {bumped(1, {0, 0}, 1, Rat(0), Rat(2))}}}},
         {1, 1, {{{0}, {0}, {bumped(1, {0}, 0, Rat(0), Rat(2))}}}}});
    CHECK(boundary_condition_check(good, fan).pass);

    // constant functions are pulled back from every chart
    auto cst = Superform::make(0, 0,
                               {{0, 2, {{{}, {}, {mono(5, {0, 0})}}}},
                                {1, 1, {{{}, {}, {mono(5, {0})}}}}});
    CHECK(boundary_condition_check(cst, fan).pass);
}

TEST_CASE("cell integrals: pairing, exactness, quadrature") {
    // <d'x1, e1> * int_0^1 x1 dx1 = 1/2
    auto f = one_term(1, 1, 2, {0}, {0}, {mono(1, {1, 0})});
    CellMap seg01{0, {Rat(0), Rat(0)}, {iv({1, 0})}, {seg(0, 1)}};
    auto ex = integrate_cell_exact(seg01, {Rat(1), Rat(0)}, f);
    REQUIRE(ex.has_value());
    CHECK(*ex == Rat(1, 2));
    CHECK(integrate_cell(seg01, {Rat(1), Rat(0)}, f) ==
          doctest::Approx(0.5).epsilon(1e-12));

    // a v orthogonal to d'x_I pairs to zero
    auto ex2 = integrate_cell_exact(seg01, {Rat(0), Rat(1)}, f);
    REQUIRE(ex2.has_value());
    CHECK(*ex2 == 0);

    // bump quadrature against an independent Simpson evaluation
    auto g = one_term(1, 1, 2, {0}, {0},
                      {bumped(1, {0, 0}, 0, Rat(3), Rat(1))});
    CellMap ray1{0, {Rat(0), Rat(0)}, {iv({1, 0})}, {halfline(0)}};
    double got = integrate_cell(ray1, {Rat(1), Rat(0)}, g);
    double simpson = 0.0;
    {
        int n = 4000;
        double a = 2.0, b = 4.0, h = (b - a) / n;
        for (int i = 0; i <= n; ++i) {
            double t = a + i * h;
            double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            simpson += w * bump_val(t - 3.0);
        }
        simpson *= h / 3.0;
    }
    CHECK(got == doctest::Approx(simpson).epsilon(1e-9));

    // polynomial coefficients cannot be integrated over an unbounded ray
    CHECK_THROWS_AS(integrate_cell(ray1, {Rat(1), Rat(0)}, f), invariant_error);
}

TEST_CASE("boundary and area integrals agree on a square window") {
    // omega = x1^2 x2 d''x1 + 3 x1 x2^2 d''x2 on the plane chart
    auto omega = Superform::make(
        0, 1,
        {{0, 2, {{{}, {0}, {mono(1, {2, 1})}}, {{}, {1}, {mono(3, {1, 2})}}}}});
    auto dd = d_double_prime(omega);
    auto expected =
        one_term(0, 2, 2, {}, {0, 1}, {mono(3, {0, 2}), mono(-1, {2, 0})});
    CHECK(same_form(dd, expected));

    RatVec one = {Rat(1)};
    CellMap square{0, {Rat(0), Rat(0)}, {iv({1, 0}), iv({0, 1})},
                   {seg(0, 2), seg(0, 2)}};
    auto area = integrate_cell_exact(square, one, dd);
    REQUIRE(area.has_value());
    CHECK(*area == Rat(32, 3));

    // counterclockwise boundary of [0,2]^2
    std::vector<CellMap> edges = {
        {0, {Rat(0), Rat(0)}, {iv({1, 0})}, {seg(0, 2)}},
        {0, {Rat(2), Rat(0)}, {iv({0, 1})}, {seg(0, 2)}},
        {0, {Rat(2), Rat(2)}, {iv({-1, 0})}, {seg(0, 2)}},
        {0, {Rat(0), Rat(2)}, {iv({0, -1})}, {seg(0, 2)}},
    };
    Rat total = 0;
    for (const auto& e : edges) {
        auto part = integrate_cell_exact(e, one, omega);
        REQUIRE(part.has_value());
        total += *part;
    }
    CHECK(total == Rat(32, 3));
}

TEST_CASE("chain integration pairs cells with matching support") {
    auto line = trop_hypersurface(
        {{Rat(1), iv({1, 0})}, {Rat(1), iv({0, 1})}, {Rat(1), iv({0, 0})}});
    auto chain = weighted_chain(line, 1);

    // bump window on the first axis: only the e1 ray contributes
    auto f = one_term(1, 1, 2, {0}, {0},
                      {bumped(1, {0, 0}, 0, Rat(3), Rat(1))});
    double val = integrate(chain, f);
    double expect = 0.0;
    {
        int n = 4000;
        double h = 2.0 / n;
        for (int i = 0; i <= n; ++i) {
            double t = 2.0 + i * h;
            double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            expect += w * bump_val(t - 3.0);
        }
        expect *= h / 3.0;
    }
    CHECK(val == doctest::Approx(expect).epsilon(1e-9));

    // linearity in the form
    auto g = one_term(1, 1, 2, {1}, {1},
                      {bumped(1, {0, 0}, 1, Rat(3), Rat(1))});
    double vf = integrate(chain, f);
    double vg = integrate(chain, g);
    double vs = integrate(chain, form_add(f, g));
    CHECK(vs == doctest::Approx(vf + vg).epsilon(1e-12));
    double v3 = integrate(chain, form_scale(Rat(3), f));
    CHECK(v3 == doctest::Approx(3 * vf).epsilon(1e-12));

    // degree mismatch is rejected
    auto h = one_term(0, 1, 2, {}, {0}, {mono(1, {0, 0})});
    CHECK_THROWS_AS(integrate(chain, h), invariant_error);
}
