#include "tropmap/tropcoh.hpp"

#include "tropmap/errors.hpp"
#include "tropmap/intlattice.hpp"

#include <algorithm>
#include <optional>
#include <string>

namespace tropmap {

namespace {

IntVec apply_int(const std::vector<IntVec>& m, const IntVec& x) {
    IntVec out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        Int acc = 0;
        for (std::size_t j = 0; j < x.size(); ++j) acc += m[i][j] * x[j];
        out[i] = acc;
    }
    return out;
}

bool is_zero_vec(const IntVec& v) {
    for (const auto& x : v)
        if (x != 0) return false;
    return true;
}

// Image of the ambient cone tau inside the chart of orbit sigma.
Cone star_image(const AmbientFan& amb, std::size_t sigma, std::size_t tau) {
    auto proj = orbit_projection(amb, sigma, 0);
    std::vector<IntVec> gens;
    for (auto idx : amb.cones[tau]) {
        auto im = apply_int(proj, amb.rays[idx]);
        if (!is_zero_vec(im)) gens.push_back(im);
    }
    return Cone::make(sigma, amb.chart_dim(sigma), gens);
}

RatMatrix projection_matrix(const AmbientFan& amb, std::size_t deep,
                            std::size_t shallow) {
    auto rows = orbit_projection(amb, deep, shallow);
    RatMatrix m(rows.size(), amb.chart_dim(shallow));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = Rat(rows[i][j]);
    return m;
}

int permutation_parity(const std::vector<std::size_t>& pos) {
    int s = 1;
    for (std::size_t i = 0; i < pos.size(); ++i)
        for (std::size_t j = i + 1; j < pos.size(); ++j)
            if (pos[i] > pos[j]) s = -s;
    return s;
}

} // namespace

CoefSpace coefficient_space(const Fan& fan, const Cone& p, std::size_t degree) {
    if (!fan.find(p))
        throw invariant_error("not-in-fan", "cell is not a cone of the fan");
    WedgeIndex wi(p.chart_dim, degree);
    auto acc = Subspace::zero(wi.size());
    for (const auto& c : fan.cones) {
        if (c.orbit != p.orbit || !c.contains_cone(p)) continue;
        auto span = Subspace::span_of(to_rat_rows(c.span_lattice), p.chart_dim);
        acc = subspace_sum(acc, wedge_power_span(span, degree));
    }
    return CoefSpace{p, degree, acc};
}

RestrictionMap restriction(const Fan& fan, const Cone& p1, const Cone& p2,
                           std::size_t degree) {
    bool face = false;
    for (const auto& g : cone_faces(fan.ambient, p1))
        if (g.same_cone(p2)) { face = true; break; }
    if (!face)
        throw invariant_error("not-a-face", "restriction target is not a face");

    auto src = coefficient_space(fan, p1, degree);
    auto tgt = coefficient_space(fan, p2, degree);
    std::optional<RatMatrix> wedge_proj;
    if (p1.orbit != p2.orbit)
        wedge_proj =
            wedge_power_matrix(projection_matrix(fan.ambient, p2.orbit, p1.orbit), degree);

    RatMatrix m(tgt.space.dim(), src.space.dim());
    for (std::size_t j = 0; j < src.space.dim(); ++j) {
        RatVec v = src.space.basis[j];
        if (wedge_proj) v = wedge_proj->apply(v);
        auto coords = tgt.space.coordinates_of(v);
        if (!coords)
            throw invariant_error("restriction-image",
                                  "restricted vector leaves the target space");
        for (std::size_t i = 0; i < coords->size(); ++i) m.at(i, j) = (*coords)[i];
    }
    return RestrictionMap{std::move(src), std::move(tgt), std::move(m)};
}

CellComplex build_complex(const Fan& fan, std::size_t degree) {
    CellComplex cc;
    cc.fan = fan;
    cc.degree = degree;
    for (const auto& c : fan.cones)
        if (c.rays.size() != c.dim())
            throw invariant_error("non-simplicial",
                                  "fan has a non-simplicial cone; subdivide first");

    std::size_t maxq = fan.dim();
    cc.cells_by_dim.assign(maxq + 1, {});
    cc.block_dim.assign(maxq + 1, 0);
    cc.offset.assign(fan.cones.size(), 0);
    for (std::size_t i = 0; i < fan.cones.size(); ++i) {
        cc.coef.push_back(coefficient_space(fan, fan.cones[i], degree));
        std::size_t q = fan.cones[i].dim();
        cc.offset[i] = cc.block_dim[q];
        cc.block_dim[q] += cc.coef[i].space.dim();
        cc.cells_by_dim[q].push_back(i);
    }

    // block of the boundary matrix: the restriction map between cached
    // coefficient spaces
    auto restr = [&](std::size_t si, std::size_t ti) {
        const auto& src = cc.coef[si].space;
        const auto& tgt = cc.coef[ti].space;
        std::optional<RatMatrix> wedge_proj;
        if (fan.cones[si].orbit != fan.cones[ti].orbit)
            wedge_proj = wedge_power_matrix(
                projection_matrix(fan.ambient, fan.cones[ti].orbit, fan.cones[si].orbit),
                degree);
        RatMatrix m(tgt.dim(), src.dim());
        for (std::size_t j = 0; j < src.dim(); ++j) {
            RatVec v = src.basis[j];
            if (wedge_proj) v = wedge_proj->apply(v);
            auto coords = tgt.coordinates_of(v);
            if (!coords)
                throw invariant_error("restriction-image",
                                      "restricted vector leaves the target space");
            for (std::size_t i = 0; i < coords->size(); ++i) m.at(i, j) = (*coords)[i];
        }
        return m;
    };

    cc.boundary.clear();
    cc.boundary.push_back(RatMatrix(0, cc.block_dim[0]));
    for (std::size_t q = 1; q <= maxq; ++q)
        cc.boundary.push_back(RatMatrix(cc.block_dim[q - 1], cc.block_dim[q]));

    auto add_block = [&](std::size_t ci, const Cone& face, int sign) {
        auto fi = cc.fan.find(face);
        if (!fi)
            throw invariant_error("fan-closure", "boundary cell missing from the fan");
        auto m = restr(ci, *fi);
        std::size_t q = fan.cones[ci].dim();
        auto& b = cc.boundary[q];
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t s = 0; s < m.cols(); ++s)
                b.at(cc.offset[*fi] + r, cc.offset[ci] + s) += Rat(sign) * m.at(r, s);
    };

    for (std::size_t ci = 0; ci < fan.cones.size(); ++ci) {
        const Cone& p = fan.cones[ci];
        std::size_t d = p.dim();
        if (d == 0) continue;
        for (std::size_t j = 0; j < d; ++j) {
            int sign = (j % 2 == 0) ? 1 : -1;

            std::vector<IntVec> rest;
            for (std::size_t i = 0; i < d; ++i)
                if (i != j) rest.push_back(p.rays[i]);
            add_block(ci, Cone::make(p.orbit, p.chart_dim, rest), -sign);

            // the face at the far end of ray j, in the chart the ray
            // escapes to; a face whose image drops dimension is collapsed
            // and contributes nothing
            for (std::size_t tau = 0; tau < fan.ambient.cones.size(); ++tau) {
                if (tau == p.orbit || !fan.ambient.is_face_of(p.orbit, tau)) continue;
                auto tbar = star_image(fan.ambient, p.orbit, tau);
                if (!tbar.relint_contains(to_rat(p.rays[j]))) continue;
                auto proj = orbit_projection(fan.ambient, tau, p.orbit);
                std::vector<IntVec> images;
                for (std::size_t i = 0; i < d; ++i) {
                    if (i == j) continue;
                    auto im = apply_int(proj, p.rays[i]);
                    if (!is_zero_vec(im)) images.push_back(im);
                }
                if (images.size() + 1 == d) {
                    auto qt = Cone::make(tau, fan.ambient.chart_dim(tau), images);
                    if (qt.dim() + 1 == d) {
                        std::vector<std::size_t> pos;
                        bool ok = true;
                        for (const auto& im : images) {
                            auto pr = primitive(im);
                            auto it = std::find(qt.rays.begin(), qt.rays.end(), pr);
                            if (it == qt.rays.end()) { ok = false; break; }
                            pos.push_back(std::size_t(it - qt.rays.begin()));
                        }
                        if (ok)
                            add_block(ci, qt, sign * permutation_parity(pos));
                    }
                }
                break; // the escape chart of a ray is unique
            }
        }
    }

    for (std::size_t q = 2; q <= maxq; ++q)
        if (!cc.boundary[q - 1].mul(cc.boundary[q]).is_zero())
            throw invariant_error("boundary-square",
                                  "boundary does not square to zero at q = " +
                                      std::to_string(q));
    return cc;
}

HomologyResult homology(const CellComplex& cc) {
    HomologyResult hr;
    hr.degree = cc.degree;
    std::size_t nq = cc.block_dim.size();
    hr.ranks.assign(nq, 0);
    for (std::size_t q = 0; q < nq; ++q) {
        long dim_c = long(cc.block_dim[q]);
        long r_out = (q >= 1) ? rank(cc.boundary[q]) : 0;
        long r_in = (q + 1 < nq) ? rank(cc.boundary[q + 1]) : 0;
        hr.ranks[q] = dim_c - r_out - r_in;
    }
    return hr;
}

std::pair<std::size_t, Subspace> tropical_K_F0(const Fan& fan, std::size_t degree) {
    auto zero = Cone::make(0, fan.ambient.rank, {});
    if (!fan.find(zero))
        throw invariant_error("kgroup", "fan does not contain the origin cone");
    auto fp = coefficient_space(fan, zero, degree);
    std::size_t w = WedgeIndex(fan.ambient.rank, degree).size();
    auto j0 = kernel_basis(RatMatrix::from_rows(fp.space.basis, w));
    return {fp.space.dim(), j0};
}

} // namespace tropmap
