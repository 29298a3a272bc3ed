#pragma once
// The analytic side of the tropical limit: chains in the complex torus
// parametrized over boxes by expression-tree charts, pullbacks of
// superforms along the rescaled logarithm map z |-> -eps log|z|, the
// eps -> 0 limit with Richardson extrapolation, logarithmic period
// integrals, boundary face maps of charts with a declared circle-bundle
// splitting, and the weighted tropicalization assembled from them.
//
// Conventions. A (p,q)-superform with coefficient f pulls back to the
// (p+q)-form
//
//   f(-eps log|z|) .
//       prod_{j in J} d(-(eps/2) log zbar_j) ^ prod_{i in I} d(-(1/2 pi i) log z_i),
//
// antiholomorphic factors first. Pullbacks are evaluated on frames of
// complexified tangent vectors, so on a polar frame the (1,1) factor
// equals d(-eps log r) ^ (1/2 pi) d(-theta) and the closed holomorphic
// factors carry no eps.
//
// Errors: invariant_error tags "chain-shape", "degree-mismatch",
// "chart-mismatch", "eps-schedule", "log-profile", "product-structure",
// "chain-boundary", "chain-degree", "rationality"; numeric_error for
// quadrature refinement, integrand magnitude, cross-check, and divergent
// limit budgets.

#include "tropmap/cycles.hpp"
#include "tropmap/superform.hpp"

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace tropmap {

using Cpx = std::complex<double>;

// ---------------------------------------------------------------------
// Expression trees for chart maps, with forward-mode derivatives.

enum class ExprOp { Constant, Param, Add, Sub, Mul, Div, Exp, Log, Polar };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprOp op = ExprOp::Constant;
    Cpx value;              // Constant payload
    std::size_t param = 0;  // Param payload: index into the chart box
    Expr a, b;
};

Expr expr_const(Cpx v);
Expr expr_param(std::size_t k);
Expr expr_add(Expr a, Expr b);
Expr expr_sub(Expr a, Expr b);
Expr expr_mul(Expr a, Expr b);
Expr expr_div(Expr a, Expr b);
Expr expr_exp(Expr a);
// Principal branch.
Expr expr_log(Expr a);
// polar(r, t) = r exp(i t).
Expr expr_polar(Expr r, Expr t);

struct ExprJet {
    Cpx value;
    std::vector<Cpx> d; // one partial per chart parameter
};

// Value and all first partials at the real parameter point t.
ExprJet expr_eval(const Expr& e, const std::vector<double>& t);

// ---------------------------------------------------------------------
// Parametrized chains.

// Declares -log|z_coord(t)| = row . t + offset exactly on the chart, which
// is what confines quadrature to the support windows of bump profiles.
struct LogAffine {
    std::vector<double> row;
    double offset = 0;
};

struct ChainChart;

// Declared splitting of a chart near the boundary divisor of `ray`: along
// `approach_axis` the chart runs into the divisor (at the upper or lower
// end of its range), `circle_axis` parametrizes the phase circle around
// it, and `boundary` describes the limit chain in the quotient torus with
// the divisor coordinate dropped. Only rays on coordinate axes are
// supported, so quotients always drop one coordinate.
struct ProductStructure {
    IntVec ray;
    std::size_t approach_axis = 0;
    bool at_max_end = true;
    std::size_t circle_axis = 1;
    std::size_t divisor_coord = 0;
    std::vector<ChainChart> boundary;
};

struct ChainChart {
    std::vector<std::pair<double, double>> box; // one range per parameter
    std::vector<Expr> coords;                   // one tree per torus coordinate
    int orientation = 1;
    Rat multiplicity = 1;
    std::vector<std::optional<LogAffine>> log_abs; // per coordinate, optional
    std::vector<ProductStructure> structures;
};

struct ParamChain {
    std::size_t torus_dim = 0; // n
    std::size_t dim = 0;       // r, the box dimension of every chart
    std::vector<ChainChart> charts;
    std::vector<ChainChart> boundary; // declared boundary; empty for cycles
};

struct EpsSchedule {
    double eps0 = 0.2;
    double ratio = 0.5;
    std::size_t levels = 7;
    std::size_t order = 2; // Richardson: linear, then quadratic
};

struct QuadratureCfg {
    std::size_t gl_order = 16;
    std::size_t max_depth = 6;     // panel count doubles per refinement step
    double tol = 1e-8;             // relative refinement target
    double magnitude_budget = 1e9; // largest admissible integrand sample
    std::size_t mc_samples = 0;    // Monte Carlo cross-check when positive
    unsigned mc_seed = 20260822u;
};

struct Estimate {
    Cpx value;
    double error = 0;
};

// ---------------------------------------------------------------------
// Operations.

// Pullback of the dense-chart form along -eps log|.|, evaluated at
// z in the torus on p+q complexified tangent vectors.
Cpx pullback_eval(const Superform& w, double eps, const std::vector<Cpx>& z,
                  const std::vector<std::vector<Cpx>>& frame);

// Integral of the pullback over the chain, by composite Gauss-Legendre
// with dyadic refinement, restricted termwise to the bump support windows
// that declared log_abs rows carve out of the boxes.
Estimate eps_integral(const ParamChain& V, const Superform& w, double eps,
                      const QuadratureCfg& cfg);

struct LimitLevel {
    double eps;
    Cpx value;
    double error;
};

struct LimitResult {
    Cpx value; // extrapolated
    std::vector<LimitLevel> level;
    double slope = 0; // estimated convergence order; 0 when flat to noise
};

// eps_integral along the schedule, Richardson-extrapolated. Throws
// numeric_error when the level differences grow three times in a row
// beyond the quadrature noise.
LimitResult limit_integral(const ParamChain& V, const Superform& w,
                           const EpsSchedule& s, const QuadratureCfg& cfg);

// Integral over the chain of the wedge of -(1/2 pi i) d log z^m, one
// factor per monomial exponent vector; dim(V) factors in total. A
// 0-dimensional chain integrates the empty product to its signed mass.
Estimate log_integral(const ParamChain& V, const std::vector<IntVec>& monomials,
                      const QuadratureCfg& cfg);

// Structural consistency of every chart: box rank against the chain
// dimension, one coordinate tree per torus coordinate, unit orientation,
// well-formed log rows. Throws invariant_error on violation.
void validate_chain(const ParamChain& V);

// Splits a signed coordinate ray into (axis, sign); rays touching more
// than one axis or with non-unit entries are rejected.
std::pair<std::size_t, int> coordinate_ray_axis(const IntVec& ray);

// Boundary face map along a coordinate ray: each chart with a declared
// product structure for the ray contributes its boundary charts, with
// multiplicity scaled by the winding number of the divisor coordinate
// around the phase circle and the orientation sign of peeling the two
// axes off the box. Charts without a declaration must stay away from the
// divisor.
ParamChain face_map(const ParamChain& V, const IntVec& ray);

struct RationalityResult {
    Cpx value;
    double error = 0;
    std::optional<Rat> reconstructed; // denominator at most 100
};

// Logarithmic period of a closed chain with rational reconstruction of
// the (real) value. Chains with declared boundary are rejected.
RationalityResult rationality_check(const ParamChain& V,
                                    const std::vector<IntVec>& monomials,
                                    const QuadratureCfg& cfg = {});

// Weighted tropicalization of a 2p-dimensional chain over the fan: the
// weight of each interior p-dimensional cone is the signed mass of the
// iterated face map along its rays, paired with the orientation generator
// as in weighted_chain. Cones of other dimensions carry zero. Requires
// every weighted cone to be spanned by coordinate rays with declared
// product structures down the chain.
TropChainClass weighted_tropicalization(const ParamChain& V, const Fan& lambda,
                                        const QuadratureCfg& cfg = {});

} // namespace tropmap
