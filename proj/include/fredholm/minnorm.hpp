#pragma once

// Closed-form minimal-norm solutions of degenerate first-kind equations
//
//     int_E k(x,t) u(t) dt = f(x),   k(x,t) = sum_i g_i(x) h_i(t).
//
// The operator's null-space complement is span{h_i}, so the minimal-norm
// (least-squares) solution is u(t) = beta^T H(t) with beta = H^{-1} C, where
// f = C^T G(x) is the L2(D) projection of f onto span{g_i} and H is the Gram
// matrix of the h-family.  Its squared norm is C^T H^{-1} C.

#include "fredholm/gram.hpp"

#include <cmath>
#include <functional>
#include <variant>

namespace fredholm {

inline constexpr double kDefaultInRangeTol = 1e-8;

/// Values on E, positional in E's axis order.
using Evaluator = std::function<double(std::span<const double>)>;

/// Closed form sum_k coeffs[k] * basis[k] over a domain.
class Expansion {
public:
  Expansion() = default;
  Expansion(Vector coeffs, std::vector<FuncExpr> basis, Domain dom);

  double operator()(std::span<const double> t) const;
  double operator()(const Point& p) const { return (*this)(dom_.coords(p)); }

  const Vector& coeffs() const noexcept { return coeffs_; }
  const std::vector<FuncExpr>& basis() const noexcept { return basis_; }
  const Domain& domain() const noexcept { return dom_; }

  FuncExpr as_expr() const;
  Evaluator evaluator() const;

private:
  Vector coeffs_;
  std::vector<FuncExpr> basis_;
  Domain dom_;
};

/// Right-hand side: either coefficients C with f = C^T G(x), or a general f.
struct RhsSpec {
  std::variant<Vector, FuncExpr> value;

  static RhsSpec coeffs(Vector c) { return {std::move(c)}; }
  static RhsSpec func(FuncExpr f) { return {std::move(f)}; }
  bool is_coeffs() const noexcept { return std::holds_alternative<Vector>(value); }
};

enum class SolveMode { Exact, LeastSquares };

struct MinNormSolution {
  Vector beta;              // coefficients of u in the h-basis
  Vector C;                 // rhs coefficients in the g-basis
  double norm_sq = 0.0;     // C^T H^{-1} C
  double in_range_residual = 0.0;
  SolveMode mode = SolveMode::Exact;
  Expansion u;

  double norm() const { return std::sqrt(norm_sq); }
};

struct RhsProjection {
  Vector C;
  double residual = 0.0; // ||f - C^T G||_{L2(D)} / max(||f||, tiny)
};

/// L2(D) projection of f onto span{g_i}: C = G^{-1} Fg.  Needs gram.Fg.
RhsProjection project_rhs(const FuncExpr& f, const SeparableKernel& kernel, const GramSet& gram);

MinNormSolution solve_min_norm(const RhsSpec& rhs, const SeparableKernel& kernel,
                               const GramSet& gram, double in_range_tol = kDefaultInRangeTol);

/// C := A^{-1} F, then the same pipeline.  Throws SingularMatrixError when A
/// is rank deficient; callers fall back to solve_min_norm.  When `f` is given
/// the in-range residual of C^T G against it is reported.
MinNormSolution solve_theorem1(const SeparableKernel& kernel, const GramSet& gram,
                               const std::optional<FuncExpr>& f = std::nullopt,
                               double in_range_tol = kDefaultInRangeTol);

/// Numerical rank of A, judged after scaling its rows by ||h_i|| and its
/// columns by ||g_j||.  Needs cross terms.
int cross_rank(const GramSet& gram);

/// Comparison baseline u(t) = ((A^{-1})^2 F)^T G(t), written in the g-basis.
struct LegacySolution {
  Vector coeffs;
  double norm_sq = 0.0; // coeffs^T G coeffs
  Expansion u;
};

LegacySolution solve_prop1(const SeparableKernel& kernel, const GramSet& gram);

struct Corollary2Report {
  bool consistent = false;
  double max_deviation = 0.0; // max |u_legacy - u_dagger| over the grid
  double k_mismatch = 0.0;    // max |G(t) - K H(t)| over the grid
  double norm_sq_legacy = 0.0;
  double norm_sq_dagger = 0.0;
};

inline constexpr double kCorollary2Tol = 1e-8;

/// With G(x) = K H(x) for invertible K the legacy and minimal-norm solutions
/// coincide.  Throws PreconditionError when K does not factor G.
Corollary2Report check_corollary2(const SeparableKernel& kernel, const GramSet& gram,
                                  const Matrix& K, int grid_points = 200);

/// Orthogonal projection onto N(L): v - sum_ij (H^{-1})_ij <h_j, v> h_i, in closed form.
FuncExpr null_project(const FuncExpr& v, const SeparableKernel& kernel, const GramSet& gram);

/// Orthonormal null-space functions phi_i with coefficients c_i.
struct NullComponent {
  std::vector<FuncExpr> phis;
  std::vector<double> coeffs;
  std::size_t dropped = 0; // candidates removed as dependent
};

/// Projects the candidates onto N(L) and orthonormalises them in order
/// (Householder QR of the sampled projections).  A candidate is dropped when,
/// with every column scaled by its candidate's norm, it would push the
/// smallest singular value of the sampled set below 1e-5.  `coeffs` may be
/// shorter than the resulting basis; missing entries are zero.
NullComponent make_null_component(const std::vector<FuncExpr>& candidates,
                                  std::vector<double> coeffs, const SeparableKernel& kernel,
                                  const GramSet& gram);

/// Shifted Legendre polynomials on E of total degree <= `degree`.
std::vector<FuncExpr> legendre_candidates(const Domain& E, int degree);

struct StructuredSolution {
  Evaluator u;
  double norm_sq_formula = 0.0;    // ||u_dagger||^2 + sum c_i^2
  double norm_sq_quadrature = 0.0; // int_E u^2
  double pythagoras_rel_dev = 0.0;
  double max_operator_deviation = 0.0; // max |L(u) - L(u_dagger)| on a grid in D
};

StructuredSolution compose_structure(const MinNormSolution& u_dagger, const NullComponent& null,
                                     const SeparableKernel& kernel, const GramSet& gram);

/// K(x, x') = G(x)^T H G(x').
double rk_eval(const Point& x, const Point& x_prime, const SeparableKernel& kernel,
               const GramSet& gram);

/// (<h_1,u>, ..., <h_n,u>) by quadrature on E.
Vector moments(const Evaluator& u, const SeparableKernel& kernel, const QuadratureRule& rule);

/// L(u)(x) = int_E k(x,t) u(t) dt = sum_i g_i(x) <h_i, u>.
double apply_operator(const Evaluator& u, const SeparableKernel& kernel, const Point& x,
                      const QuadratureRule& rule);

struct ResidualReport {
  double max_abs = 0.0;
  double rel_l2 = 0.0;
};

/// Residual L(u) - f on a uniform grid with m points per axis of D (endpoints included).
ResidualReport residual_report(const Evaluator& u, const SeparableKernel& kernel,
                               const FuncExpr& f, int m, const QuadratureRule& rule);

/// Same, for a rhs given as g-coefficients.
ResidualReport residual_report(const Evaluator& u, const SeparableKernel& kernel,
                               const Vector& C, int m, const QuadratureRule& rule);

/// Uniform tensor grid with m points per axis, endpoints included (m >= 2).
std::vector<std::vector<double>> uniform_grid(const Domain& dom, int m);

} // namespace fredholm
