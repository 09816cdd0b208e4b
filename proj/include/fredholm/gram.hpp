#pragma once

#include "fredholm/expr.hpp"
#include "fredholm/quadrature.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace fredholm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultCondThreshold = 1e12;
inline constexpr std::size_t kMaxTerms = 64;

/// Degenerate kernel k(x,t) = sum_i g_i(x) h_i(t), g_i on D and h_i on E.
class SeparableKernel {
public:
  SeparableKernel(std::vector<FuncExpr> gs, std::vector<FuncExpr> hs, Domain D, Domain E);

  std::size_t n() const noexcept { return gs_.size(); }
  const std::vector<FuncExpr>& gs() const noexcept { return gs_; }
  const std::vector<FuncExpr>& hs() const noexcept { return hs_; }
  const Domain& D() const noexcept { return D_; }
  const Domain& E() const noexcept { return E_; }

  /// G(x) = (g_1(x), ..., g_n(x)); x positional in D's axis order.
  Vector g_at(std::span<const double> x) const;
  /// H(t) = (h_1(t), ..., h_n(t)); t positional in E's axis order.
  Vector h_at(std::span<const double> t) const;

  double operator()(std::span<const double> x, std::span<const double> t) const;

private:
  std::vector<FuncExpr> gs_;
  std::vector<FuncExpr> hs_;
  Domain D_;
  Domain E_;
};

struct GramOptions {
  /// Also assemble A_ij = int_E h_i g_j and F_k = int_E f h_k.  Needs D and E
  /// of the same shape; g and f are then evaluated on E's nodes.
  bool cross_terms = false;
  double cond_threshold = kDefaultCondThreshold;
};

struct GramSet {
  Matrix H;                 // int_E h_i h_j
  Matrix G;                 // int_D g_i g_j
  std::optional<Matrix> A;  // int_E h_i g_j
  std::optional<Vector> F;  // int_E f h_k
  std::optional<Vector> Fg; // <f, g_k>_{L2(D)}
  double condH = 0.0;
  double condG = 0.0;
  double cond_threshold = kDefaultCondThreshold;
  QuadratureRule rule;
};

/// Builds every matrix with the one shared rule.  Throws ConditioningError
/// (E_GRAM_SINGULAR) naming the most collinear pair when cond(H) exceeds the
/// threshold.
GramSet assemble(const SeparableKernel& kernel, const std::optional<FuncExpr>& f,
                 const QuadratureRule& rule, const GramOptions& options = {});

/// 2-norm condition number of a symmetric matrix; +inf when not positive definite.
double condition_number_spd(const Matrix& M);

/// Inverse via Cholesky.  Throws ConditioningError on a non-SPD pivot or when
/// cond(M) exceeds the threshold.
Matrix invert_spd(const Matrix& M, double cond_threshold = kDefaultCondThreshold,
                  const char* label = "matrix");

/// Rank-revealing solve of M x = b.  `x` is empty when M is rank deficient.
struct GeneralSolve {
  std::optional<Vector> x;
  int rank = 0;

  bool singular() const noexcept { return !x.has_value(); }
};

/// Pivots at or below rel_threshold * max pivot, or at or below abs_threshold
/// when it is positive, count as zero.
GeneralSolve solve_general(const Matrix& M, const Vector& b, double rel_threshold = 1e-10,
                           double abs_threshold = 0.0);

} // namespace fredholm
