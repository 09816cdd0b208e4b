#pragma once

// Brute-force verifier.  The integral operator is replaced by the weighted
// Nystrom matrix M[k,j] = sqrt(v_k) k(x_k, t_j) sqrt(w_j), for which Euclidean
// norms approximate L2 norms, and the minimal-norm least-squares problem is
// solved with an SVD pseudo-inverse.  Nothing here touches the closed-form
// solver path.

#include "fredholm/gram.hpp"
#include "fredholm/minnorm.hpp"

namespace fredholm::oracle {

inline constexpr double kDefaultCutoff = 1e-10;

struct DiscreteOperator {
  Matrix M; // rows: x nodes, columns: t nodes
  TensorGrid t_grid;
  TensorGrid x_grid;
  Domain D;
  Domain E;
};

/// m_t and m_x are total node counts in [n, 2000]; a d-dimensional domain
/// gets about m^(1/d) Gauss-Legendre nodes per axis.
DiscreteOperator discretize(const SeparableKernel& kernel, int m_t, int m_x);

struct OracleSolution {
  std::vector<double> u; // sampled at t_grid nodes
  double norm = 0.0;     // discrete L2(E) norm
  int rank = 0;
};

/// Singular values at or below cutoff * sigma_max are treated as zero.
OracleSolution oracle_min_norm(const DiscreteOperator& dop, const FuncExpr& f,
                               double cutoff = kDefaultCutoff);

struct Comparison {
  double max_pointwise_dev = 0.0;
  double norm_dev = 0.0;
};

/// Deviations of the closed form from the oracle at the t nodes.  Throws
/// PreconditionError when the solution lives on a different domain.
Comparison compare(const MinNormSolution& closed, const DiscreteOperator& dop,
                   const OracleSolution& oracle);

} // namespace fredholm::oracle
