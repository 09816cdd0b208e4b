#pragma once

#include "fredholm/expr.hpp"

#include <span>
#include <vector>

namespace fredholm {

/// Gauss-Legendre rule on the reference interval [-1,1], applied composite
/// with `panels` equal subintervals per axis.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;
  int panels = 1;
};

inline constexpr int kDefaultQuadOrder = 32;
inline constexpr int kDefaultPanels = 4;

/// Nodes and weights by Newton iteration on the three-term Legendre
/// recurrence.  1 <= order <= 256, panels >= 1.
QuadratureRule gauss_legendre(int order, int panels = 1);

inline QuadratureRule default_rule() { return gauss_legendre(kDefaultQuadOrder, kDefaultPanels); }

/// Flattened tensor-product nodes: point k occupies coords[k*dim .. k*dim+dim).
/// Ordering is lexicographic with the last axis fastest, fixed for a given
/// (domain, rule), so every reduction over it is bit-reproducible.
struct TensorGrid {
  std::size_t dim = 0;
  std::vector<double> coords;
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  std::span<const double> point(std::size_t k) const {
    return {coords.data() + k * dim, dim};
  }
};

TensorGrid tensor_grid(const Domain& dom, const QuadratureRule& rule);

/// Values of f at every grid node.  Domain errors are rethrown with the node
/// location attached.
std::vector<double> sample(const FuncExpr& f, const Domain& dom, const TensorGrid& grid);

/// sum_k w_k a_k b_k, accumulated in index order.
double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w);

double integrate(const FuncExpr& f, const Domain& dom, const QuadratureRule& rule);

/// <f, g>_{L2(dom)}
double inner_product(const FuncExpr& f, const FuncExpr& g, const Domain& dom,
                     const QuadratureRule& rule);

} // namespace fredholm
