#include "fredholm/oracle.hpp"

#include "fredholm/error.hpp"

#include <cmath>

namespace fredholm::oracle {

namespace {

constexpr int kMaxNodes = 2000;

TensorGrid node_grid(const Domain& dom, int m) {
  const int d = static_cast<int>(dom.dim());
  const int per_axis =
      std::max(1, static_cast<int>(std::lround(std::pow(static_cast<double>(m), 1.0 / d))));
  // Gauss-Legendre orders are capped at 256; larger counts go composite.
  const int panels = (per_axis + 255) / 256;
  const int order = (per_axis + panels - 1) / panels;
  return tensor_grid(dom, gauss_legendre(order, panels));
}

} // namespace

DiscreteOperator discretize(const SeparableKernel& kernel, int m_t, int m_x) {
  const int n = static_cast<int>(kernel.n());
  if (m_t < n || m_t > kMaxNodes || m_x < n || m_x > kMaxNodes)
    throw PreconditionError("oracle sizes must lie in [n, 2000]");

  DiscreteOperator dop;
  dop.D = kernel.D();
  dop.E = kernel.E();
  dop.t_grid = node_grid(kernel.E(), m_t);
  dop.x_grid = node_grid(kernel.D(), m_x);

  const auto rows = static_cast<Eigen::Index>(dop.x_grid.size());
  const auto cols = static_cast<Eigen::Index>(dop.t_grid.size());
  Matrix Gx(rows, n);
  Matrix Ht(cols, n);
  for (int i = 0; i < n; ++i) {
    const auto gv = sample(kernel.gs()[static_cast<std::size_t>(i)], kernel.D(), dop.x_grid);
    const auto hv = sample(kernel.hs()[static_cast<std::size_t>(i)], kernel.E(), dop.t_grid);
    for (Eigen::Index k = 0; k < rows; ++k)
      Gx(k, i) = gv[static_cast<std::size_t>(k)];
    for (Eigen::Index j = 0; j < cols; ++j)
      Ht(j, i) = hv[static_cast<std::size_t>(j)];
  }

  dop.M.resize(rows, cols);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const double sv = std::sqrt(dop.x_grid.weights[static_cast<std::size_t>(k)]);
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double sw = std::sqrt(dop.t_grid.weights[static_cast<std::size_t>(j)]);
      dop.M(k, j) = sv * Gx.row(k).dot(Ht.row(j)) * sw;
    }
  }
  return dop;
}

OracleSolution oracle_min_norm(const DiscreteOperator& dop, const FuncExpr& f, double cutoff) {
  const auto fx = sample(f, dop.D, dop.x_grid);
  Vector b(dop.M.rows());
  for (Eigen::Index k = 0; k < b.size(); ++k)
    b(k) = std::sqrt(dop.x_grid.weights[static_cast<std::size_t>(k)]) *
           fx[static_cast<std::size_t>(k)];

  Eigen::BDCSVD<Matrix> svd(dop.M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double smax = sigma.size() ? sigma(0) : 0.0;

  OracleSolution out;
  Vector v = Vector::Zero(dop.M.cols());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (!(sigma(i) > cutoff * smax))
      break;
    ++out.rank;
    v += (svd.matrixU().col(i).dot(b) / sigma(i)) * svd.matrixV().col(i);
  }
  out.u.resize(static_cast<std::size_t>(v.size()));
  for (Eigen::Index j = 0; j < v.size(); ++j)
    out.u[static_cast<std::size_t>(j)] =
        v(j) / std::sqrt(dop.t_grid.weights[static_cast<std::size_t>(j)]);
  out.norm = v.norm();
  return out;
}

Comparison compare(const MinNormSolution& closed, const DiscreteOperator& dop,
                   const OracleSolution& oracle) {
  if (!(closed.u.domain() == dop.E))
    throw PreconditionError("closed-form solution and oracle live on different domains");
  if (oracle.u.size() != dop.t_grid.size())
    throw PreconditionError("oracle sample count does not match the discretisation");
  Comparison c;
  for (std::size_t j = 0; j < dop.t_grid.size(); ++j)
    c.max_pointwise_dev =
        std::max(c.max_pointwise_dev, std::abs(closed.u(dop.t_grid.point(j)) - oracle.u[j]));
  c.norm_dev = std::abs(closed.norm() - oracle.norm);
  return c;
}

} // namespace fredholm::oracle
