#include "fredholm/quadrature.hpp"

#include "fredholm/error.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <numbers>

namespace fredholm {

QuadratureRule gauss_legendre(int order, int panels) {
  if (order < 1 || order > 256)
    throw PreconditionError("Gauss-Legendre order must lie in [1, 256], got " +
                            std::to_string(order));
  if (panels < 1)
    throw PreconditionError("panel count must be >= 1, got " + std::to_string(panels));

  const auto n = static_cast<std::size_t>(order);
  QuadratureRule rule;
  rule.order = order;
  rule.panels = panels;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  // (P_n(z), P_{n-1}(z)) by the three-term recurrence.
  auto legendre = [n](double z) {
    double p0 = 1.0;
    double p1 = z;
    for (std::size_t k = 2; k <= n; ++k) {
      const double kd = static_cast<double>(k);
      const double p2 = ((2.0 * kd - 1.0) * z * p1 - (kd - 1.0) * p0) / kd;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, p0};
  };

  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess for the i-th largest root.
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [pn, pm] = legendre(z);
      const double dp = static_cast<double>(n) * (z * pn - pm) / (z * z - 1.0);
      const double dz = pn / dp;
      z -= dz;
      if (std::abs(dz) <= 1e-16)
        break;
    }
    const auto [pn, pm] = legendre(z);
    const double dp = static_cast<double>(n) * (z * pn - pm) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);

    if (2 * i + 1 == n)
      z = 0.0;
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

TensorGrid tensor_grid(const Domain& dom, const QuadratureRule& rule) {
  const std::size_t d = dom.dim();
  const std::size_t per_panel = rule.nodes.size();
  const auto panels = static_cast<std::size_t>(rule.panels);

  std::vector<std::vector<double>> axis_nodes(d), axis_weights(d);
  for (std::size_t a = 0; a < d; ++a) {
    const auto& ax = dom.axis(a);
    const double h = (ax.hi - ax.lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double left = ax.lo + static_cast<double>(p) * h;
      for (std::size_t q = 0; q < per_panel; ++q) {
        axis_nodes[a].push_back(left + 0.5 * h * (rule.nodes[q] + 1.0));
        axis_weights[a].push_back(0.5 * h * rule.weights[q]);
      }
    }
  }

  const std::size_t m = per_panel * panels;
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a)
    total *= m;

  TensorGrid grid;
  grid.dim = d;
  grid.coords.resize(total * d);
  grid.weights.resize(total);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t k = 0; k < total; ++k) {
    double w = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      grid.coords[k * d + a] = axis_nodes[a][idx[a]];
      w *= axis_weights[a][idx[a]];
    }
    grid.weights[k] = w;
    for (std::size_t a = d; a-- > 0;) {
      if (++idx[a] < m)
        break;
      idx[a] = 0;
    }
  }
  return grid;
}

std::vector<double> sample(const FuncExpr& f, const Domain& dom, const TensorGrid& grid) {
  if (f.vars().size() > grid.dim)
    throw PreconditionError("expression has more variables than the domain has axes");
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    try {
      values[k] = f(grid.point(k));
    } catch (const DomainError& e) {
      std::string loc;
      const auto p = grid.point(k);
      for (std::size_t a = 0; a < grid.dim; ++a) {
        if (a)
          loc += ", ";
        loc += dom.axis(a).name + "=" + shortest_repr(p[a]);
      }
      throw e.at("quadrature node (" + loc + ")");
    }
  }
  return values;
}

double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w) {
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k)
    s += w[k] * a[k] * b[k];
  return s;
}

namespace {

void check_vars(const FuncExpr& f, const Domain& dom) {
  const auto names = dom.names();
  for (const auto& v : f.vars())
    if (std::find(names.begin(), names.end(), v) == names.end())
      throw PreconditionError("variable '" + v + "' is not an axis of the domain");
  // Positional evaluation requires the expression's variables to be a
  // prefix of the domain axes in the same order.
  for (std::size_t k = 0; k < f.vars().size(); ++k)
    if (f.vars()[k] != names[k])
      throw PreconditionError("expression variables must follow the domain axis order");
}

} // namespace

double integrate(const FuncExpr& f, const Domain& dom, const QuadratureRule& rule) {
  check_vars(f, dom);
  const auto grid = tensor_grid(dom, rule);
  const auto values = sample(f, dom, grid);
  double s = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    s += grid.weights[k] * values[k];
  return s;
}

double inner_product(const FuncExpr& f, const FuncExpr& g, const Domain& dom,
                     const QuadratureRule& rule) {
  check_vars(f, dom);
  check_vars(g, dom);
  const auto grid = tensor_grid(dom, rule);
  const auto fv = sample(f, dom, grid);
  const auto gv = sample(g, dom, grid);
  return weighted_dot(fv, gv, grid.weights);
}

} // namespace fredholm
