#include "fredholm/minnorm.hpp"

#include "fredholm/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fredholm {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();
constexpr double kNullDropRatio = 1e-5;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

double max_abs_entry(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

std::vector<double> sample_evaluator(const Evaluator& u, const TensorGrid& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    out[k] = u(grid.point(k));
  return out;
}

// ||f - C^T G||_{L2(D)} / max(||f||, tiny), evaluated pointwise at the nodes.
double range_residual(const FuncExpr& f, const Vector& C, const SeparableKernel& kernel,
                      const QuadratureRule& rule) {
  const auto grid = tensor_grid(kernel.D(), rule);
  const auto fv = sample(f, kernel.D(), grid);
  std::vector<double> r = fv;
  for (std::size_t i = 0; i < kernel.n(); ++i) {
    const auto gv = sample(kernel.gs()[i], kernel.D(), grid);
    const double c = C(idx(i));
    for (std::size_t k = 0; k < r.size(); ++k)
      r[k] -= c * gv[k];
  }
  const double rn = std::sqrt(weighted_dot(r, r, grid.weights));
  const double fn = std::sqrt(weighted_dot(fv, fv, grid.weights));
  return rn / std::max(fn, kTiny);
}

MinNormSolution from_coefficients(Vector C, const SeparableKernel& kernel, const GramSet& gram) {
  const Matrix Hinv = invert_spd(gram.H, gram.cond_threshold, "H");
  MinNormSolution sol;
  sol.C = std::move(C);
  sol.beta = Hinv * sol.C;
  sol.norm_sq = std::max(0.0, sol.C.dot(sol.beta));
  sol.u = Expansion(sol.beta, kernel.hs(), kernel.E());
  return sol;
}

ResidualReport residual_on_grid(const Vector& mom, const SeparableKernel& kernel, int m,
                                const std::function<double(std::span<const double>)>& f) {
  if (m < 2)
    throw PreconditionError("residual grid needs at least 2 points per axis");
  const auto pts = uniform_grid(kernel.D(), m);
  ResidualReport rep;
  double r2 = 0.0;
  double f2 = 0.0;
  for (const auto& x : pts) {
    const double lu = kernel.g_at(x).dot(mom);
    const double fx = f(x);
    const double r = lu - fx;
    rep.max_abs = std::max(rep.max_abs, std::abs(r));
    r2 += r * r;
    f2 += fx * fx;
  }
  rep.rel_l2 = std::sqrt(r2) / (f2 > 0.0 ? std::sqrt(f2) : 1.0);
  return rep;
}

} // namespace

// ---------------------------------------------------------------------------

Expansion::Expansion(Vector coeffs, std::vector<FuncExpr> basis, Domain dom)
    : coeffs_(std::move(coeffs)), basis_(std::move(basis)), dom_(std::move(dom)) {
  if (static_cast<std::size_t>(coeffs_.size()) != basis_.size())
    throw PreconditionError("expansion: coefficient/basis size mismatch");
}

double Expansion::operator()(std::span<const double> t) const {
  double s = 0.0;
  for (std::size_t k = 0; k < basis_.size(); ++k)
    s += coeffs_(idx(k)) * basis_[k](t);
  return s;
}

FuncExpr Expansion::as_expr() const {
  std::vector<double> c(coeffs_.data(), coeffs_.data() + coeffs_.size());
  if (basis_.empty())
    return FuncExpr::constant(0.0, dom_.names());
  return FuncExpr::linear_combination(c, basis_);
}

Evaluator Expansion::evaluator() const {
  return [self = *this](std::span<const double> t) { return self(t); };
}

std::vector<std::vector<double>> uniform_grid(const Domain& dom, int m) {
  if (m < 2)
    throw PreconditionError("uniform grid needs at least 2 points per axis");
  const std::size_t d = dom.dim();
  std::vector<std::vector<double>> out;
  std::vector<int> ix(d, 0);
  for (;;) {
    std::vector<double> p(d);
    for (std::size_t a = 0; a < d; ++a) {
      const auto& ax = dom.axis(a);
      p[a] = ix[a] == m - 1 ? ax.hi : ax.lo + (ax.hi - ax.lo) * ix[a] / (m - 1);
    }
    out.push_back(std::move(p));
    std::size_t a = d;
    while (a-- > 0) {
      if (++ix[a] < m)
        break;
      ix[a] = 0;
    }
    if (a == static_cast<std::size_t>(-1))
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------

RhsProjection project_rhs(const FuncExpr& f, const SeparableKernel& kernel, const GramSet& gram) {
  if (!gram.Fg)
    throw PreconditionError("project_rhs needs a Gram set assembled with the rhs");
  if (!(gram.condG <= gram.cond_threshold))
    throw ConditioningError("E_GRAM_G_SINGULAR",
                            "g-family numerically dependent: cond(G) = " + shortest_repr(gram.condG),
                            gram.condG);
  RhsProjection out;
  out.C = invert_spd(gram.G, gram.cond_threshold, "G") * (*gram.Fg);
  out.residual = range_residual(f, out.C, kernel, gram.rule);
  return out;
}

MinNormSolution solve_min_norm(const RhsSpec& rhs, const SeparableKernel& kernel,
                               const GramSet& gram, double in_range_tol) {
  if (const auto* c = std::get_if<Vector>(&rhs.value)) {
    if (static_cast<std::size_t>(c->size()) != kernel.n())
      throw PreconditionError("rhs has " + std::to_string(c->size()) + " coefficients, kernel has " +
                              std::to_string(kernel.n()) + " terms");
    return from_coefficients(*c, kernel, gram);
  }
  const auto& f = std::get<FuncExpr>(rhs.value);
  const auto proj = project_rhs(f, kernel, gram);
  auto sol = from_coefficients(proj.C, kernel, gram);
  sol.in_range_residual = proj.residual;
  sol.mode = proj.residual <= in_range_tol ? SolveMode::Exact : SolveMode::LeastSquares;
  return sol;
}

namespace {

// A x = b with A judged after scaling rows by ||h_i|| and columns by ||g_j||,
// so that its entries are cosines and rank is decided on an absolute scale.
GeneralSolve solve_cross(const GramSet& gram, const Vector& b) {
  const Vector dh = gram.H.diagonal().cwiseSqrt();
  const Vector dg = gram.G.diagonal().cwiseSqrt();
  const Matrix scaled = dh.cwiseInverse().asDiagonal() * (*gram.A) * dg.cwiseInverse().asDiagonal();
  auto out = solve_general(scaled, dh.cwiseInverse().cwiseProduct(b), 1e-10, 1e-10);
  if (out.x)
    out.x = dg.cwiseInverse().cwiseProduct(*out.x);
  return out;
}

} // namespace

int cross_rank(const GramSet& gram) {
  if (!gram.A)
    throw PreconditionError("rank of A needs a Gram set assembled with cross terms");
  return solve_cross(gram, Vector::Zero(gram.A->rows())).rank;
}

MinNormSolution solve_theorem1(const SeparableKernel& kernel, const GramSet& gram,
                               const std::optional<FuncExpr>& f, double in_range_tol) {
  if (!gram.A || !gram.F)
    throw PreconditionError("Theorem-1 path needs A and F (assemble with cross terms and a rhs)");
  const auto solved = solve_cross(gram, *gram.F);
  if (solved.singular())
    throw SingularMatrixError("A", solved.rank);
  auto sol = from_coefficients(*solved.x, kernel, gram);
  if (f) {
    sol.in_range_residual = range_residual(*f, sol.C, kernel, gram.rule);
    sol.mode = sol.in_range_residual <= in_range_tol ? SolveMode::Exact : SolveMode::LeastSquares;
  }
  return sol;
}

LegacySolution solve_prop1(const SeparableKernel& kernel, const GramSet& gram) {
  if (!gram.A || !gram.F)
    throw PreconditionError("legacy path needs A and F (assemble with cross terms and a rhs)");
  const auto first = solve_cross(gram, *gram.F);
  if (first.singular())
    throw SingularMatrixError("A", first.rank);
  const auto second = solve_cross(gram, *first.x);
  LegacySolution out;
  out.coeffs = *second.x;
  out.norm_sq = out.coeffs.dot(gram.G * out.coeffs);
  // g-factors read as functions on E (D and E share their shape here).
  std::vector<FuncExpr> basis;
  for (const auto& g : kernel.gs())
    basis.push_back(g.rename(kernel.E().names()));
  out.u = Expansion(out.coeffs, std::move(basis), kernel.E());
  return out;
}

Corollary2Report check_corollary2(const SeparableKernel& kernel, const GramSet& gram,
                                  const Matrix& K, int grid_points) {
  const auto n = idx(kernel.n());
  if (K.rows() != n || K.cols() != n)
    throw PreconditionError("K must be n x n");
  if (Eigen::FullPivLU<Matrix>(K).rank() != n)
    throw PreconditionError("K must be invertible");

  const int d = static_cast<int>(kernel.E().dim());
  const int per_axis =
      std::max(2, static_cast<int>(std::ceil(std::pow(static_cast<double>(grid_points), 1.0 / d))));
  const auto pts = uniform_grid(kernel.E(), per_axis);

  Corollary2Report rep;
  double scale = 1.0;
  for (const auto& t : pts) {
    const Vector g = kernel.g_at(t);
    rep.k_mismatch = std::max(rep.k_mismatch, max_abs_entry(g - K * kernel.h_at(t)));
    scale = std::max(scale, max_abs_entry(g));
  }
  if (rep.k_mismatch > 1e-10 * scale)
    throw PreconditionError("G(x) = K H(x) does not hold: max mismatch " +
                            shortest_repr(rep.k_mismatch));

  const auto legacy = solve_prop1(kernel, gram);
  const auto dagger = solve_theorem1(kernel, gram);
  for (const auto& t : pts)
    rep.max_deviation = std::max(rep.max_deviation, std::abs(legacy.u(t) - dagger.u(t)));
  rep.norm_sq_legacy = legacy.norm_sq;
  rep.norm_sq_dagger = dagger.norm_sq;
  rep.consistent = rep.max_deviation <= kCorollary2Tol;
  return rep;
}

// ---------------------------------------------------------------------------

FuncExpr null_project(const FuncExpr& v, const SeparableKernel& kernel, const GramSet& gram) {
  const auto grid = tensor_grid(kernel.E(), gram.rule);
  const auto vv = sample(v, kernel.E(), grid);
  Vector m(idx(kernel.n()));
  for (std::size_t j = 0; j < kernel.n(); ++j)
    m(idx(j)) = weighted_dot(sample(kernel.hs()[j], kernel.E(), grid), vv, grid.weights);
  const Vector coef = invert_spd(gram.H, gram.cond_threshold, "H") * m;
  std::vector<double> c(coef.data(), coef.data() + coef.size());
  return v - FuncExpr::linear_combination(c, kernel.hs());
}

NullComponent make_null_component(const std::vector<FuncExpr>& candidates,
                                  std::vector<double> coeffs, const SeparableKernel& kernel,
                                  const GramSet& gram) {
  const auto grid = tensor_grid(kernel.E(), gram.rule);
  const auto rows = idx(grid.size());

  // Weighted samples of the closed-form projections, so that Euclidean
  // products of columns are L2(E) products of the expressions themselves.
  NullComponent out;
  std::vector<FuncExpr> kept;
  std::vector<double> raw_norms;
  Matrix S(rows, 0);
  for (const auto& c : candidates) {
    const double raw = std::sqrt(std::max(0.0, inner_product(c, c, kernel.E(), gram.rule)));
    auto p = null_project(c, kernel, gram);
    const auto pv = sample(p, kernel.E(), grid);
    Vector col(rows);
    for (Eigen::Index k = 0; k < rows; ++k)
      col(k) = std::sqrt(grid.weights[static_cast<std::size_t>(k)]) * pv[static_cast<std::size_t>(k)];
    // Accept while the candidate-normalised columns stay well conditioned;
    // near-dependent directions would only be representable through large
    // cancelling coefficients.
    if (!(raw > 0.0)) {
      ++out.dropped;
      continue;
    }
    Matrix trial(rows, S.cols() + 1);
    trial << S, col;
    Matrix normed = trial;
    for (Eigen::Index j = 0; j + 1 < normed.cols(); ++j)
      normed.col(j) /= raw_norms[static_cast<std::size_t>(j)];
    normed.col(normed.cols() - 1) /= raw;
    const Eigen::JacobiSVD<Matrix> svd(normed);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (!(smin > kNullDropRatio)) {
      ++out.dropped;
      continue;
    }
    raw_norms.push_back(raw);
    S = std::move(trial);
    kept.push_back(std::move(p));
  }

  if (!kept.empty()) {
    const Eigen::HouseholderQR<Matrix> qr(S);
    const auto m = S.cols();
    Matrix R = qr.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
    // Positive diagonal: phi_k leans towards its own candidate.
    for (Eigen::Index k = 0; k < m; ++k)
      if (R(k, k) < 0.0)
        R.row(k) *= -1.0;
    const Matrix Rinv = R.triangularView<Eigen::Upper>().solve(Matrix::Identity(m, m));
    for (Eigen::Index k = 0; k < m; ++k) {
      std::vector<double> a(static_cast<std::size_t>(k + 1));
      for (Eigen::Index j = 0; j <= k; ++j)
        a[static_cast<std::size_t>(j)] = Rinv(j, k);
      out.phis.push_back(FuncExpr::linear_combination(
          a, std::span<const FuncExpr>(kept.data(), static_cast<std::size_t>(k + 1))));
    }
  }
  coeffs.resize(out.phis.size(), 0.0);
  out.coeffs = std::move(coeffs);
  return out;
}

std::vector<FuncExpr> legendre_candidates(const Domain& E, int degree) {
  if (degree < 0)
    throw PreconditionError("candidate degree must be >= 0");
  // Power-basis coefficients of P_0..P_degree on [-1,1].
  std::vector<std::vector<double>> P;
  P.push_back({1.0});
  if (degree >= 1)
    P.push_back({0.0, 1.0});
  for (int k = 1; k < degree; ++k) {
    std::vector<double> next(static_cast<std::size_t>(k) + 2, 0.0);
    for (std::size_t j = 0; j < P[k].size(); ++j)
      next[j + 1] += (2.0 * k + 1.0) * P[k][j] / (k + 1.0);
    for (std::size_t j = 0; j < P[k - 1].size(); ++j)
      next[j] -= k * P[k - 1][j] / (k + 1.0);
    P.push_back(std::move(next));
  }

  auto horner = [&](int k, const Axis& ax) {
    const std::string y = "(2*(" + ax.name + " - " + shortest_repr(ax.lo) + ")/(" +
                          shortest_repr(ax.hi - ax.lo) + ") - 1)";
    const auto& c = P[static_cast<std::size_t>(k)];
    std::string s = shortest_repr(c.back());
    for (std::size_t j = c.size() - 1; j-- > 0;)
      s = shortest_repr(c[j]) + " + " + y + "*(" + s + ")";
    return "(" + s + ")";
  };

  const auto names = E.names();
  const std::size_t d = E.dim();
  std::vector<FuncExpr> out;
  std::vector<int> deg(d, 0);
  for (;;) {
    int total = 0;
    for (int x : deg)
      total += x;
    if (total <= degree) {
      std::string text;
      for (std::size_t a = 0; a < d; ++a) {
        if (a)
          text += "*";
        text += horner(deg[a], E.axis(a));
      }
      out.push_back(FuncExpr::parse(text, names));
    }
    std::size_t a = d;
    while (a-- > 0) {
      if (++deg[a] <= degree)
        break;
      deg[a] = 0;
    }
    if (a == static_cast<std::size_t>(-1))
      break;
  }
  return out;
}

StructuredSolution compose_structure(const MinNormSolution& u_dagger, const NullComponent& null,
                                     const SeparableKernel& kernel, const GramSet& gram) {
  std::vector<FuncExpr> phis = null.phis;
  Vector c(idx(phis.size()));
  for (std::size_t i = 0; i < phis.size(); ++i)
    c(idx(i)) = i < null.coeffs.size() ? null.coeffs[i] : 0.0;
  const Expansion extra(c, phis, kernel.E());
  const Expansion base = u_dagger.u;

  StructuredSolution out;
  out.u = [base, extra](std::span<const double> t) { return base(t) + extra(t); };
  out.norm_sq_formula = u_dagger.norm_sq + c.squaredNorm();

  const auto grid = tensor_grid(kernel.E(), gram.rule);
  const auto uv = sample_evaluator(out.u, grid);
  out.norm_sq_quadrature = weighted_dot(uv, uv, grid.weights);
  out.pythagoras_rel_dev = std::abs(out.norm_sq_quadrature - out.norm_sq_formula) /
                           std::max(out.norm_sq_formula, kTiny);

  const Vector mu = moments(out.u, kernel, gram.rule);
  const Vector md = moments(u_dagger.u.evaluator(), kernel, gram.rule);
  for (const auto& x : uniform_grid(kernel.D(), 21)) {
    const Vector g = kernel.g_at(x);
    out.max_operator_deviation = std::max(out.max_operator_deviation, std::abs(g.dot(mu - md)));
  }
  return out;
}

double rk_eval(const Point& x, const Point& x_prime, const SeparableKernel& kernel,
               const GramSet& gram) {
  const Vector gx = kernel.g_at(kernel.D().coords(x));
  const Vector gy = kernel.g_at(kernel.D().coords(x_prime));
  // Pairing (i,j) with (j,i) keeps the result exactly symmetric in x and x'.
  double sum = 0.0;
  for (Eigen::Index i = 0; i < gx.size(); ++i) {
    sum += gram.H(i, i) * (gx(i) * gy(i));
    for (Eigen::Index j = i + 1; j < gx.size(); ++j)
      sum += gram.H(i, j) * (gx(i) * gy(j) + gx(j) * gy(i));
  }
  return sum;
}

Vector moments(const Evaluator& u, const SeparableKernel& kernel, const QuadratureRule& rule) {
  const auto grid = tensor_grid(kernel.E(), rule);
  const auto uv = sample_evaluator(u, grid);
  Vector m(idx(kernel.n()));
  for (std::size_t i = 0; i < kernel.n(); ++i)
    m(idx(i)) = weighted_dot(sample(kernel.hs()[i], kernel.E(), grid), uv, grid.weights);
  return m;
}

double apply_operator(const Evaluator& u, const SeparableKernel& kernel, const Point& x,
                      const QuadratureRule& rule) {
  return kernel.g_at(kernel.D().coords(x)).dot(moments(u, kernel, rule));
}

ResidualReport residual_report(const Evaluator& u, const SeparableKernel& kernel,
                               const FuncExpr& f, int m, const QuadratureRule& rule) {
  const Vector mom = moments(u, kernel, rule);
  return residual_on_grid(mom, kernel, m, [&f](std::span<const double> x) { return f(x); });
}

ResidualReport residual_report(const Evaluator& u, const SeparableKernel& kernel, const Vector& C,
                               int m, const QuadratureRule& rule) {
  if (static_cast<std::size_t>(C.size()) != kernel.n())
    throw PreconditionError("coefficient count does not match kernel");
  const Vector mom = moments(u, kernel, rule);
  return residual_on_grid(mom, kernel, m,
                          [&](std::span<const double> x) { return kernel.g_at(x).dot(C); });
}

} // namespace fredholm
