#include "fredholm/gram.hpp"

#include "fredholm/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace fredholm {

namespace {

void require_axes(const FuncExpr& f, const Domain& dom, const char* what, std::size_t index) {
  const auto names = dom.names();
  const auto& vars = f.vars();
  bool ok = vars.size() <= names.size();
  for (std::size_t k = 0; ok && k < vars.size(); ++k)
    ok = vars[k] == names[k];
  if (!ok)
    throw PreconditionError(std::string(what) + std::to_string(index + 1) +
                            " must be written over the axes of its domain");
}

std::vector<std::vector<double>> sample_all(const std::vector<FuncExpr>& fs, const Domain& dom,
                                            const TensorGrid& grid) {
  std::vector<std::vector<double>> out;
  out.reserve(fs.size());
  for (const auto& f : fs)
    out.push_back(sample(f, dom, grid));
  return out;
}

Matrix gram_of(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
               std::span<const double> w) {
  Matrix M(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = weighted_dot(a[i], b[j], w);
  return M;
}

Matrix symmetrized(const Matrix& M) {
  Matrix S = 0.5 * (M + M.transpose());
  return S;
}

std::string collinear_pair(const Matrix& H, char family) {
  const auto n = H.rows();
  std::string out;
  if (n == 1) {
    out = std::string(1, family) + "1 has (numerically) zero norm";
    return out;
  }
  Eigen::Index bi = 0, bj = 1;
  double best = -1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double denom = std::sqrt(std::abs(H(i, i) * H(j, j)));
      const double c = denom > 0 ? std::abs(H(i, j)) / denom : 1.0;
      if (c > best) {
        best = c;
        bi = i;
        bj = j;
      }
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "most collinear pair %c%ld, %c%ld (|cosine| = %.17g)", family,
                static_cast<long>(bi + 1), family, static_cast<long>(bj + 1), best);
  return buf;
}

} // namespace

SeparableKernel::SeparableKernel(std::vector<FuncExpr> gs, std::vector<FuncExpr> hs, Domain D,
                                 Domain E)
    : gs_(std::move(gs)), hs_(std::move(hs)), D_(std::move(D)), E_(std::move(E)) {
  if (gs_.empty())
    throw PreconditionError("separable kernel needs at least one term");
  if (gs_.size() != hs_.size())
    throw PreconditionError("kernel factor counts differ: " + std::to_string(gs_.size()) +
                            " g-factors vs " + std::to_string(hs_.size()) + " h-factors");
  if (gs_.size() > kMaxTerms)
    throw PreconditionError("at most " + std::to_string(kMaxTerms) + " kernel terms supported");
  if (D_.dim() == 0 || E_.dim() == 0)
    throw PreconditionError("kernel domains must be non-empty");
  for (std::size_t i = 0; i < gs_.size(); ++i) {
    require_axes(gs_[i], D_, "g", i);
    require_axes(hs_[i], E_, "h", i);
  }
}

Vector SeparableKernel::g_at(std::span<const double> x) const {
  Vector v(static_cast<Eigen::Index>(n()));
  for (std::size_t i = 0; i < n(); ++i)
    v(static_cast<Eigen::Index>(i)) = gs_[i](x);
  return v;
}

Vector SeparableKernel::h_at(std::span<const double> t) const {
  Vector v(static_cast<Eigen::Index>(n()));
  for (std::size_t i = 0; i < n(); ++i)
    v(static_cast<Eigen::Index>(i)) = hs_[i](t);
  return v;
}

double SeparableKernel::operator()(std::span<const double> x, std::span<const double> t) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n(); ++i)
    s += gs_[i](x) * hs_[i](t);
  return s;
}

double condition_number_spd(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    return std::numeric_limits<double>::infinity();
  const auto& ev = eig.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (!(lo > 0.0))
    return std::numeric_limits<double>::infinity();
  return hi / lo;
}

GramSet assemble(const SeparableKernel& kernel, const std::optional<FuncExpr>& f,
                 const QuadratureRule& rule, const GramOptions& options) {
  GramSet gs;
  gs.rule = rule;
  gs.cond_threshold = options.cond_threshold;

  const auto gridE = tensor_grid(kernel.E(), rule);
  const auto gridD = tensor_grid(kernel.D(), rule);
  const auto hE = sample_all(kernel.hs(), kernel.E(), gridE);
  const auto gD = sample_all(kernel.gs(), kernel.D(), gridD);

  gs.H = symmetrized(gram_of(hE, hE, gridE.weights));
  gs.condH = condition_number_spd(gs.H);
  if (!(gs.condH <= options.cond_threshold))
    throw ConditioningError("E_GRAM_SINGULAR",
                            "h-family numerically dependent: cond(H) = " +
                                shortest_repr(gs.condH) + ", " + collinear_pair(gs.H, 'h'),
                            gs.condH);

  gs.G = symmetrized(gram_of(gD, gD, gridD.weights));
  gs.condG = condition_number_spd(gs.G);

  if (f) {
    require_axes(*f, kernel.D(), "f", 0);
    const std::vector<std::vector<double>> fD{sample(*f, kernel.D(), gridD)};
    gs.Fg = gram_of(gD, fD, gridD.weights).col(0);
  }

  if (options.cross_terms) {
    if (!kernel.D().same_shape(kernel.E()))
      throw PreconditionError("A and F need D and E to be the same box");
    // g and f are read as functions on E: positional identification of axes.
    const auto gE = sample_all(kernel.gs(), kernel.E(), gridE);
    gs.A = gram_of(hE, gE, gridE.weights);
    if (f) {
      const std::vector<std::vector<double>> fE{sample(*f, kernel.E(), gridE)};
      gs.F = gram_of(hE, fE, gridE.weights).col(0);
    }
  }
  return gs;
}

Matrix invert_spd(const Matrix& M, double cond_threshold, const char* label) {
  if (M.rows() != M.cols())
    throw PreconditionError("invert_spd needs a square matrix");
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success)
    throw ConditioningError("E_GRAM_SINGULAR",
                            std::string(label) + " is not positive definite (Cholesky pivot failed)",
                            std::numeric_limits<double>::infinity());
  const double cond = condition_number_spd(M);
  if (!(cond <= cond_threshold))
    throw ConditioningError("E_GRAM_SINGULAR",
                            std::string(label) + " is ill-conditioned: cond = " + shortest_repr(cond),
                            cond);
  Matrix inv = llt.solve(Matrix::Identity(M.rows(), M.cols()));
  return symmetrized(inv);
}

GeneralSolve solve_general(const Matrix& M, const Vector& b, double rel_threshold,
                           double abs_threshold) {
  if (M.rows() != M.cols() || M.rows() != b.size())
    throw PreconditionError("solve_general: dimension mismatch");
  Eigen::FullPivLU<Matrix> lu(M);
  const double max_pivot = lu.maxPivot();
  if (abs_threshold > 0.0 && max_pivot <= abs_threshold) {
    GeneralSolve none;
    return none;
  }
  lu.setThreshold(abs_threshold > 0.0 ? std::max(rel_threshold, abs_threshold / max_pivot)
                                      : rel_threshold);
  GeneralSolve out;
  out.rank = static_cast<int>(lu.rank());
  if (lu.isInvertible())
    out.x = lu.solve(b);
  return out;
}

} // namespace fredholm
