#pragma once

// Non-degenerate kernels k(x,t) = sum_{i>=1} g_i(x) h_i(t) with right-hand
// side f = sum_i c_i g_i, solved through a finite truncation.

#include "fredholm/minnorm.hpp"

#include <functional>
#include <optional>
#include <string>

namespace fredholm {

struct SeriesTerm {
  FuncExpr g; // on D
  FuncExpr h; // on E
};

class SeriesKernel {
public:
  using TermFn = std::function<SeriesTerm(int)>;
  using CoeffFn = std::function<double(int)>;

  /// `term(i)` and `rhs_coeff(i)` are 1-based.  `rhs_coeff` may be empty when
  /// the rhs is supplied as a function instead.  A decay hint switches on the
  /// kernel-tail test during adaptive truncation.
  SeriesKernel(TermFn term, CoeffFn rhs_coeff, Domain D, Domain E,
               std::optional<std::string> decay_hint = std::nullopt);

  SeriesTerm term(int i) const { return term_(i); }
  double rhs_coeff(int i) const { return rhs_coeff_ ? rhs_coeff_(i) : 0.0; }
  bool has_rhs_coeffs() const noexcept { return static_cast<bool>(rhs_coeff_); }
  SeriesKernel with_rhs(CoeffFn rhs_coeff) const;

  const Domain& D() const noexcept { return D_; }
  const Domain& E() const noexcept { return E_; }
  const std::optional<std::string>& decay_hint() const noexcept { return decay_hint_; }

private:
  TermFn term_;
  CoeffFn rhs_coeff_;
  Domain D_;
  Domain E_;
  std::optional<std::string> decay_hint_;
};

enum class TruncationMode { Fixed, Adaptive };

struct TruncationPolicy {
  int max_terms = 50;
  double tail_tol = 1e-12;
  TruncationMode mode = TruncationMode::Adaptive;
};

struct Truncation {
  SeparableKernel kernel;
  Vector C;
  int N = 0;
  /// Estimated magnitude of the first dropped term; absent in fixed mode.
  std::optional<double> tail_estimate;
};

/// Adaptive mode keeps the smallest N whose next term satisfies
/// |c_{N+1}| ||g_{N+1}|| ||h_{N+1}|| < tail_tol, plus
/// ||g_{N+1}|| ||h_{N+1}|| < tail_tol when the kernel carries a decay hint.
/// Throws TruncationError when max_terms is reached first.
Truncation truncate(const SeriesKernel& sk, const TruncationPolicy& policy,
                    const QuadratureRule& rule);

struct SeriesSolution {
  Truncation truncation;
  GramSet gram;
  MinNormSolution solution;
};

SeriesSolution solve_series(const SeriesKernel& sk, const TruncationPolicy& policy,
                            const QuadratureRule& rule);

/// Function rhs: the truncation follows the kernel tail alone, then f is
/// projected onto the retained g-family.
SeriesSolution solve_series(const SeriesKernel& sk, const FuncExpr& f,
                            const TruncationPolicy& policy, const QuadratureRule& rule,
                            double in_range_tol = kDefaultInRangeTol);

/// Backward heat conduction on [0, pi] at time s > 0:
///   g_i(x) = (2/pi) e^{-i^2 s} sin(ix),  h_i(t) = sin(it).
/// `rhs_coeff` gives c_i with f = sum c_i g_i.
SeriesKernel bhcp_kernel(double s, SeriesKernel::CoeffFn rhs_coeff = {});

/// c_i for a target u(x, s) = sum_i b_i sin(ix) (b is 1-based: b[0] = b_1).
SeriesKernel::CoeffFn bhcp_rhs_from_sine(double s, std::vector<double> b);

/// Sine coefficients b_i = (2/pi) int_0^pi f(x) sin(ix) dx, i = 1..count.
/// Entries below the quadrature noise floor (1e-13 of the largest) are zeroed,
/// since e^{i^2 s} would otherwise amplify round-off into the solution.
std::vector<double> bhcp_sine_coefficients(const FuncExpr& f, int count,
                                           const QuadratureRule& rule);

} // namespace fredholm
