#include "fredholm/series.hpp"

#include "fredholm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fredholm {

namespace {

constexpr double kSineNoiseFloor = 1e-13;

double l2_norm(const FuncExpr& f, const Domain& dom, const QuadratureRule& rule) {
  return std::sqrt(std::max(0.0, inner_product(f, f, dom, rule)));
}

struct Prefix {
  std::vector<FuncExpr> gs, hs;
  std::vector<double> cs;
};

Truncation finish(const SeriesKernel& sk, Prefix p, int N, std::optional<double> tail) {
  p.gs.resize(static_cast<std::size_t>(N));
  p.hs.resize(static_cast<std::size_t>(N));
  p.cs.resize(static_cast<std::size_t>(N));
  Vector C = Eigen::Map<const Vector>(p.cs.data(), N);
  return Truncation{SeparableKernel(std::move(p.gs), std::move(p.hs), sk.D(), sk.E()),
                    std::move(C), N, tail};
}

Truncation truncate_impl(const SeriesKernel& sk, const TruncationPolicy& policy,
                         const QuadratureRule& rule, bool kernel_tail_only) {
  if (policy.max_terms < 1)
    throw PreconditionError("truncation needs max_terms >= 1");
  if (!(policy.tail_tol > 0.0))
    throw PreconditionError("truncation needs tail_tol > 0");

  Prefix p;
  auto add_term = [&](int i) {
    auto t = sk.term(i);
    p.gs.push_back(std::move(t.g));
    p.hs.push_back(std::move(t.h));
    p.cs.push_back(sk.rhs_coeff(i));
  };

  if (policy.mode == TruncationMode::Fixed) {
    for (int i = 1; i <= policy.max_terms; ++i)
      add_term(i);
    return finish(sk, std::move(p), policy.max_terms, std::nullopt);
  }

  const bool use_kernel_tail = kernel_tail_only || sk.decay_hint().has_value();
  double last_tail = 0.0;
  for (int j = 1; j <= policy.max_terms; ++j) {
    add_term(j);
    const auto k = static_cast<std::size_t>(j - 1);
    const double scale = l2_norm(p.gs[k], sk.D(), rule) * l2_norm(p.hs[k], sk.E(), rule);
    const double coeff_tail = std::abs(p.cs[k]) * scale;
    double tail = kernel_tail_only ? 0.0 : coeff_tail;
    if (use_kernel_tail)
      tail = std::max(tail, scale);
    last_tail = tail;
    if (j >= 2 && tail < policy.tail_tol)
      return finish(sk, std::move(p), j - 1, tail);
  }
  throw TruncationError("series did not meet tail_tol " + shortest_repr(policy.tail_tol) +
                            " within " + std::to_string(policy.max_terms) +
                            " terms (last tail estimate " + shortest_repr(last_tail) + ")",
                        last_tail);
}

} // namespace

SeriesKernel::SeriesKernel(TermFn term, CoeffFn rhs_coeff, Domain D, Domain E,
                           std::optional<std::string> decay_hint)
    : term_(std::move(term)), rhs_coeff_(std::move(rhs_coeff)), D_(std::move(D)),
      E_(std::move(E)), decay_hint_(std::move(decay_hint)) {
  if (!term_)
    throw PreconditionError("series kernel needs a term generator");
}

SeriesKernel SeriesKernel::with_rhs(CoeffFn rhs_coeff) const {
  SeriesKernel out = *this;
  out.rhs_coeff_ = std::move(rhs_coeff);
  return out;
}

Truncation truncate(const SeriesKernel& sk, const TruncationPolicy& policy,
                    const QuadratureRule& rule) {
  return truncate_impl(sk, policy, rule, false);
}

SeriesSolution solve_series(const SeriesKernel& sk, const TruncationPolicy& policy,
                            const QuadratureRule& rule) {
  auto tr = truncate(sk, policy, rule);
  auto gram = assemble(tr.kernel, std::nullopt, rule);
  auto sol = solve_min_norm(RhsSpec::coeffs(tr.C), tr.kernel, gram);
  return SeriesSolution{std::move(tr), std::move(gram), std::move(sol)};
}

SeriesSolution solve_series(const SeriesKernel& sk, const FuncExpr& f,
                            const TruncationPolicy& policy, const QuadratureRule& rule,
                            double in_range_tol) {
  auto tr = truncate_impl(sk, policy, rule, true);
  auto gram = assemble(tr.kernel, f, rule);
  auto sol = solve_min_norm(RhsSpec::func(f), tr.kernel, gram, in_range_tol);
  tr.C = sol.C;
  return SeriesSolution{std::move(tr), std::move(gram), std::move(sol)};
}

SeriesKernel bhcp_kernel(double s, SeriesKernel::CoeffFn rhs_coeff) {
  if (!(s > 0.0))
    throw PreconditionError("heat-conduction time s must be > 0, got " + shortest_repr(s));
  const Domain D({{"x", 0.0, std::numbers::pi}});
  const Domain E({{"t", 0.0, std::numbers::pi}});
  auto term = [s](int i) {
    const std::string idx = std::to_string(i);
    const double decay = static_cast<double>(i) * static_cast<double>(i) * s;
    return SeriesTerm{
        FuncExpr::parse("2/pi*exp(-" + shortest_repr(decay) + ")*sin(" + idx + "*x)", {"x"}),
        FuncExpr::parse("sin(" + idx + "*t)", {"t"}),
    };
  };
  return SeriesKernel(term, std::move(rhs_coeff), D, E,
                      "exp(-i^2 s) with s=" + shortest_repr(s));
}

SeriesKernel::CoeffFn bhcp_rhs_from_sine(double s, std::vector<double> b) {
  return [s, b = std::move(b)](int i) {
    if (i < 1 || static_cast<std::size_t>(i) > b.size())
      return 0.0;
    const double bi = b[static_cast<std::size_t>(i - 1)];
    if (bi == 0.0)
      return 0.0;
    const double ii = static_cast<double>(i) * static_cast<double>(i);
    return bi * (std::numbers::pi / 2.0) * std::exp(ii * s);
  };
}

std::vector<double> bhcp_sine_coefficients(const FuncExpr& f, int count,
                                           const QuadratureRule& rule) {
  if (count < 1)
    throw PreconditionError("need at least one sine coefficient");
  const Domain D({{"x", 0.0, std::numbers::pi}});
  std::vector<double> b;
  double biggest = 0.0;
  for (int i = 1; i <= count; ++i) {
    const auto mode = FuncExpr::parse("sin(" + std::to_string(i) + "*x)", {"x"});
    b.push_back(2.0 / std::numbers::pi * inner_product(f, mode, D, rule));
    biggest = std::max(biggest, std::abs(b.back()));
  }
  for (auto& v : b)
    if (std::abs(v) <= kSineNoiseFloor * biggest)
      v = 0.0;
  return b;
}

} // namespace fredholm
