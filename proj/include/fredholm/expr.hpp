#pragma once

// Mini expression language for kernel factors, right-hand sides and
// null-space candidates.
//
//   expr    := term { ('+' | '-') term }
//   term    := unary { ('*' | '/') unary }
//   unary   := ('-' | '+') unary | power
//   power   := primary [ '^' unary ]            (right-associative)
//   primary := number | constant | variable | func '(' expr ')' | '(' expr ')'
//
// See docs/expression-grammar.md for the full grammar.

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fredholm {

/// A named point: axis name -> coordinate.  Used at every public boundary
/// where a location in D or E is passed, so axis order never matters there.
using Point = std::map<std::string, double, std::less<>>;

struct Axis {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
};

/// Tensor-product box [lo_1,hi_1] x ... x [lo_d,hi_d], 1 <= d <= 3.
class Domain {
public:
  Domain() = default;
  explicit Domain(std::vector<Axis> axes);

  std::size_t dim() const noexcept { return axes_.size(); }
  const std::vector<Axis>& axes() const noexcept { return axes_; }
  const Axis& axis(std::size_t k) const { return axes_.at(k); }
  std::vector<std::string> names() const;
  double volume() const noexcept;

  /// Positional coordinates (axis order) of a named point.  Throws
  /// PreconditionError when an axis is missing from the point.
  std::vector<double> coords(const Point& p) const;
  Point point(std::span<const double> coords) const;

  bool same_shape(const Domain& other) const noexcept;
  bool operator==(const Domain& other) const noexcept;

private:
  std::vector<Axis> axes_;
};

namespace detail {
struct Node;
}

/// Immutable parsed expression over an ordered list of variables.  Evaluation
/// is positional in `vars()` order; the tree is shared, so copies are cheap and
/// concurrent evaluation is safe.
class FuncExpr {
public:
  FuncExpr();

  static FuncExpr parse(std::string_view text, std::vector<std::string> vars);
  static FuncExpr constant(double value, std::vector<std::string> vars = {});

  /// sum_k coeffs[k] * terms[k]; every term must share the same variable list.
  static FuncExpr linear_combination(std::span<const double> coeffs,
                                     std::span<const FuncExpr> terms);

  const std::vector<std::string>& vars() const noexcept { return vars_; }

  double operator()(std::span<const double> args) const;
  double operator()(std::initializer_list<double> args) const {
    return (*this)(std::span<const double>(args.begin(), args.size()));
  }
  double eval(const Point& p) const;

  /// Replace variable `name` by a constant and drop it from the variable list.
  FuncExpr substitute(std::string_view name, double value) const;
  /// Same function with its variables renamed positionally.
  FuncExpr rename(std::vector<std::string> vars) const;

  FuncExpr operator+(const FuncExpr& rhs) const;
  FuncExpr operator-(const FuncExpr& rhs) const;
  FuncExpr operator*(const FuncExpr& rhs) const;
  FuncExpr scaled(double factor) const;

  /// Fully parenthesised text that re-parses to a tree with identical values.
  std::string to_string() const;

  bool is_constant_zero() const noexcept;

private:
  FuncExpr(std::shared_ptr<const detail::Node> root, std::vector<std::string> vars);

  std::shared_ptr<const detail::Node> root_;
  std::vector<std::string> vars_;
};

inline FuncExpr parse_expr(std::string_view text, std::vector<std::string> allowed_vars) {
  return FuncExpr::parse(text, std::move(allowed_vars));
}

/// Parse an expression with no free variables and return its value.
double parse_constant(std::string_view text);

/// Shortest decimal string that round-trips to the same double.
std::string shortest_repr(double value);

} // namespace fredholm
