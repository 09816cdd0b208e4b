#include "fredholm/expr.hpp"

#include "fredholm/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fredholm {

// ---------------------------------------------------------------------------
// Domain
// ---------------------------------------------------------------------------

Domain::Domain(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 3)
    throw PreconditionError("domain must have between 1 and 3 axes, got " +
                            std::to_string(axes_.size()));
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    const auto& a = axes_[k];
    if (a.name.empty())
      throw PreconditionError("domain axis has an empty name");
    if (!(a.lo < a.hi) || !std::isfinite(a.lo) || !std::isfinite(a.hi))
      throw PreconditionError("axis '" + a.name + "' needs finite lo < hi");
    for (std::size_t j = 0; j < k; ++j)
      if (axes_[j].name == a.name)
        throw PreconditionError("duplicate axis '" + a.name + "'");
  }
}

std::vector<std::string> Domain::names() const {
  std::vector<std::string> out;
  out.reserve(axes_.size());
  for (const auto& a : axes_)
    out.push_back(a.name);
  return out;
}

double Domain::volume() const noexcept {
  double v = 1.0;
  for (const auto& a : axes_)
    v *= a.hi - a.lo;
  return v;
}

std::vector<double> Domain::coords(const Point& p) const {
  std::vector<double> out;
  out.reserve(axes_.size());
  for (const auto& a : axes_) {
    auto it = p.find(a.name);
    if (it == p.end())
      throw PreconditionError("point has no coordinate for axis '" + a.name + "'");
    out.push_back(it->second);
  }
  return out;
}

Point Domain::point(std::span<const double> coords) const {
  if (coords.size() != axes_.size())
    throw PreconditionError("coordinate count does not match domain dimension");
  Point p;
  for (std::size_t k = 0; k < axes_.size(); ++k)
    p.emplace(axes_[k].name, coords[k]);
  return p;
}

bool Domain::same_shape(const Domain& other) const noexcept {
  if (axes_.size() != other.axes_.size())
    return false;
  for (std::size_t k = 0; k < axes_.size(); ++k)
    if (axes_[k].lo != other.axes_[k].lo || axes_[k].hi != other.axes_[k].hi)
      return false;
  return true;
}

bool Domain::operator==(const Domain& other) const noexcept {
  if (!same_shape(other))
    return false;
  for (std::size_t k = 0; k < axes_.size(); ++k)
    if (axes_[k].name != other.axes_[k].name)
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// Tree
// ---------------------------------------------------------------------------

namespace detail {

enum class Kind { Number, Constant, Variable, Unary, Binary };
enum class Op { Neg, Sin, Cos, Exp, Ln, Sqrt, Abs, Add, Sub, Mul, Div, Pow };

struct Node {
  Kind kind = Kind::Number;
  Op op = Op::Add;
  double value = 0.0;   // Number, Constant
  std::size_t slot = 0; // Variable
  std::string name;     // Constant, Variable
  std::shared_ptr<const Node> lhs, rhs;
};

} // namespace detail

namespace {

using detail::Kind;
using detail::Node;
using detail::Op;
using NodePtr = std::shared_ptr<const Node>;

struct FunctionName {
  std::string_view name;
  Op op;
};

constexpr std::array<FunctionName, 6> kFunctions{{
    {"sin", Op::Sin},
    {"cos", Op::Cos},
    {"exp", Op::Exp},
    {"ln", Op::Ln},
    {"sqrt", Op::Sqrt},
    {"abs", Op::Abs},
}};

bool is_reserved(std::string_view name) {
  if (name == "pi" || name == "e")
    return true;
  return std::any_of(kFunctions.begin(), kFunctions.end(),
                     [&](const FunctionName& f) { return f.name == name; });
}

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->value = v;
  return n;
}

NodePtr make_constant(std::string name, double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->name = std::move(name);
  n->value = v;
  return n;
}

NodePtr make_variable(std::string name, std::size_t slot) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->name = std::move(name);
  n->slot = slot;
  return n;
}

NodePtr make_unary(Op op, NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Unary;
  n->op = op;
  n->lhs = std::move(arg);
  return n;
}

NodePtr make_binary(Op op, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

std::string_view op_name(Op op) {
  switch (op) {
  case Op::Neg: return "-";
  case Op::Sin: return "sin";
  case Op::Cos: return "cos";
  case Op::Exp: return "exp";
  case Op::Ln: return "ln";
  case Op::Sqrt: return "sqrt";
  case Op::Abs: return "abs";
  case Op::Add: return "+";
  case Op::Sub: return "-";
  case Op::Mul: return "*";
  case Op::Div: return "/";
  case Op::Pow: return "^";
  }
  return "?";
}

void print(const Node& n, std::string& out) {
  switch (n.kind) {
  case Kind::Number:
    if (n.value < 0 || std::signbit(n.value)) {
      out += "(-";
      out += shortest_repr(-n.value);
      out += ')';
    } else {
      out += shortest_repr(n.value);
    }
    return;
  case Kind::Constant:
  case Kind::Variable:
    out += n.name;
    return;
  case Kind::Unary:
    if (n.op == Op::Neg) {
      out += "(-";
      print(*n.lhs, out);
      out += ')';
    } else {
      out += op_name(n.op);
      out += '(';
      print(*n.lhs, out);
      out += ')';
    }
    return;
  case Kind::Binary:
    out += '(';
    print(*n.lhs, out);
    out += ' ';
    out += op_name(n.op);
    out += ' ';
    print(*n.rhs, out);
    out += ')';
    return;
  }
}

std::string print(const Node& n) {
  std::string s;
  print(n, s);
  return s;
}

double checked(double v, const Node& n, const char* what) {
  if (!std::isfinite(v))
    throw DomainError(what, print(n));
  return v;
}

double evaluate(const Node& n, std::span<const double> args) {
  switch (n.kind) {
  case Kind::Number:
  case Kind::Constant:
    return n.value;
  case Kind::Variable:
    return args[n.slot];
  case Kind::Unary: {
    const double a = evaluate(*n.lhs, args);
    switch (n.op) {
    case Op::Neg: return -a;
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Exp: return checked(std::exp(a), n, "exp overflow");
    case Op::Ln:
      if (!(a > 0.0))
        throw DomainError("ln of non-positive value", print(n));
      return std::log(a);
    case Op::Sqrt:
      if (a < 0.0)
        throw DomainError("sqrt of negative value", print(n));
      return std::sqrt(a);
    case Op::Abs: return std::abs(a);
    default: break;
    }
    break;
  }
  case Kind::Binary: {
    const double a = evaluate(*n.lhs, args);
    const double b = evaluate(*n.rhs, args);
    switch (n.op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div:
      if (b == 0.0)
        throw DomainError("division by zero", print(n));
      return a / b;
    case Op::Pow:
      if (a < 0.0 && std::trunc(b) != b)
        throw DomainError("non-integer power of negative base", print(n));
      if (a == 0.0 && b < 0.0)
        throw DomainError("division by zero", print(n));
      return checked(std::pow(a, b), n, "power overflow");
    default: break;
    }
    break;
  }
  }
  throw std::logic_error("corrupt expression node");
}

NodePtr substitute_node(const NodePtr& n, std::size_t slot, double value) {
  switch (n->kind) {
  case Kind::Number:
  case Kind::Constant:
    return n;
  case Kind::Variable:
    if (n->slot == slot)
      return make_number(value);
    if (n->slot > slot)
      return make_variable(n->name, n->slot - 1);
    return n;
  case Kind::Unary:
    return make_unary(n->op, substitute_node(n->lhs, slot, value));
  case Kind::Binary:
    return make_binary(n->op, substitute_node(n->lhs, slot, value),
                       substitute_node(n->rhs, slot, value));
  }
  return n;
}

NodePtr rename_node(const NodePtr& n, const std::vector<std::string>& names) {
  switch (n->kind) {
  case Kind::Number:
  case Kind::Constant:
    return n;
  case Kind::Variable:
    return make_variable(names[n->slot], n->slot);
  case Kind::Unary:
    return make_unary(n->op, rename_node(n->lhs, names));
  case Kind::Binary:
    return make_binary(n->op, rename_node(n->lhs, names), rename_node(n->rhs, names));
  }
  return n;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser
// ---------------------------------------------------------------------------

class Parser {
public:
  Parser(std::string_view text, const std::vector<std::string>& vars)
      : text_(text), vars_(vars) {}

  NodePtr parse() {
    auto n = expression();
    skip_ws();
    if (pos_ != text_.size())
      throw SyntaxError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return n;
  }

private:
  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size())
        throw SyntaxError(std::string("expected '") + c + "' but input ended", pos_);
      throw SyntaxError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr expression() {
    auto lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make_binary(Op::Add, lhs, term());
      else if (accept('-'))
        lhs = make_binary(Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make_binary(Op::Mul, lhs, unary());
      else if (accept('/'))
        lhs = make_binary(Op::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-'))
      return make_unary(Op::Neg, unary());
    if (accept('+'))
      return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^'))
      return make_binary(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size())
      throw SyntaxError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = expression();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return identifier();
    throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0)
      throw SyntaxError("malformed number", start);
    // Exponent only when digits follow; otherwise 'e' is left for the lexer.
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-'))
        ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double v = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
      throw SyntaxError("malformed number", start);
    return make_number(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    for (const auto& f : kFunctions) {
      if (f.name == name) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '(')
          throw SyntaxError("function '" + std::string(name) + "' needs '('", pos_);
        ++pos_;
        auto arg = expression();
        expect(')');
        return make_unary(f.op, arg);
      }
    }
    if (name == "pi")
      return make_constant("pi", std::numbers::pi);
    if (name == "e")
      return make_constant("e", std::numbers::e);
    for (std::size_t k = 0; k < vars_.size(); ++k)
      if (vars_[k] == name)
        return make_variable(vars_[k], k);
    throw UnknownIdentifierError(std::string(name));
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

void validate_vars(const std::vector<std::string>& vars) {
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const auto& v = vars[k];
    if (v.empty() || !(std::isalpha(static_cast<unsigned char>(v[0])) || v[0] == '_') ||
        !std::all_of(v.begin(), v.end(), [](char c) {
          return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
        }))
      throw PreconditionError("'" + v + "' is not a valid variable name");
    if (is_reserved(v))
      throw PreconditionError("'" + v + "' is reserved and cannot be a variable");
    for (std::size_t j = 0; j < k; ++j)
      if (vars[j] == v)
        throw PreconditionError("duplicate variable '" + v + "'");
  }
}

} // namespace

// ---------------------------------------------------------------------------
// FuncExpr
// ---------------------------------------------------------------------------

FuncExpr::FuncExpr() : root_(make_number(0.0)) {}

FuncExpr::FuncExpr(std::shared_ptr<const detail::Node> root, std::vector<std::string> vars)
    : root_(std::move(root)), vars_(std::move(vars)) {}

FuncExpr FuncExpr::parse(std::string_view text, std::vector<std::string> vars) {
  validate_vars(vars);
  Parser p(text, vars);
  auto root = p.parse();
  return FuncExpr(std::move(root), std::move(vars));
}

FuncExpr FuncExpr::constant(double value, std::vector<std::string> vars) {
  validate_vars(vars);
  return FuncExpr(make_number(value), std::move(vars));
}

FuncExpr FuncExpr::linear_combination(std::span<const double> coeffs,
                                      std::span<const FuncExpr> terms) {
  if (coeffs.size() != terms.size())
    throw PreconditionError("linear_combination: coefficient/term count mismatch");
  if (terms.empty())
    return FuncExpr();
  NodePtr acc;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (terms[k].vars_ != terms[0].vars_)
      throw PreconditionError("linear_combination: terms use different variables");
    auto scaled = make_binary(Op::Mul, make_number(coeffs[k]), terms[k].root_);
    acc = acc ? make_binary(Op::Add, acc, scaled) : scaled;
  }
  return FuncExpr(std::move(acc), terms[0].vars_);
}

double FuncExpr::operator()(std::span<const double> args) const {
  if (args.size() < vars_.size())
    throw PreconditionError("expression needs " + std::to_string(vars_.size()) +
                            " arguments, got " + std::to_string(args.size()));
  return evaluate(*root_, args);
}

double FuncExpr::eval(const Point& p) const {
  std::vector<double> args;
  args.reserve(vars_.size());
  for (const auto& v : vars_) {
    auto it = p.find(v);
    if (it == p.end())
      throw PreconditionError("point does not bind variable '" + v + "'");
    args.push_back(it->second);
  }
  return evaluate(*root_, args);
}

FuncExpr FuncExpr::substitute(std::string_view name, double value) const {
  auto it = std::find(vars_.begin(), vars_.end(), name);
  if (it == vars_.end())
    throw PreconditionError("cannot substitute unknown variable '" + std::string(name) + "'");
  const auto slot = static_cast<std::size_t>(it - vars_.begin());
  std::vector<std::string> vars = vars_;
  vars.erase(vars.begin() + static_cast<std::ptrdiff_t>(slot));
  return FuncExpr(substitute_node(root_, slot, value), std::move(vars));
}

FuncExpr FuncExpr::rename(std::vector<std::string> vars) const {
  validate_vars(vars);
  if (vars.size() != vars_.size())
    throw PreconditionError("rename needs " + std::to_string(vars_.size()) + " variable names");
  auto root = rename_node(root_, vars);
  return FuncExpr(std::move(root), std::move(vars));
}

FuncExpr FuncExpr::operator+(const FuncExpr& rhs) const {
  if (vars_ != rhs.vars_)
    throw PreconditionError("operands use different variables");
  return FuncExpr(make_binary(Op::Add, root_, rhs.root_), vars_);
}

FuncExpr FuncExpr::operator-(const FuncExpr& rhs) const {
  if (vars_ != rhs.vars_)
    throw PreconditionError("operands use different variables");
  return FuncExpr(make_binary(Op::Sub, root_, rhs.root_), vars_);
}

FuncExpr FuncExpr::operator*(const FuncExpr& rhs) const {
  if (vars_ != rhs.vars_)
    throw PreconditionError("operands use different variables");
  return FuncExpr(make_binary(Op::Mul, root_, rhs.root_), vars_);
}

FuncExpr FuncExpr::scaled(double factor) const {
  return FuncExpr(make_binary(Op::Mul, make_number(factor), root_), vars_);
}

std::string FuncExpr::to_string() const { return print(*root_); }

bool FuncExpr::is_constant_zero() const noexcept {
  return root_->kind == Kind::Number && root_->value == 0.0;
}

double parse_constant(std::string_view text) {
  return FuncExpr::parse(text, {})({});
}

std::string shortest_repr(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc())
    throw std::runtime_error("shortest_repr: formatting failed");
  return std::string(buf.data(), ptr);
}

} // namespace fredholm
