#pragma once

// Kernels of the six worked examples, built directly through the library API.

#include "fredholm/gram.hpp"

#include <numbers>

namespace fredholm::test {

inline constexpr double pi = std::numbers::pi;
inline constexpr double e = std::numbers::e;

inline Domain interval(const char* name, double lo, double hi) { return Domain({{name, lo, hi}}); }

inline std::vector<FuncExpr> exprs(std::initializer_list<const char*> texts, const Domain& dom) {
  std::vector<FuncExpr> out;
  for (const char* t : texts)
    out.push_back(FuncExpr::parse(t, dom.names()));
  return out;
}

// int_0^1 (t e^x + 1) u(t) dt = e^x/3 + 1/2, ordered so that H(t) = (1, t).
inline SeparableKernel example1() {
  const auto D = interval("x", 0, 1);
  const auto E = interval("t", 0, 1);
  return SeparableKernel(exprs({"1", "exp(x)"}, D), exprs({"1", "t"}, E), D, E);
}

// int_0^pi cos x sin t u(t) dt = (pi/2) cos x
inline SeparableKernel example2() {
  const auto D = interval("x", 0, pi);
  const auto E = interval("t", 0, pi);
  return SeparableKernel(exprs({"cos(x)"}, D), exprs({"sin(t)"}, E), D, E);
}

// int_0^1 5(xt + x^2 t^2) u(t) dt = x + 6x^2
inline SeparableKernel example3() {
  const auto D = interval("x", 0, 1);
  const auto E = interval("t", 0, 1);
  return SeparableKernel(exprs({"5*x", "5*x^2"}, D), exprs({"t", "t^2"}, E), D, E);
}

// int_0^{pi/2} sin(x - t) u(t) dt, with G(x) = K H(x), K = [[0,-1],[1,0]]
inline SeparableKernel example3_rotation() {
  const auto D = interval("x", 0, pi / 2);
  const auto E = interval("t", 0, pi / 2);
  return SeparableKernel(exprs({"sin(x)", "cos(x)"}, D), exprs({"cos(t)", "-sin(t)"}, E), D, E);
}

// int_{-pi/2}^{pi/2} (sin x cos t + 1) u(t) dt = sin x, ordered so that H(t) = (1, cos t).
inline SeparableKernel example4() {
  const auto D = interval("x", -pi / 2, pi / 2);
  const auto E = interval("t", -pi / 2, pi / 2);
  return SeparableKernel(exprs({"1", "sin(x)"}, D), exprs({"1", "cos(t)"}, E), D, E);
}

// Two-dimensional: int int e^{tau^2+eta^2+s+t-2} u(s,t) = (e^-2 - 1)^2/4 e^{tau^2+eta^2}
inline SeparableKernel example5() {
  const Domain D({{"tau", 0, 1}, {"eta", 0, 1}});
  const Domain E({{"s", 0, 1}, {"t", 0, 1}});
  return SeparableKernel(exprs({"exp(tau^2 + eta^2 - 2)"}, D), exprs({"exp(s + t)"}, E), D, E);
}

inline FuncExpr rhs1() { return FuncExpr::parse("(1/3)*exp(x) + 1/2", {"x"}); }
inline FuncExpr rhs2() { return FuncExpr::parse("pi/2*cos(x)", {"x"}); }
inline FuncExpr rhs3() { return FuncExpr::parse("x + 6*x^2", {"x"}); }
inline FuncExpr rhs3_rotation() { return FuncExpr::parse("-3*cos(x)", {"x"}); }
inline FuncExpr rhs4() { return FuncExpr::parse("sin(x)", {"x"}); }
inline FuncExpr rhs5() {
  return FuncExpr::parse("1/4*(exp(-2) - 1)^2*exp(tau^2 + eta^2)", {"tau", "eta"});
}

} // namespace fredholm::test
