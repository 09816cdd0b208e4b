#include "fredholm/error.hpp"
#include "fredholm/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

using namespace fredholm;

namespace {
const double pi = std::numbers::pi;
const double e = std::numbers::e;
}

TEST_CASE("gauss_legendre: classical low orders") {
  const auto r1 = gauss_legendre(1);
  REQUIRE(r1.nodes.size() == 1);
  CHECK(r1.nodes[0] == 0.0);
  CHECK(r1.weights[0] == doctest::Approx(2.0).epsilon(1e-15));

  const auto r2 = gauss_legendre(2);
  CHECK(r2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r2.weights[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("gauss_legendre: order range") {
  CHECK_THROWS_AS(gauss_legendre(0), PreconditionError);
  CHECK_THROWS_AS(gauss_legendre(257), PreconditionError);
  CHECK_THROWS_AS(gauss_legendre(4, 0), PreconditionError);
  CHECK_NOTHROW(gauss_legendre(256));
}

TEST_CASE("gauss_legendre: weights sum to 2 and nodes are sorted and symmetric") {
  for (int n : {1, 2, 3, 7, 32, 100, 256}) {
    CAPTURE(n);
    const auto r = gauss_legendre(n);
    const double s = std::accumulate(r.weights.begin(), r.weights.end(), 0.0);
    CHECK(std::abs(s - 2.0) <= 1e-14);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      CHECK(r.weights[i] > 0.0);
      CHECK(r.nodes[i] == -r.nodes[r.nodes.size() - 1 - i]);
      if (i)
        CHECK(r.nodes[i] > r.nodes[i - 1]);
    }
  }
}

TEST_CASE("gauss_legendre: order 5 integrates x^8 exactly") {
  const Domain ref({{"x", -1.0, 1.0}});
  const auto f = parse_expr("x^8", {"x"});
  CHECK(std::abs(integrate(f, ref, gauss_legendre(5)) - 2.0 / 9.0) <= 1e-13);
}

TEST_CASE("gauss_legendre: exactness degree 2n-1 for every order up to 40") {
  for (int n = 1; n <= 40; ++n) {
    const auto r = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (std::size_t q = 0; q < r.nodes.size(); ++q)
        s += r.weights[q] * std::pow(r.nodes[q], k);
      const double exact = (k % 2) ? 0.0 : 2.0 / (k + 1);
      CAPTURE(n);
      CAPTURE(k);
      CHECK(std::abs(s - exact) <= 1e-12);
    }
  }
}

TEST_CASE("integrate: intervals and boxes") {
  const auto rule = default_rule();
  const Domain unit({{"t", 0.0, 1.0}});
  CHECK(integrate(parse_expr("t", {"t"}), unit, rule) == doctest::Approx(0.5).epsilon(1e-15));

  const Domain half_period({{"t", 0.0, pi}});
  CHECK(std::abs(integrate(parse_expr("sin(t)*cos(t)", {"t"}), half_period, rule)) <= 1e-14);

  const Domain box({{"s", 0.0, 1.0}, {"t", 0.0, 1.0}});
  const double expected = std::pow((e * e - 1.0) / 2.0, 2);
  const double got = integrate(parse_expr("exp(2*s)*exp(2*t)", {"s", "t"}), box, rule);
  CHECK(got == doctest::Approx(expected).epsilon(1e-14));
  CHECK(got == doctest::Approx(10.205009458820735).epsilon(1e-14));
}

TEST_CASE("integrate: node count is (order*panels)^d") {
  const Domain box({{"a", 0, 1}, {"b", 0, 1}, {"c", 0, 1}});
  const auto grid = tensor_grid(box, gauss_legendre(3, 2));
  CHECK(grid.size() == 216);
  CHECK(std::accumulate(grid.weights.begin(), grid.weights.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("inner_product: Gram entries used by the worked examples") {
  const auto rule = default_rule();
  const Domain unit({{"t", 0.0, 1.0}});
  CHECK(inner_product(parse_expr("1", {"t"}), parse_expr("t", {"t"}), unit, rule) ==
        doctest::Approx(0.5).epsilon(1e-15));
  const Domain half_period({{"t", 0.0, pi}});
  const auto s = parse_expr("sin(t)", {"t"});
  CHECK(inner_product(s, s, half_period, rule) == doctest::Approx(pi / 2).epsilon(1e-15));
}

TEST_CASE("integrate: domain errors report the node") {
  const Domain dom({{"t", -1.0, 1.0}});
  try {
    integrate(parse_expr("ln(t)", {"t"}), dom, gauss_legendre(4));
    FAIL("expected DomainError");
  } catch (const DomainError& err) {
    CHECK(err.location().find("t=") != std::string::npos);
    CHECK(err.code() == "E_DOMAIN");
  }
}

TEST_CASE("integrate: variables must be axes of the domain") {
  const Domain dom({{"t", 0.0, 1.0}});
  CHECK_THROWS_AS(integrate(parse_expr("x", {"x"}), dom, gauss_legendre(4)), PreconditionError);
}

TEST_CASE("property: positivity, linearity, panel refinement") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  const Domain dom({{"t", -0.5, 2.0}});
  const auto rule = default_rule();
  const auto fine = gauss_legendre(kDefaultQuadOrder, 2 * kDefaultPanels);
  for (int trial = 0; trial < 50; ++trial) {
    std::string poly = shortest_repr(coef(rng));
    for (int k = 1; k <= 6; ++k)
      poly += " + " + shortest_repr(coef(rng)) + "*t^" + std::to_string(k);
    const auto f = parse_expr(poly, {"t"});
    const auto g = parse_expr("sin(" + shortest_repr(coef(rng)) + "*t) + exp(t/3)", {"t"});
    CAPTURE(poly);
    CHECK(inner_product(f, f, dom, rule) >= 0.0);

    const double a = coef(rng), b = coef(rng);
    const auto combo = f.scaled(a) + g.scaled(b);
    const double If = integrate(f, dom, rule);
    const double Ig = integrate(g, dom, rule);
    const double scale = std::max({1.0, std::abs(If), std::abs(Ig)});
    CHECK(std::abs(integrate(combo, dom, rule) - a * If - b * Ig) <=
          1e-12 * (std::abs(a) + std::abs(b)) * scale);

    const double Ifine = integrate(g, dom, fine);
    CHECK(std::abs(Ifine - Ig) <= 1e-12 * std::max(1.0, std::abs(Ig)));
  }
}

TEST_CASE("integration is bit-reproducible") {
  const Domain box({{"s", 0.0, 1.0}, {"t", 0.0, 2.0}});
  const auto f = parse_expr("exp(s*t)*cos(3*t)", {"s", "t"});
  const double a = integrate(f, box, default_rule());
  const double b = integrate(f, box, default_rule());
  CHECK(a == b);
}
