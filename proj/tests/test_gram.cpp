#include "examples.hpp"
#include "random_kernels.hpp"

#include "fredholm/error.hpp"
#include "fredholm/gram.hpp"

#include <doctest.h>

using namespace fredholm;
using namespace fredholm::test;

namespace {

double max_abs(const Matrix& M) { return M.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("assemble: example 1 Gram matrix in both orderings") {
  const auto rule = default_rule();
  const auto gs = assemble(example1(), std::nullopt, rule);
  Matrix expected(2, 2);
  expected << 1.0, 0.5, 0.5, 1.0 / 3.0;
  CHECK(max_abs(gs.H - expected) <= 1e-15);

  const auto D = interval("x", 0, 1);
  const auto E = interval("t", 0, 1);
  const SeparableKernel swapped(exprs({"exp(x)", "1"}, D), exprs({"t", "1"}, E), D, E);
  const auto gs2 = assemble(swapped, std::nullopt, rule);
  Matrix expected2(2, 2);
  expected2 << 1.0 / 3.0, 0.5, 0.5, 1.0;
  CHECK(max_abs(gs2.H - expected2) <= 1e-15);
}

TEST_CASE("assemble: example 3 moments and cross matrix") {
  const auto gs = assemble(example3(), rhs3(), default_rule(), {.cross_terms = true});
  REQUIRE(gs.F);
  REQUIRE(gs.A);
  CHECK((*gs.F)(0) == doctest::Approx(11.0 / 6.0).epsilon(1e-15));
  CHECK((*gs.F)(1) == doctest::Approx(29.0 / 20.0).epsilon(1e-15));
  // Closed-form A^{-1} for this kernel.
  Matrix Ainv_exact(2, 2);
  Ainv_exact << 48.0 / 5.0, -12.0, -12.0, 16.0;
  CHECK(max_abs(gs.A->inverse() - Ainv_exact) <= 1e-11);
}

TEST_CASE("assemble: orthonormal sine family gives the identity") {
  const auto D = interval("x", 0, 1);
  const auto E = interval("t", 0, 1);
  const SeparableKernel k(exprs({"x", "x^2"}, D),
                          exprs({"sqrt(2)*sin(pi*t)", "sqrt(2)*sin(2*pi*t)"}, E), D, E);
  const auto gs = assemble(k, std::nullopt, default_rule());
  CHECK(max_abs(gs.H - Matrix::Identity(2, 2)) <= 1e-12);
  CHECK(gs.condH == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("assemble: dependent h-family is refused") {
  const auto D = interval("x", 0, 1);
  const auto E = interval("t", 0, 1);
  const SeparableKernel k(exprs({"x", "x^2"}, D), exprs({"t", "2*t"}, E), D, E);
  try {
    assemble(k, std::nullopt, default_rule());
    FAIL("expected ConditioningError");
  } catch (const ConditioningError& err) {
    CHECK(err.code() == "E_GRAM_SINGULAR");
    CHECK(std::string(err.what()).find("h1, h2") != std::string::npos);
  }
  const SeparableKernel zero(exprs({"x"}, D), exprs({"0*t"}, E), D, E);
  CHECK_THROWS_AS(assemble(zero, std::nullopt, default_rule()), ConditioningError);
}

TEST_CASE("assemble: cross terms need boxes of the same shape") {
  const auto D = interval("x", 0, 1);
  const auto E = interval("t", 0, 2);
  const SeparableKernel k(exprs({"x"}, D), exprs({"t"}, E), D, E);
  CHECK_NOTHROW(assemble(k, std::nullopt, default_rule()));
  CHECK_THROWS_AS(assemble(k, std::nullopt, default_rule(), {.cross_terms = true}),
                  PreconditionError);
  CHECK_NOTHROW(assemble(example5(), rhs5(), default_rule(), {.cross_terms = true}));
}

TEST_CASE("kernel validation") {
  const auto D = interval("x", 0, 1);
  const auto E = interval("t", 0, 1);
  CHECK_THROWS_AS(SeparableKernel(exprs({"x"}, D), exprs({"t", "t^2"}, E), D, E),
                  PreconditionError);
  CHECK_THROWS_AS(SeparableKernel({}, {}, D, E), PreconditionError);
  // h written over D's variable
  CHECK_THROWS_AS(SeparableKernel(exprs({"x"}, D), exprs({"x"}, D), D, E), PreconditionError);
}

TEST_CASE("invert_spd: printed inverses") {
  Matrix H1(2, 2);
  H1 << 1.0, 0.5, 0.5, 1.0 / 3.0;
  Matrix H1inv(2, 2);
  H1inv << 4, -6, -6, 12;
  CHECK(max_abs(invert_spd(H1) - H1inv) <= 1e-12);

  Matrix H3(2, 2);
  H3 << 1.0 / 3.0, 0.25, 0.25, 0.2;
  Matrix H3inv(2, 2);
  H3inv << 48, -60, -60, 80;
  CHECK(max_abs(invert_spd(H3) - H3inv) <= 1e-11);
  CHECK(max_abs(H3 * invert_spd(H3) - Matrix::Identity(2, 2)) <= 1e-10);

  CHECK(max_abs(invert_spd(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)) == 0.0);
}

TEST_CASE("invert_spd: non-SPD and ill-conditioned input") {
  Matrix M(2, 2);
  M << 1, 2, 2, 1;
  CHECK_THROWS_AS(invert_spd(M), ConditioningError);
  Matrix N(2, 2);
  N << 1, 0, 0, 1e-14;
  CHECK_THROWS_AS(invert_spd(N), ConditioningError);
}

TEST_CASE("solve_general: invertible, singular, identity") {
  Matrix Ainv(2, 2);
  Ainv << 48.0 / 5.0, -12.0, -12.0, 16.0;
  Vector F(2);
  F << 11.0 / 6.0, 29.0 / 20.0;
  const auto r = solve_general(Ainv.inverse(), F);
  REQUIRE_FALSE(r.singular());
  CHECK((*r.x)(0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK((*r.x)(1) == doctest::Approx(1.2).epsilon(1e-12));

  const auto gs = assemble(example4(), rhs4(), default_rule(), {.cross_terms = true});
  const auto s = solve_general(*gs.A, *gs.F);
  CHECK(s.singular());
  CHECK(s.rank == 1);

  Vector b(3);
  b << 1, -2, 3;
  const auto id = solve_general(Matrix::Identity(3, 3), b);
  CHECK((*id.x - b).norm() == 0.0);
}

TEST_CASE("property: assembled Gram matrices are symmetric, SPD and refinement-stable") {
  std::mt19937_64 rng(11);
  const auto rule = default_rule();
  const auto fine = gauss_legendre(kDefaultQuadOrder, 2 * kDefaultPanels);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_kernel(rng);
    const auto gs = assemble(p.kernel, std::nullopt, rule);
    const auto gf = assemble(p.kernel, std::nullopt, fine);
    CHECK(gs.H == gs.H.transpose());
    CHECK(gs.G == gs.G.transpose());
    for (int k = 0; k < 50; ++k) {
      const Vector v = random_vector(rng, gs.H.rows());
      if (v.norm() > 0)
        CHECK(v.dot(gs.H * v) > 0.0);
    }
    for (Eigen::Index i = 0; i < gs.H.rows(); ++i)
      for (Eigen::Index j = 0; j < gs.H.cols(); ++j) {
        const double scale = std::sqrt(gs.H(i, i) * gs.H(j, j));
        CHECK(std::abs(gs.H(i, j) - gf.H(i, j)) <= 1e-10 * scale);
      }
  }
}
