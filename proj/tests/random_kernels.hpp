#pragma once

// Generators for randomized property tests: separable kernels with n <= 4
// polynomial / trigonometric factors.

#include "fredholm/gram.hpp"

#include <random>
#include <string>

namespace fredholm::test {

inline std::string random_factor(std::mt19937_64& rng, const std::string& v, int index) {
  std::uniform_real_distribution<double> c(0.5, 2.0);
  std::uniform_int_distribution<int> family(0, 2);
  const std::string k = std::to_string(index + 1);
  // The leading term makes factor `index` independent of the lower ones.
  std::string lead;
  switch (family(rng)) {
  case 0: lead = v + "^" + std::to_string(index); break;
  case 1: lead = "cos(" + k + "*" + v + ")"; break;
  default: lead = "(" + v + "^" + std::to_string(index) + " + sin(" + k + "*" + v + "))"; break;
  }
  return shortest_repr(c(rng)) + "*" + lead + " + " + shortest_repr(c(rng) - 1.25) + "*" + v +
         "^" + std::to_string(index / 2);
}

struct RandomProblem {
  SeparableKernel kernel;
  std::vector<std::string> g_text, h_text;
};

// `same_box` puts D on [0, 1] as well, so that cross terms can be assembled.
inline RandomProblem random_kernel(std::mt19937_64& rng, bool same_box = false) {
  std::uniform_int_distribution<int> count(1, 4);
  const int n = count(rng);
  const Domain D({{"x", same_box ? 0.0 : -1.0, 1.0}});
  const Domain E({{"t", 0.0, 1.0}});
  std::vector<FuncExpr> gs, hs;
  std::vector<std::string> gt, ht;
  for (int i = 0; i < n; ++i) {
    gt.push_back(random_factor(rng, "x", i));
    ht.push_back(random_factor(rng, "t", i));
    gs.push_back(FuncExpr::parse(gt.back(), {"x"}));
    hs.push_back(FuncExpr::parse(ht.back(), {"t"}));
  }
  return {SeparableKernel(std::move(gs), std::move(hs), D, E), gt, ht};
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double lo = -2.0,
                            double hi = 2.0) {
  std::uniform_real_distribution<double> c(lo, hi);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = c(rng);
  return v;
}

} // namespace fredholm::test
