#pragma once

#include "fredholm/cli/problem.hpp"
#include "fredholm/cli/report.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fredholm::cli {

struct Flags {
  std::string report = "text";
  int samples = 101;
  std::optional<int> oracle;
  bool compare_legacy = false;
  std::optional<int> quad_order;
  std::optional<int> panels;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
};

/// Flags that change the numerical setup are written into the problem's
/// [options] so that the echoed problem reproduces the run.
Problem apply_flags(Problem p, const Flags& flags);

/// Full pipeline: assemble, project, solve, verify and the optional blocks.
Report solve_problem(const Problem& p, const Flags& flags);

/// Problem file text rebuilt from the echo of a JSON report.
std::string regenerate(const std::string& report_json);

/// Entry point without the program name.  Returns 0 on success and 2 on any
/// error, after writing "CODE: message" to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fredholm::cli
