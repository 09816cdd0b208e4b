#pragma once

// Problem files: line-based INI with [domain], [kernel], [rhs], [options].

#include "fredholm/gram.hpp"
#include "fredholm/series.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fredholm::cli {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;
  std::vector<Entry> entries;
  int line = 0;

  const Entry* find(std::string_view key) const;
  void set(const std::string& key, const std::string& value);
};

struct IniDocument {
  std::vector<Section> sections;

  const Section* find(std::string_view name) const;
  Section& get_or_add(const std::string& name);
};

/// Throws Error("E_PARSE") with the offending line number.
IniDocument parse_ini(std::string_view text);
std::string to_ini(const IniDocument& doc);

enum class KernelKind { Separable, Bhcp, Series };
enum class PathChoice { Auto, Corollary1, Theorem1 };

struct Options {
  int quad_order = kDefaultQuadOrder;
  int panels = kDefaultPanels;
  double cond_threshold = kDefaultCondThreshold;
  double in_range_tol = kDefaultInRangeTol;
  double tail_tol = 1e-12;
  int max_terms = 50;
  TruncationMode truncation = TruncationMode::Adaptive;
  PathChoice path = PathChoice::Auto;
  bool compare_legacy = false;
  std::optional<Matrix> legacy_k;
  int oracle_m = 0;     // 0: no oracle
  int null_degree = -1; // < 0: no Legendre candidates
  std::vector<std::string> null_candidates;
  std::vector<double> null_coeffs;
  int residual_m = 0; // 0: chosen from the dimension of D
};

struct Problem {
  IniDocument doc;
  KernelKind kind = KernelKind::Separable;
  Domain D;
  Domain E;

  // separable
  std::vector<std::string> g, h;
  // bhcp
  double s = 1.0;
  // series
  std::string series_g, series_h;
  std::optional<std::string> decay_hint;

  // rhs: exactly one of these
  std::optional<std::string> f;
  std::optional<std::vector<double>> coeffs;
  std::optional<std::string> coeff_term;

  Options options;
};

/// Parses and validates a problem file.  Syntax problems in the file raise
/// E_PARSE; expressions that do not parse keep their E_EXPR_* code.
Problem parse_problem(std::string_view text);

/// Problem from an already-parsed document (used after flag overrides).
Problem interpret(IniDocument doc);

SeparableKernel build_separable(const Problem& p);
SeriesKernel build_series(const Problem& p);

/// The rhs as a function on D when one is given or can be formed from
/// coefficients of a separable kernel.
std::optional<FuncExpr> rhs_function(const Problem& p, const SeparableKernel& kernel);

} // namespace fredholm::cli
