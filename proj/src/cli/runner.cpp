#include "fredholm/cli/runner.hpp"

#include "fredholm/error.hpp"
#include "fredholm/minnorm.hpp"
#include "fredholm/oracle.hpp"
#include "fredholm/series.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

namespace fredholm::cli {

namespace {

constexpr int kMinimalityTrials = 20;

Report vector_json(const Vector& v) {
  Report out = Report::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back(v(i));
  return out;
}

Report echo(const IniDocument& doc) {
  Report out = Report::object();
  for (const auto& s : doc.sections) {
    Report sec = Report::object();
    for (const auto& e : s.entries)
      sec[e.key] = e.value;
    out[s.name] = std::move(sec);
  }
  return out;
}

int default_residual_m(std::size_t dim) { return dim == 1 ? 201 : dim == 2 ? 50 : 12; }

// Deterministic uniform draw in [-1, 1), independent of the standard
// library's distribution implementations.
double draw(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

struct Solved {
  SeparableKernel kernel;
  GramSet gram;
  MinNormSolution solution;
  std::optional<FuncExpr> f; // rhs as a function on D, when available
  std::string path;
};

Report gram_json(const GramSet& g, const SeparableKernel& k) {
  Report out = Report::object();
  out["terms"] = static_cast<long long>(k.n());
  out["cond_H"] = g.condH;
  out["cond_G"] = g.condG;
  out["quad_order"] = g.rule.order;
  out["panels"] = g.rule.panels;
  return out;
}

Solved solve_separable(const Problem& p, const QuadratureRule& rule, Report& r,
                       std::vector<std::string>& warnings) {
  auto kernel = build_separable(p);
  auto f = rhs_function(p, kernel);
  const auto& o = p.options;
  const bool same = kernel.D().same_shape(kernel.E());
  const bool wants_cross = o.path == PathChoice::Theorem1 || o.path == PathChoice::Auto ||
                           o.compare_legacy || o.legacy_k.has_value();
  if (o.path == PathChoice::Theorem1 && !same)
    warnings.push_back("theorem-1 path needs D and E of the same shape; using the corollary-1 path");
  GramOptions gopts;
  gopts.cross_terms = same && wants_cross;
  gopts.cond_threshold = o.cond_threshold;
  auto gram = assemble(kernel, f, rule, gopts);
  r["gram"] = gram_json(gram, kernel);

  std::optional<int> rank;
  if (gram.A) {
    rank = cross_rank(gram);
    Report a = Report::object();
    a["rank"] = *rank;
    a["singular"] = *rank < static_cast<int>(kernel.n());
    r["A"] = a;
  }

  const RhsSpec rhs = p.f ? RhsSpec::func(*f) : RhsSpec::coeffs(
      Eigen::Map<const Vector>(p.coeffs->data(), static_cast<Eigen::Index>(p.coeffs->size())));
  auto cor1 = solve_min_norm(rhs, kernel, gram, o.in_range_tol);

  bool use_t1 = false;
  if (gram.A && f) {
    const bool full = *rank == static_cast<int>(kernel.n());
    if (o.path == PathChoice::Theorem1) {
      use_t1 = full;
      if (!full)
        warnings.push_back("A is singular (rank " + std::to_string(*rank) + " of " +
                           std::to_string(kernel.n()) + "); using the corollary-1 path");
      else if (cor1.mode == SolveMode::LeastSquares)
        warnings.push_back("f is not in the range of the operator; the theorem-1 path assumes it is");
    } else if (o.path == PathChoice::Auto && p.f) {
      use_t1 = full && cor1.mode == SolveMode::Exact;
      if (!full)
        warnings.push_back("A is singular (rank " + std::to_string(*rank) + " of " +
                           std::to_string(kernel.n()) + "); using the corollary-1 path");
    }
  }

  Solved s{kernel, gram, cor1, f, "corollary1"};
  if (use_t1) {
    s.solution = solve_theorem1(kernel, gram, f, o.in_range_tol);
    s.path = "theorem1";
  }
  return s;
}

Solved solve_series_problem(const Problem& p, const QuadratureRule& rule, Report& r) {
  const auto& o = p.options;
  auto sk = build_series(p);
  TruncationPolicy policy{o.max_terms, o.tail_tol, o.truncation};
  std::optional<FuncExpr> f;
  if (p.f)
    f = FuncExpr::parse(*p.f, p.D.names());

  Report series = Report::object();
  auto result = [&] {
    if (f && p.kind == KernelKind::Bhcp) {
      // Sine coefficients of f give c_i directly, without inverting the
      // exponentially graded G.
      auto b = bhcp_sine_coefficients(*f, o.max_terms, rule);
      series["rhs"] = "sine-projected f";
      return solve_series(sk.with_rhs(bhcp_rhs_from_sine(p.s, std::move(b))), policy, rule);
    }
    if (f) {
      series["rhs"] = "projected f";
      return solve_series(sk, *f, policy, rule, o.in_range_tol);
    }
    series["rhs"] = "coefficients";
    return solve_series(sk, policy, rule);
  }();

  series["kind"] = p.kind == KernelKind::Bhcp ? "bhcp" : "series";
  if (p.kind == KernelKind::Bhcp)
    series["s"] = p.s;
  series["truncation"] = o.truncation == TruncationMode::Adaptive ? "adaptive" : "fixed";
  series["N"] = result.truncation.N;
  if (result.truncation.tail_estimate)
    series["tail_estimate"] = *result.truncation.tail_estimate;
  r["series"] = series;
  r["gram"] = gram_json(result.gram, result.truncation.kernel);

  if (!f) {
    std::vector<double> c(result.solution.C.data(),
                          result.solution.C.data() + result.solution.C.size());
    f = FuncExpr::linear_combination(c, result.truncation.kernel.gs());
  }
  return Solved{result.truncation.kernel, result.gram, result.solution, f, "series"};
}

Report structure_json(const Problem& p, const Solved& s) {
  std::vector<FuncExpr> cands;
  if (p.options.null_degree >= 0)
    cands = legendre_candidates(s.kernel.E(), p.options.null_degree);
  for (const auto& c : p.options.null_candidates)
    cands.push_back(FuncExpr::parse(c, s.kernel.E().names()));
  const auto nc = make_null_component(cands, p.options.null_coeffs, s.kernel, s.gram);
  const auto st = compose_structure(s.solution, nc, s.kernel, s.gram);
  Report out = Report::object();
  out["candidates"] = static_cast<long long>(cands.size());
  out["dropped"] = static_cast<long long>(nc.dropped);
  out["basis_size"] = static_cast<long long>(nc.phis.size());
  Report coeffs = Report::array();
  for (double c : nc.coeffs)
    coeffs.push_back(c);
  out["coeffs"] = coeffs;
  out["norm_sq_formula"] = st.norm_sq_formula;
  out["norm_sq_quadrature"] = st.norm_sq_quadrature;
  out["pythagoras_rel_dev"] = st.pythagoras_rel_dev;
  out["max_operator_deviation"] = st.max_operator_deviation;
  return out;
}

Report legacy_json(const Problem& p, const Solved& s, int grid_m) {
  Report out = Report::object();
  if (!s.gram.A) {
    out["available"] = false;
    out["reason"] = "D and E differ in shape";
    return out;
  }
  try {
    const auto legacy = solve_prop1(s.kernel, s.gram);
    out["available"] = true;
    out["norm"] = std::sqrt(std::max(0.0, legacy.norm_sq));
    out["norm_sq"] = legacy.norm_sq;
    double dev = 0.0;
    for (const auto& t : uniform_grid(s.kernel.E(), grid_m))
      dev = std::max(dev, std::abs(legacy.u(t) - s.solution.u(t)));
    out["max_deviation_from_u_dagger"] = dev;
    out["norm_excess"] = std::sqrt(std::max(0.0, legacy.norm_sq)) - s.solution.norm();
  } catch (const SingularMatrixError& err) {
    out["available"] = false;
    out["reason"] = err.what();
    return out;
  }
  if (p.options.legacy_k) {
    const auto rep = check_corollary2(s.kernel, s.gram, *p.options.legacy_k);
    Report c = Report::object();
    c["consistent"] = rep.consistent;
    c["max_deviation"] = rep.max_deviation;
    c["k_mismatch"] = rep.k_mismatch;
    c["norm_sq_legacy"] = rep.norm_sq_legacy;
    c["norm_sq_dagger"] = rep.norm_sq_dagger;
    out["corollary2"] = c;
  }
  return out;
}

Report minimality_json(std::uint64_t seed, const Solved& s) {
  std::mt19937_64 rng(seed);
  const auto cands = legendre_candidates(s.kernel.E(), 4);
  const auto grid = tensor_grid(s.kernel.E(), s.gram.rule);
  const auto u = s.solution.u.as_expr();
  const auto uv = sample(u, s.kernel.E(), grid);
  double gap = HUGE_VAL, dev = 0.0;
  for (int trial = 0; trial < kMinimalityTrials; ++trial) {
    std::vector<double> c;
    for (std::size_t k = 0; k < cands.size(); ++k)
      c.push_back(3.0 * draw(rng));
    const auto w = null_project(FuncExpr::linear_combination(c, cands), s.kernel, s.gram);
    const auto wv = sample(w, s.kernel.E(), grid);
    std::vector<double> sum(uv.size());
    for (std::size_t q = 0; q < sum.size(); ++q)
      sum[q] = uv[q] + wv[q];
    const double total = weighted_dot(sum, sum, grid.weights);
    const double ww = weighted_dot(wv, wv, grid.weights);
    gap = std::min(gap, std::sqrt(total) - s.solution.norm());
    dev = std::max(dev, std::abs(total - s.solution.norm_sq - ww) /
                            std::max(total, std::numeric_limits<double>::min()));
  }
  Report out = Report::object();
  out["seed"] = static_cast<unsigned long long>(seed);
  out["trials"] = kMinimalityTrials;
  out["min_norm_gap"] = gap;
  out["max_pythagoras_rel_dev"] = dev;
  return out;
}

Report samples_json(const Solved& s, int m) {
  Report out = Report::object();
  Report cols = Report::array();
  for (const auto& n : s.kernel.E().names())
    cols.push_back(n);
  cols.push_back("u");
  out["columns"] = cols;
  Report rows = Report::array();
  for (const auto& t : uniform_grid(s.kernel.E(), m)) {
    Report row = Report::array();
    for (double c : t)
      row.push_back(c);
    row.push_back(s.solution.u(t));
    rows.push_back(std::move(row));
  }
  out["rows"] = rows;
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("E_IO", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::optional<std::string>& path, std::ostream& out) {
  if (!path) {
    out << text;
    return;
  }
  std::ofstream f(*path, std::ios::binary);
  if (!(f << text))
    throw Error("E_IO", "cannot write '" + *path + "'");
}

} // namespace

Problem apply_flags(Problem p, const Flags& flags) {
  auto& opts = p.doc.get_or_add("options");
  if (flags.quad_order)
    opts.set("quad_order", std::to_string(*flags.quad_order));
  if (flags.panels)
    opts.set("panels", std::to_string(*flags.panels));
  if (flags.oracle)
    opts.set("oracle_m", std::to_string(*flags.oracle));
  if (flags.compare_legacy)
    opts.set("compare_legacy", "true");
  if (opts.entries.empty())
    p.doc.sections.pop_back();
  return interpret(std::move(p.doc));
}

Report solve_problem(const Problem& p, const Flags& flags) {
  const auto& o = p.options;
  const auto rule = gauss_legendre(o.quad_order, o.panels);
  std::vector<std::string> warnings;

  Report r = Report::object();
  r["problem"] = echo(p.doc);
  Solved s = p.kind == KernelKind::Separable ? solve_separable(p, rule, r, warnings)
                                             : solve_series_problem(p, rule, r);

  const auto& sol = s.solution;
  r["path"] = s.path;
  r["mode"] = sol.mode == SolveMode::Exact ? "exact" : "least_squares";
  if (sol.mode == SolveMode::LeastSquares)
    warnings.push_back("f is not in the range of the operator (relative residual " +
                       shortest_repr(sol.in_range_residual) +
                       "); the result is the minimal-norm least-squares solution");
  r["C"] = vector_json(sol.C);
  r["beta"] = vector_json(sol.beta);
  r["norm"] = sol.norm();
  r["norm_sq"] = sol.norm_sq;
  r["in_range_residual"] = sol.in_range_residual;
  r["u_dagger"] = sol.u.as_expr().to_string();

  const int m = o.residual_m ? o.residual_m : default_residual_m(s.kernel.D().dim());
  const auto res = s.f ? residual_report(sol.u.evaluator(), s.kernel, *s.f, m, s.gram.rule)
                       : residual_report(sol.u.evaluator(), s.kernel, sol.C, m, s.gram.rule);
  Report rr = Report::object();
  rr["grid_per_axis"] = m;
  rr["max_abs"] = res.max_abs;
  rr["rel_l2"] = res.rel_l2;
  r["residual"] = rr;

  if (o.oracle_m > 0) {
    const auto dop = oracle::discretize(s.kernel, o.oracle_m, o.oracle_m);
    const auto orc = oracle::oracle_min_norm(dop, *s.f);
    const auto cmp = oracle::compare(sol, dop, orc);
    Report ob = Report::object();
    ob["m"] = o.oracle_m;
    ob["nodes_t"] = static_cast<long long>(dop.t_grid.size());
    ob["nodes_x"] = static_cast<long long>(dop.x_grid.size());
    ob["rank"] = orc.rank;
    ob["oracle_norm"] = orc.norm;
    ob["max_pointwise_dev"] = cmp.max_pointwise_dev;
    ob["norm_dev"] = cmp.norm_dev;
    r["oracle"] = ob;
  }

  if (o.compare_legacy || o.legacy_k) {
    if (p.kind == KernelKind::Separable)
      r["legacy"] = legacy_json(p, s, s.kernel.E().dim() == 1 ? 200 : 50);
    else
      warnings.push_back("legacy comparison applies to separable kernels only");
  }

  if (o.null_degree >= 0 || !o.null_candidates.empty())
    r["structure"] = structure_json(p, s);

  if (flags.seed)
    r["minimality_demo"] = minimality_json(*flags.seed, s);

  Report w = Report::array();
  for (const auto& x : warnings)
    w.push_back(x);
  r["warnings"] = w;
  r["samples"] = samples_json(s, flags.samples);
  return r;
}

std::string regenerate(const std::string& report_json) {
  Report j;
  try {
    j = Report::parse(report_json);
  } catch (const nlohmann::json::exception& e) {
    throw Error("E_PARSE", std::string("report is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("problem") || !j["problem"].is_object())
    throw Error("E_PARSE", "report has no problem echo");
  IniDocument doc;
  for (auto it = j["problem"].begin(); it != j["problem"].end(); ++it) {
    if (!it.value().is_object())
      throw Error("E_PARSE", "echoed section '" + it.key() + "' is not an object");
    Section s{it.key(), {}, 0};
    for (auto kv = it.value().begin(); kv != it.value().end(); ++kv) {
      if (!kv.value().is_string())
        throw Error("E_PARSE", "echoed value '" + kv.key() + "' is not a string");
      s.entries.push_back({kv.key(), kv.value().get<std::string>(), 0});
    }
    doc.sections.push_back(std::move(s));
  }
  auto text = to_ini(doc);
  parse_problem(text); // the regenerated file must itself be valid
  return text;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal-norm solutions of degenerate first-kind Fredholm equations"};
  app.name("fredholm");
  app.require_subcommand(1);

  Flags flags;
  std::string file;
  int samples = 101, oracle = 0, quad = 0, panels = 0;
  std::uint64_t seed = 0;
  std::string out_path;
  auto* solve = app.add_subcommand("solve", "Solve a problem file and print a report");
  solve->add_option("file", file, "Problem file")->required();
  solve->add_option("--report", flags.report, "Report format")
      ->check(CLI::IsMember({"text", "json"}));
  solve->add_option("--samples", samples, "Sample points per axis of E")
      ->check(CLI::Range(2, 100000));
  solve->add_option("--oracle", oracle, "Run the Nystrom oracle with m nodes")
      ->check(CLI::Range(1, 2000));
  solve->add_flag("--compare-legacy", flags.compare_legacy, "Compare with the legacy solution");
  solve->add_option("--quad-order", quad, "Gauss-Legendre order per panel")
      ->check(CLI::Range(1, 256));
  solve->add_option("--panels", panels, "Panels per axis")->check(CLI::Range(1, 64));
  solve->add_option("--out", out_path, "Write the report to FILE");
  solve->add_option("--seed", seed, "Seed for the randomized minimality demo");

  std::string report_path, regen_out;
  auto* regen = app.add_subcommand("regen", "Rebuild a problem file from a JSON report");
  regen->add_option("report", report_path, "JSON report")->required();
  regen->add_option("--out", regen_out, "Write the problem file to FILE");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "E_USAGE: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*regen) {
      const auto text = regenerate(read_file(report_path));
      emit(text, regen_out.empty() ? std::nullopt : std::optional<std::string>(regen_out), out);
      return 0;
    }
    flags.samples = samples;
    if (solve->count("--oracle"))
      flags.oracle = oracle;
    if (solve->count("--quad-order"))
      flags.quad_order = quad;
    if (solve->count("--panels"))
      flags.panels = panels;
    if (solve->count("--out"))
      flags.out = out_path;
    if (solve->count("--seed"))
      flags.seed = seed;

    const auto problem = apply_flags(parse_problem(read_file(file)), flags);
    const auto report = solve_problem(problem, flags);
    emit(flags.report == "json" ? render_json(report) : render_text(report), flags.out, out);
    return 0;
  } catch (const Error& e) {
    err << e.code() << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "E_INTERNAL: " << e.what() << '\n';
  }
  return 2;
}

} // namespace fredholm::cli
