#include "fredholm/cli/problem.hpp"

#include "fredholm/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numbers>
#include <set>

namespace fredholm::cli {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
    ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
    --b;
  return std::string(s.substr(a, b - a));
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw Error("E_PARSE", "line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

std::vector<std::string> list_of(const Entry& e) {
  auto items = split(e.value, ';');
  for (const auto& it : items)
    if (it.empty())
      parse_fail(e.line, "empty item in list '" + e.key + "'");
  return items;
}

// Expression errors keep their code; the message gains the file position.
template <class F>
auto with_context(const Entry& e, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& err) {
    throw Error(err.code(), "line " + std::to_string(e.line) + ", '" + e.key + "': " + err.what());
  }
}

double constant_of(const Entry& e, const std::string& text) {
  return with_context(e, [&] { return parse_constant(text); });
}

int int_of(const Entry& e, int lo, int hi) {
  int v = 0;
  const auto* first = e.value.data();
  const auto* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    parse_fail(e.line, "'" + e.key + "' needs an integer, got '" + e.value + "'");
  if (v < lo || v > hi)
    parse_fail(e.line, "'" + e.key + "' must lie in [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
  return v;
}

double positive_of(const Entry& e) {
  const double v = constant_of(e, e.value);
  if (!(v > 0.0))
    parse_fail(e.line, "'" + e.key + "' must be positive");
  return v;
}

bool bool_of(const Entry& e) {
  if (e.value == "true" || e.value == "yes" || e.value == "1")
    return true;
  if (e.value == "false" || e.value == "no" || e.value == "0")
    return false;
  parse_fail(e.line, "'" + e.key + "' needs true or false");
}

Domain domain_of(const Entry& e) {
  std::vector<Axis> axes;
  for (const auto& item : list_of(e)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      parse_fail(e.line, "axis '" + item + "' needs the form 'name: lo, hi'");
    const auto bounds = split(std::string_view(item).substr(colon + 1), ',');
    if (bounds.size() != 2)
      parse_fail(e.line, "axis '" + item + "' needs two bounds");
    axes.push_back({trim(std::string_view(item).substr(0, colon)), constant_of(e, bounds[0]),
                    constant_of(e, bounds[1])});
  }
  try {
    return Domain(std::move(axes));
  } catch (const PreconditionError& err) {
    parse_fail(e.line, err.what());
  }
}

Matrix matrix_of(const Entry& e) {
  std::vector<std::vector<double>> rows;
  for (const auto& r : list_of(e)) {
    std::vector<double> row;
    for (const auto& c : split(r, ','))
      row.push_back(constant_of(e, c));
    rows.push_back(std::move(row));
  }
  const auto n = rows.size();
  Matrix K(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      parse_fail(e.line, "'" + e.key + "' must be a square matrix");
    for (std::size_t j = 0; j < n; ++j)
      K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return K;
}

void check_keys(const Section& s, std::initializer_list<std::string_view> allowed) {
  for (const auto& e : s.entries)
    if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end())
      parse_fail(e.line, "unknown key '" + e.key + "' in [" + s.name + "]");
}

const Section& require_section(const IniDocument& doc, std::string_view name) {
  if (const auto* s = doc.find(name))
    return *s;
  throw Error("E_PARSE", "missing section [" + std::string(name) + "]");
}

const Entry& require_key(const Section& s, std::string_view key) {
  if (const auto* e = s.find(key))
    return *e;
  parse_fail(s.line, "[" + s.name + "] needs '" + std::string(key) + "'");
}

std::vector<std::string> with_index(std::vector<std::string> vars) {
  vars.push_back("i");
  return vars;
}

Options options_of(const IniDocument& doc, std::size_t d_dim) {
  Options o;
  const auto* s = doc.find("options");
  if (!s)
    return o;
  check_keys(*s, {"quad_order", "panels", "cond_threshold", "in_range_tol", "tail_tol",
                  "max_terms", "truncation", "path", "compare_legacy", "legacy_k", "oracle_m",
                  "null_degree", "null_candidates", "null_coeffs", "residual_m"});
  for (const auto& e : s->entries) {
    if (e.key == "quad_order")
      o.quad_order = int_of(e, 1, 256);
    else if (e.key == "panels")
      o.panels = int_of(e, 1, 64);
    else if (e.key == "cond_threshold")
      o.cond_threshold = positive_of(e);
    else if (e.key == "in_range_tol")
      o.in_range_tol = positive_of(e);
    else if (e.key == "tail_tol")
      o.tail_tol = positive_of(e);
    else if (e.key == "max_terms")
      o.max_terms = int_of(e, 1, kMaxTerms);
    else if (e.key == "truncation") {
      if (e.value == "adaptive")
        o.truncation = TruncationMode::Adaptive;
      else if (e.value == "fixed")
        o.truncation = TruncationMode::Fixed;
      else
        parse_fail(e.line, "truncation must be 'adaptive' or 'fixed'");
    } else if (e.key == "path") {
      if (e.value == "auto")
        o.path = PathChoice::Auto;
      else if (e.value == "corollary1")
        o.path = PathChoice::Corollary1;
      else if (e.value == "theorem1")
        o.path = PathChoice::Theorem1;
      else
        parse_fail(e.line, "path must be 'auto', 'corollary1' or 'theorem1'");
    } else if (e.key == "compare_legacy")
      o.compare_legacy = bool_of(e);
    else if (e.key == "legacy_k")
      o.legacy_k = matrix_of(e);
    else if (e.key == "oracle_m")
      o.oracle_m = int_of(e, 0, 2000);
    else if (e.key == "null_degree")
      o.null_degree = int_of(e, 0, 12);
    else if (e.key == "null_candidates")
      o.null_candidates = list_of(e);
    else if (e.key == "null_coeffs") {
      for (const auto& c : list_of(e))
        o.null_coeffs.push_back(constant_of(e, c));
    } else if (e.key == "residual_m")
      o.residual_m = int_of(e, 2, d_dim == 1 ? 100000 : 1000);
  }
  return o;
}

} // namespace

const Entry* Section::find(std::string_view key) const {
  for (const auto& e : entries)
    if (e.key == key)
      return &e;
  return nullptr;
}

void Section::set(const std::string& key, const std::string& value) {
  for (auto& e : entries)
    if (e.key == key) {
      e.value = value;
      return;
    }
  entries.push_back({key, value, 0});
}

const Section* IniDocument::find(std::string_view name) const {
  for (const auto& s : sections)
    if (s.name == name)
      return &s;
  return nullptr;
}

Section& IniDocument::get_or_add(const std::string& name) {
  for (auto& s : sections)
    if (s.name == name)
      return s;
  sections.push_back({name, {}, 0});
  return sections.back();
}

IniDocument parse_ini(std::string_view text) {
  IniDocument doc;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line[0] == '#')
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        parse_fail(line_no, "unterminated section header");
      const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
      if (name.empty())
        parse_fail(line_no, "empty section name");
      if (doc.find(name))
        parse_fail(line_no, "duplicate section [" + name + "]");
      doc.sections.push_back({name, {}, line_no});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      parse_fail(line_no, "expected 'key = value'");
    if (doc.sections.empty())
      parse_fail(line_no, "key outside of any section");
    Entry e{trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)),
            line_no};
    if (e.key.empty())
      parse_fail(line_no, "empty key");
    if (e.value.empty())
      parse_fail(line_no, "empty value for '" + e.key + "'");
    auto& sec = doc.sections.back();
    if (sec.find(e.key))
      parse_fail(line_no, "duplicate key '" + e.key + "'");
    sec.entries.push_back(std::move(e));
  }
  return doc;
}

std::string to_ini(const IniDocument& doc) {
  std::string out;
  for (std::size_t k = 0; k < doc.sections.size(); ++k) {
    if (k)
      out += '\n';
    out += '[' + doc.sections[k].name + "]\n";
    for (const auto& e : doc.sections[k].entries)
      out += e.key + " = " + e.value + '\n';
  }
  return out;
}

Problem interpret(IniDocument doc) {
  Problem p;
  for (const auto& s : doc.sections)
    if (s.name != "domain" && s.name != "kernel" && s.name != "rhs" && s.name != "options")
      parse_fail(s.line, "unknown section [" + s.name + "]");

  const auto& kernel = require_section(doc, "kernel");
  check_keys(kernel, {"g", "h", "builtin", "s", "series_g", "series_h", "decay_hint"});
  if (const auto* b = kernel.find("builtin")) {
    if (b->value != "bhcp")
      parse_fail(b->line, "unknown builtin kernel '" + b->value + "'");
    p.kind = KernelKind::Bhcp;
    for (const auto& e : kernel.entries)
      if (e.key != "builtin" && e.key != "s")
        parse_fail(e.line, "'" + e.key + "' does not apply to builtin kernels");
    p.s = kernel.find("s") ? positive_of(*kernel.find("s")) : 1.0;
  } else if (kernel.find("series_g") || kernel.find("series_h")) {
    p.kind = KernelKind::Series;
    for (const auto& e : kernel.entries)
      if (e.key == "g" || e.key == "h" || e.key == "s")
        parse_fail(e.line, "'" + e.key + "' does not apply to series kernels");
    p.series_g = require_key(kernel, "series_g").value;
    p.series_h = require_key(kernel, "series_h").value;
    if (const auto* d = kernel.find("decay_hint"))
      p.decay_hint = d->value;
  } else {
    p.kind = KernelKind::Separable;
    for (const auto& e : kernel.entries)
      if (e.key != "g" && e.key != "h")
        parse_fail(e.line, "'" + e.key + "' does not apply to separable kernels");
    p.g = list_of(require_key(kernel, "g"));
    p.h = list_of(require_key(kernel, "h"));
    if (p.g.size() != p.h.size())
      parse_fail(require_key(kernel, "h").line, "g has " + std::to_string(p.g.size()) +
                                                    " factors but h has " +
                                                    std::to_string(p.h.size()));
    if (p.g.size() > static_cast<std::size_t>(kMaxTerms))
      parse_fail(kernel.line, "at most " + std::to_string(kMaxTerms) + " terms are supported");
  }

  if (p.kind == KernelKind::Bhcp) {
    p.D = Domain({{"x", 0.0, std::numbers::pi}});
    p.E = Domain({{"t", 0.0, std::numbers::pi}});
    if (const auto* dom = doc.find("domain"))
      parse_fail(dom->line, "builtin bhcp fixes D = x: 0, pi and E = t: 0, pi; drop [domain]");
  } else {
    const auto& dom = require_section(doc, "domain");
    check_keys(dom, {"D", "E"});
    p.D = domain_of(require_key(dom, "D"));
    p.E = domain_of(require_key(dom, "E"));
    std::set<std::string> names;
    for (const auto& n : p.D.names())
      names.insert(n);
    for (const auto& n : p.E.names())
      if (!names.insert(n).second)
        parse_fail(require_key(dom, "E").line, "variable '" + n + "' is used by both D and E");
    if (p.kind == KernelKind::Series && names.count("i"))
      parse_fail(dom.line, "'i' is the series index and cannot name an axis");
  }

  const auto& rhs = require_section(doc, "rhs");
  check_keys(rhs, {"f", "coeffs", "coeff_term"});
  if (rhs.entries.size() != 1)
    parse_fail(rhs.line, "[rhs] needs exactly one of f, coeffs, coeff_term");
  const auto& r = rhs.entries.front();
  if (r.key == "f") {
    p.f = r.value;
    with_context(r, [&] { return FuncExpr::parse(r.value, p.D.names()); });
  } else if (r.key == "coeffs") {
    std::vector<double> c;
    for (const auto& item : list_of(r))
      c.push_back(constant_of(r, item));
    if (p.kind == KernelKind::Separable && c.size() != p.g.size())
      parse_fail(r.line, "coeffs has " + std::to_string(c.size()) + " entries, kernel has " +
                             std::to_string(p.g.size()) + " terms");
    p.coeffs = std::move(c);
  } else {
    if (p.kind == KernelKind::Separable)
      parse_fail(r.line, "coeff_term applies to series kernels only");
    p.coeff_term = r.value;
    with_context(r, [&] { return FuncExpr::parse(r.value, {"i"}); });
  }

  p.options = options_of(doc, p.D.dim());
  if (p.options.null_coeffs.size() && p.options.null_degree < 0 && p.options.null_candidates.empty())
    parse_fail(doc.find("options")->line, "null_coeffs needs null_degree or null_candidates");
  for (const auto& c : p.options.null_candidates)
    with_context(*doc.find("options")->find("null_candidates"),
                 [&] { return FuncExpr::parse(c, p.E.names()); });

  // Expression checks against the domains, so that errors point at the file.
  if (p.kind == KernelKind::Separable) {
    const auto& ge = require_key(kernel, "g");
    const auto& he = require_key(kernel, "h");
    for (const auto& t : p.g)
      with_context(ge, [&] { return FuncExpr::parse(t, p.D.names()); });
    for (const auto& t : p.h)
      with_context(he, [&] { return FuncExpr::parse(t, p.E.names()); });
  } else if (p.kind == KernelKind::Series) {
    with_context(require_key(kernel, "series_g"),
                 [&] { return FuncExpr::parse(p.series_g, with_index(p.D.names())); });
    with_context(require_key(kernel, "series_h"),
                 [&] { return FuncExpr::parse(p.series_h, with_index(p.E.names())); });
  }
  p.doc = std::move(doc);
  return p;
}

Problem parse_problem(std::string_view text) { return interpret(parse_ini(text)); }

SeparableKernel build_separable(const Problem& p) {
  std::vector<FuncExpr> gs, hs;
  for (const auto& t : p.g)
    gs.push_back(FuncExpr::parse(t, p.D.names()));
  for (const auto& t : p.h)
    hs.push_back(FuncExpr::parse(t, p.E.names()));
  return SeparableKernel(std::move(gs), std::move(hs), p.D, p.E);
}

SeriesKernel build_series(const Problem& p) {
  SeriesKernel::CoeffFn coeff;
  if (p.coeffs) {
    coeff = [c = *p.coeffs](int i) {
      return i >= 1 && static_cast<std::size_t>(i) <= c.size() ? c[static_cast<std::size_t>(i - 1)]
                                                               : 0.0;
    };
  } else if (p.coeff_term) {
    coeff = [t = FuncExpr::parse(*p.coeff_term, {"i"})](int i) {
      return t({static_cast<double>(i)});
    };
  }
  if (p.kind == KernelKind::Bhcp)
    return bhcp_kernel(p.s, std::move(coeff));

  const auto gt = FuncExpr::parse(p.series_g, with_index(p.D.names()));
  const auto ht = FuncExpr::parse(p.series_h, with_index(p.E.names()));
  auto term = [gt, ht](int i) {
    return SeriesTerm{gt.substitute("i", i), ht.substitute("i", i)};
  };
  return SeriesKernel(term, std::move(coeff), p.D, p.E, p.decay_hint);
}

std::optional<FuncExpr> rhs_function(const Problem& p, const SeparableKernel& kernel) {
  if (p.f)
    return FuncExpr::parse(*p.f, p.D.names());
  if (p.coeffs && p.coeffs->size() == kernel.n())
    return FuncExpr::linear_combination(*p.coeffs, kernel.gs());
  return std::nullopt;
}

} // namespace fredholm::cli
