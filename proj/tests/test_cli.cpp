#include <doctest.h>

#include "fredholm/cli/runner.hpp"
#include "fredholm/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace fredholm;
using namespace fredholm::cli;

namespace {

const std::string kFixtures = FREDHOLM_FIXTURE_DIR;

std::pair<int, std::string> run_args(const std::vector<std::string>& args, std::string* err = nullptr) {
  std::ostringstream out, e;
  const int code = run(args, out, e);
  if (err)
    *err = e.str();
  return {code, out.str()};
}

std::string error_code(std::string_view text) {
  try {
    parse_problem(text);
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

const char* kExample1 = R"([domain]
D = x: 0, 1
E = t: 0, 1

[kernel]
g = 1; exp(x)
h = 1; t

[rhs]
f = (1/3)*exp(x) + 1/2
)";

} // namespace

TEST_CASE("parse_ini: sections, comments and errors") {
  const auto doc = parse_ini("# top\n[a]\n  # indented comment\nk = v\n\n[b]\nx=1\n");
  REQUIRE(doc.sections.size() == 2);
  CHECK(doc.find("a")->find("k")->value == "v");
  CHECK(doc.find("b")->find("x")->line == 7);
  CHECK(to_ini(parse_ini(to_ini(doc))) == to_ini(doc));

  for (const char* bad : {"k = v\n", "[a]\n[a]\n", "[a]\nk = 1\nk = 2\n", "[a]\nk =\n", "[a\n",
                          "[a]\nnovalue\n"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_ini(bad), Error);
  }
}

TEST_CASE("parse_problem: separable example") {
  const auto p = parse_problem(kExample1);
  CHECK(p.kind == KernelKind::Separable);
  CHECK(p.g.size() == 2);
  CHECK(p.D.axis(0).name == "x");
  CHECK(p.options.quad_order == 32);
  const auto k = build_separable(p);
  CHECK(k.n() == 2);
  CHECK(rhs_function(p, k).has_value());
}

TEST_CASE("parse_problem: validation errors carry stable codes") {
  const std::string base = kExample1;
  CHECK(error_code(base + "[extra]\nk = 1\n") == "E_PARSE");
  CHECK(error_code(base + "[options]\nquad_orderr = 3\n") == "E_PARSE");
  CHECK(error_code(base + "[options]\npath = sideways\n") == "E_PARSE");
  CHECK(error_code(base + "[options]\nquad_order = 0\n") == "E_PARSE");
  CHECK(error_code("[domain]\nD = x: 0, 1\nE = t: 0, 1\n[kernel]\ng = x\nh = t; t^2\n[rhs]\nf = x\n") ==
        "E_PARSE");
  CHECK(error_code("[domain]\nD = x: 1, 0\nE = t: 0, 1\n[kernel]\ng = x\nh = t\n[rhs]\nf = x\n") ==
        "E_PARSE");
  CHECK(error_code("[domain]\nD = x: 0, 1\nE = x: 0, 1\n[kernel]\ng = x\nh = x\n[rhs]\nf = x\n") ==
        "E_PARSE");
  CHECK(error_code("[domain]\nD = x: 0, 1\nE = t: 0, 1\n[kernel]\ng = x\nh = t\n[rhs]\nf = x\ncoeffs = 1\n") ==
        "E_PARSE");
  CHECK(error_code("[domain]\nD = x: 0, 1\nE = t: 0, 1\n[kernel]\ng = x*t\nh = t\n[rhs]\nf = x\n") ==
        "E_EXPR_UNKNOWN_IDENT");
  CHECK(error_code("[domain]\nD = x: 0, 1\nE = t: 0, 1\n[kernel]\ng = x+\nh = t\n[rhs]\nf = x\n") ==
        "E_EXPR_SYNTAX");
  CHECK(error_code("[kernel]\nbuiltin = bhcp\ns = 1\n[domain]\nD = x: 0, 1\n[rhs]\nf = sin(x)\n") ==
        "E_PARSE");
  CHECK(error_code("[kernel]\nbuiltin = bhcp\ns = -1\n[rhs]\nf = sin(x)\n") == "E_PARSE");
}

TEST_CASE("solve_problem: example 1 report") {
  const auto p = parse_problem(kExample1);
  const auto r = solve_problem(p, Flags{});
  CHECK(r["norm"].get<double>() == doctest::Approx(0.5773502691896258).epsilon(1e-12));
  CHECK(std::abs(r["beta"][0].get<double>()) <= 1e-10);
  CHECK(r["beta"][1].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r["samples"]["rows"].size() == 101);
  CHECK(r["warnings"].empty());
  CHECK(r["problem"]["kernel"]["g"] == "1; exp(x)");
}

TEST_CASE("solve_problem: coefficient rhs and explicit corollary-1 path") {
  auto text = std::string(kExample1);
  text.replace(text.find("f = (1/3)*exp(x) + 1/2"), 22, "coeffs = 0.5; 0.3333333333333333");
  const auto r = solve_problem(parse_problem(text + "[options]\npath = corollary1\n"), Flags{});
  CHECK(r["path"] == "corollary1");
  CHECK(r["beta"][1].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("solve_problem: out-of-range rhs warns and reports least squares") {
  auto text = std::string(kExample1);
  text.replace(text.find("(1/3)*exp(x) + 1/2"), 18, "sin(7*x)");
  const auto r = solve_problem(parse_problem(text), Flags{});
  CHECK(r["mode"] == "least_squares");
  CHECK(r["path"] == "corollary1");
  CHECK(!r["warnings"].empty());
}

TEST_CASE("apply_flags: overrides are echoed") {
  Flags f;
  f.quad_order = 16;
  f.panels = 2;
  f.oracle = 50;
  const auto p = apply_flags(parse_problem(kExample1), f);
  CHECK(p.options.quad_order == 16);
  CHECK(p.options.oracle_m == 50);
  const auto r = solve_problem(p, f);
  CHECK(r["problem"]["options"]["quad_order"] == "16");
  CHECK(r["gram"]["panels"].get<int>() == 2);
  CHECK(r["oracle"]["rank"].get<int>() == 2);
}

TEST_CASE("run: exit codes and error lines") {
  std::string err;
  CHECK(run_args({}, &err).first == 2);
  CHECK(err.rfind("E_USAGE:", 0) == 0);
  CHECK(run_args({"solve"}, &err).first == 2);
  CHECK(run_args({"solve", kFixtures + "/example1.ini", "--report", "xml"}, &err).first == 2);
  CHECK(err.rfind("E_USAGE:", 0) == 0);
  CHECK(run_args({"solve", kFixtures + "/missing.ini"}, &err).first == 2);
  CHECK(err.rfind("E_IO:", 0) == 0);
  CHECK(run_args({"solve", kFixtures + "/malformed/dependent_h.ini"}, &err).first == 2);
  CHECK(err.rfind("E_GRAM_SINGULAR:", 0) == 0);
  CHECK(run_args({"solve", kFixtures + "/malformed/bad_expr.ini"}, &err).first == 2);
  CHECK(err.rfind("E_EXPR_SYNTAX:", 0) == 0);
  CHECK(run_args({"--help"}).first == 0);
}

TEST_CASE("run: reports are deterministic") {
  for (const char* fmt : {"text", "json"}) {
    const std::vector<std::string> args{"solve", kFixtures + "/example5.ini", "--report", fmt,
                                        "--seed", "11"};
    const auto a = run_args(args), b = run_args(args);
    CHECK(a.first == 0);
    CHECK(a.second == b.second);
  }
}

TEST_CASE("run: json round trip through regen reproduces beta") {
  const std::string json = "fredholm_cli_test_report.json";
  const std::string ini = "fredholm_cli_test_regen.ini";
  REQUIRE(run_args({"solve", kFixtures + "/example3.ini", "--report", "json", "--out", json}).first ==
          0);
  REQUIRE(run_args({"regen", json, "--out", ini}).first == 0);
  const auto again = run_args({"solve", ini, "--report", "json"});
  REQUIRE(again.first == 0);

  std::ifstream in(json);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto first = Report::parse(ss.str());
  const auto second = Report::parse(again.second);
  CHECK(first["beta"] == second["beta"]);
  CHECK(decode_number(second["beta"][1]) == doctest::Approx(84.0).epsilon(1e-12));
  std::remove(json.c_str());
  std::remove(ini.c_str());
}

TEST_CASE("run: example 5 with the oracle") {
  const auto r = run_args({"solve", kFixtures + "/example5.ini", "--report", "json", "--oracle", "200"});
  REQUIRE(r.first == 0);
  const auto j = Report::parse(r.second);
  CHECK(decode_number(j["oracle"]["max_pointwise_dev"]) <= 1e-5);
  CHECK(decode_number(j["oracle"]["norm_dev"]) <= 1e-5);
}

TEST_CASE("render_json: numbers are shortest round-trip strings") {
  Report r = Report::object();
  r["a"] = 0.1;
  r["b"] = std::numeric_limits<double>::infinity();
  r["c"] = 3;
  const auto j = Report::parse(render_json(r));
  CHECK(j["a"] == "0.1");
  CHECK(decode_number(j["a"]) == 0.1);
  CHECK(decode_number(j["b"]) == std::numeric_limits<double>::infinity());
  CHECK(decode_number(j["c"]) == 3.0);
}
