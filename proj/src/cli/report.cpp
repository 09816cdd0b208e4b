#include "fredholm/cli/report.hpp"

#include "fredholm/error.hpp"
#include "fredholm/expr.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace fredholm::cli {

namespace {

std::string fixed17(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string shortest(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  return shortest_repr(v);
}

std::string scalar_text(const Report& v) {
  if (v.is_number_float())
    return fixed17(v.get<double>());
  if (v.is_number_integer())
    return std::to_string(v.get<long long>());
  if (v.is_number_unsigned())
    return std::to_string(v.get<unsigned long long>());
  if (v.is_boolean())
    return v.get<bool>() ? "true" : "false";
  if (v.is_null())
    return "null";
  return v.get<std::string>();
}

bool is_flat(const Report& v) {
  if (!v.is_array())
    return false;
  for (const auto& x : v)
    if (x.is_structured())
      return false;
  return true;
}

void text_of(const Report& v, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  for (auto it = v.begin(); it != v.end(); ++it) {
    const auto& x = it.value();
    if (x.is_object()) {
      out += pad + it.key() + ":\n";
      text_of(x, indent + 2, out);
    } else if (is_flat(x)) {
      out += pad + it.key() + ": [";
      for (std::size_t k = 0; k < x.size(); ++k)
        out += (k ? ", " : "") + scalar_text(x[k]);
      out += "]\n";
    } else if (x.is_array()) {
      out += pad + it.key() + ":\n";
      for (const auto& row : x) {
        if (is_flat(row)) {
          out += pad + " ";
          for (const auto& c : row)
            out += " " + scalar_text(c);
          out += '\n';
        } else if (row.is_object()) {
          out += pad + "  -\n";
          text_of(row, indent + 4, out);
        } else {
          out += pad + "  " + scalar_text(row) + '\n';
        }
      }
    } else {
      out += pad + it.key() + ": " + scalar_text(x) + '\n';
    }
  }
}

Report encode(const Report& v) {
  if (v.is_number_float())
    return shortest(v.get<double>());
  if (v.is_number())
    return scalar_text(v);
  if (v.is_object()) {
    Report out = Report::object();
    for (auto it = v.begin(); it != v.end(); ++it)
      out[it.key()] = encode(it.value());
    return out;
  }
  if (v.is_array()) {
    Report out = Report::array();
    for (const auto& x : v)
      out.push_back(encode(x));
    return out;
  }
  return v;
}

} // namespace

std::string render_text(const Report& report) {
  std::string out;
  text_of(report, 0, out);
  return out;
}

std::string render_json(const Report& report) { return encode(report).dump(2) + '\n'; }

double decode_number(const Report& value) {
  if (value.is_number())
    return value.get<double>();
  const auto s = value.get<std::string>();
  if (s == "inf")
    return HUGE_VAL;
  if (s == "-inf")
    return -HUGE_VAL;
  if (s == "nan")
    return std::nan("");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    throw Error("E_PARSE", "not a number: '" + s + "'");
  return v;
}

} // namespace fredholm::cli
