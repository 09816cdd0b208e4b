#pragma once

// Report tree and its two renderings.  Numbers are stored as doubles or
// integers; the text form prints doubles with 17 significant digits, the JSON
// form as shortest round-trip decimal strings.

#include <json.hpp>

#include <string>

namespace fredholm::cli {

using Report = nlohmann::ordered_json;

std::string render_text(const Report& report);
std::string render_json(const Report& report);

/// Inverse of the JSON number encoding ("inf", "-inf" and "nan" included).
double decode_number(const Report& value);

} // namespace fredholm::cli
