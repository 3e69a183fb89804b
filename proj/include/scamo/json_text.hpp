#pragma once

#include <string>

#include <json.hpp>

namespace scamo {

using ordered_json = nlohmann::ordered_json;

/// Serializes with keys in insertion order and every floating-point value
/// printed with 17 significant digits (%.17g), so output is byte-stable
/// and round-trips exactly. indent < 0 gives a single line.
/// Throws std::domain_error on NaN or infinity.
std::string format_json(const ordered_json& value, int indent = -1);

/// 17-significant-digit rendering used by format_json and the CSV writers.
std::string format_double(double v);

}  // namespace scamo
