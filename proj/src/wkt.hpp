#pragma once

#include <string>
#include <string_view>

#include "geometry.hpp"

namespace pforge {

// Text form contract: up to `significant_digits` significant digits, no
// trailing zeros, "." decimal separator. The store serializes with 17
// digits so persisted coordinates round-trip bit-exactly.
std::string to_wkt(const Geometry& geom, int significant_digits = 12);

// Accepts POINT, MULTIPOINT, LINESTRING, MULTILINESTRING, POLYGON and
// MULTIPOLYGON, case-insensitive. Throws WktSyntax with the 0-based text
// position on malformed input; polygon rings must be explicitly closed.
Geometry from_wkt(std::string_view text);

std::string format_double(double value, int significant_digits);

}  // namespace pforge
