#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "attr.hpp"
#include "geometry.hpp"
#include "projection.hpp"

namespace pforge {

struct MifHeader {
    int version = 300;
    std::string charset = "Neutral";
    char delimiter = ',';
    std::string coordsys;  // raw clause text, empty when absent
    std::vector<ColumnDef> columns;
};

struct Feature {
    Geometry geometry;
    AttrRow attrs;
};

struct FeatureTable {
    MifHeader header;
    std::vector<Feature> features;
};

// Parses the MIF geometry/schema file and its MID attribute file. The MID
// side may be absent only when the schema declares zero columns. Supported
// data keywords: NONE, POINT, MULTIPOINT, LINE, PLINE [MULTIPLE k],
// REGION k, RECT; PEN/BRUSH/SYMBOL/CENTER style clauses are consumed and
// ignored. Keywords match case-insensitively, newlines may be LF or CRLF.
FeatureTable parse_mif_mid(std::string_view mif_text,
                           std::optional<std::string_view> mid_text);

// Emits (mif, mid) text that parse_mif_mid reads back to an equal table.
// Output uses LF newlines; region rings are written without the closing
// vertex, MapInfo style.
std::pair<std::string, std::string> write_mif_mid(const FeatureTable& table);

// "CoordSys Earth Projection 1, ..." -> Geographic
// "CoordSys Earth Projection 3, datum, "m", lon0, lat0, k0, fe, fn" -> Lcc
// "CoordSys NonEarth ..." -> NonEarth
// Anything else throws UnsupportedCoordSys.
Crs coordsys_to_projection(std::string_view clause);

std::string coordsys_from_crs(const Crs& crs);

}  // namespace pforge
