#include "geoprocessing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace pforge {

namespace {

constexpr double kPi = std::numbers::pi;

// Arc vertices on the true circle from angle a0 to a1 (ccw, a1 > a0),
// `per_quadrant` segments per quarter turn. When the start angle sits on
// the global step grid the angles are canonicalized so coincident arcs
// from different pieces produce bit-identical vertices.
void append_arc(std::vector<Coord>& out, const Coord& center, double radius, double a0,
                double a1, int per_quadrant, bool include_start) {
    const double step = (kPi / 2.0) / per_quadrant;
    const double span = a1 - a0;
    const int segments = std::max(1, static_cast<int>(std::ceil(span / step - 1e-9)));
    const double grid_pos = a0 / step;
    const bool on_grid = std::fabs(grid_pos - std::round(grid_pos)) < 1e-9 &&
                         std::fabs(span / step - std::round(span / step)) < 1e-9;
    for (int k = include_start ? 0 : 1; k <= segments; ++k) {
        double angle;
        if (on_grid) {
            angle = (std::round(grid_pos) + k) * step;
            if (k == 0) angle = std::round(grid_pos) * step;
        } else {
            angle = a0 + span * k / segments;
        }
        out.push_back({center.x + radius * std::cos(angle),
                       center.y + radius * std::sin(angle)});
    }
}

PolygonSet disk(const Coord& center, double radius, int q) {
    std::vector<Coord> pts;
    pts.reserve(static_cast<std::size_t>(4 * q));
    const double step = (kPi / 2.0) / q;
    for (int k = 0; k < 4 * q; ++k)
        pts.push_back({center.x + radius * std::cos(k * step),
                       center.y + radius * std::sin(k * step)});
    return {Polygon::normalized(Ring::from_coords(std::move(pts)), {})};
}

PolygonSet capsule(const Coord& a, const Coord& b, double radius, int q) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len = std::hypot(dx, dy);
    if (len <= kCoordEps) return disk(a, radius, q);
    const double heading = std::atan2(dy, dx);
    std::vector<Coord> pts;
    // right flank, cap at b, left flank, cap at a
    append_arc(pts, b, radius, heading - kPi / 2.0, heading + kPi / 2.0, q, true);
    append_arc(pts, a, radius, heading + kPi / 2.0, heading + 3.0 * kPi / 2.0, q, true);
    return {Polygon::normalized(Ring::from_coords(std::move(pts)), {})};
}

bool ring_is_convex(const Ring& ring) {
    const auto& cs = ring.coords();
    const std::size_t n = cs.size() - 1;
    double sign = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Coord& a = cs[i];
        const Coord& b = cs[(i + 1) % n];
        const Coord& c = cs[(i + 2) % n];
        const double cr = cross(a, b, c);
        if (cr == 0.0) continue;
        if (sign == 0.0) {
            sign = cr;
        } else if ((sign > 0) != (cr > 0)) {
            return false;
        }
    }
    return true;
}

// exact outline offset for a convex CCW ring
PolygonSet convex_offset(const Ring& ring, double radius, int q) {
    const auto& cs = ring.coords();
    const std::size_t n = cs.size() - 1;
    std::vector<Coord> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const Coord& prev = cs[(i + n - 1) % n];
        const Coord& cur = cs[i];
        const Coord& next = cs[(i + 1) % n];
        const double in_heading = std::atan2(cur.y - prev.y, cur.x - prev.x);
        const double out_heading = std::atan2(next.y - cur.y, next.x - cur.x);
        // outward normal of an edge is its heading - 90 deg for CCW rings
        double arc_from = in_heading - kPi / 2.0;
        double arc_to = out_heading - kPi / 2.0;
        while (arc_to < arc_from - 1e-15) arc_to += 2.0 * kPi;
        append_arc(pts, cur, radius, arc_from, arc_to, q, true);
    }
    return {Polygon::normalized(Ring::from_coords(std::move(pts)), {})};
}

PolygonSet buffer_region(const PolygonSet& region, double radius, int q) {
    if (region.size() == 1 && region[0].holes.empty() && ring_is_convex(region[0].outer))
        return convex_offset(region[0].outer, radius, q);
    std::vector<PolygonSet> parts;
    parts.push_back(region);
    for (const auto& poly : region) {
        const auto edge_capsules = [&](const Ring& ring) {
            const auto& cs = ring.coords();
            for (std::size_t i = 0; i + 1 < cs.size(); ++i)
                parts.push_back(capsule(cs[i], cs[i + 1], radius, q));
        };
        edge_capsules(poly.outer);
        for (const auto& h : poly.holes) edge_capsules(h);
    }
    return region_union_all(std::move(parts));
}

}  // namespace

Geometry buffer(const Geometry& geom, double distance, int quadrant_segments) {
    if (geom.is_none())
        throw Error(ErrorKind::EmptyGeometry, "cannot buffer geometry of kind None");
    if (!(distance > 0.0))
        throw Error(ErrorKind::NonPositiveDistance,
                    "buffer distance must be positive, got " + std::to_string(distance));
    const int q = std::max(1, quadrant_segments);

    PolygonSet out;
    switch (geom.kind()) {
        case Geometry::Kind::Point:
            out = disk(geom.as_point(), distance, q);
            break;
        case Geometry::Kind::MultiPoint: {
            std::vector<PolygonSet> parts;
            for (const auto& c : geom.as_multipoint()) parts.push_back(disk(c, distance, q));
            out = region_union_all(std::move(parts));
            break;
        }
        case Geometry::Kind::PolyLine: {
            const auto& parts_in = geom.as_polyline().parts;
            if (parts_in.size() == 1 && parts_in[0].size() == 2) {
                out = capsule(parts_in[0][0], parts_in[0][1], distance, q);
                break;
            }
            std::vector<PolygonSet> pieces;
            for (const auto& part : parts_in)
                for (std::size_t i = 0; i + 1 < part.size(); ++i)
                    pieces.push_back(capsule(part[i], part[i + 1], distance, q));
            out = region_union_all(std::move(pieces));
            break;
        }
        case Geometry::Kind::Region:
            out = buffer_region(geom.as_region(), distance, q);
            break;
        case Geometry::Kind::None:
            break;
    }
    return Geometry::region(std::move(out));
}

// ------------------------------------------------------------ predicates

namespace {

std::vector<const Ring*> region_rings(const PolygonSet& region) {
    std::vector<const Ring*> rings;
    for (const auto& poly : region) {
        rings.push_back(&poly.outer);
        for (const auto& h : poly.holes) rings.push_back(&h);
    }
    return rings;
}

// every coordinate-pair segment of a geometry
std::vector<std::pair<Coord, Coord>> geometry_segments(const Geometry& g) {
    std::vector<std::pair<Coord, Coord>> segs;
    switch (g.kind()) {
        case Geometry::Kind::PolyLine:
            for (const auto& part : g.as_polyline().parts)
                for (std::size_t i = 0; i + 1 < part.size(); ++i)
                    segs.push_back({part[i], part[i + 1]});
            break;
        case Geometry::Kind::Region:
            for (const Ring* r : region_rings(g.as_region())) {
                const auto& cs = r->coords();
                for (std::size_t i = 0; i + 1 < cs.size(); ++i)
                    segs.push_back({cs[i], cs[i + 1]});
            }
            break;
        default:
            break;
    }
    return segs;
}

std::vector<Coord> geometry_points(const Geometry& g) {
    std::vector<Coord> pts;
    g.for_each_coord([&](const Coord& c) { pts.push_back(c); });
    return pts;
}

bool point_touches(const Coord& p, const Geometry& g) {
    switch (g.kind()) {
        case Geometry::Kind::Point:
            return coord_near(p, g.as_point());
        case Geometry::Kind::MultiPoint: {
            for (const auto& c : g.as_multipoint())
                if (coord_near(p, c)) return true;
            return false;
        }
        case Geometry::Kind::PolyLine: {
            for (const auto& [a, b] : geometry_segments(g))
                if (point_segment_distance_sq(p, a, b) <= kCoordEps * kCoordEps) return true;
            return false;
        }
        case Geometry::Kind::Region:
            return point_in_region(p, g.as_region()) != PointLocation::Outside;
        case Geometry::Kind::None:
            return false;
    }
    return false;
}

}  // namespace

bool geometry_intersects(const Geometry& a, const Geometry& b) {
    if (a.is_none() || b.is_none()) return false;
    if (!a.envelope().intersects(b.envelope())) return false;

    // any vertex of one touching the other
    for (const auto& p : geometry_points(a))
        if (point_touches(p, b)) return true;
    for (const auto& p : geometry_points(b))
        if (point_touches(p, a)) return true;

    // boundary/segment crossings
    const auto sa = geometry_segments(a);
    const auto sb = geometry_segments(b);
    for (const auto& [a1, a2] : sa)
        for (const auto& [b1, b2] : sb)
            if (segments_touch(a1, a2, b1, b2)) return true;
    return false;
}

bool geometry_contains(const Geometry& a, const Geometry& b) {
    if (a.is_none() || b.is_none()) return false;
    if (!a.envelope().contains(b.envelope())) return false;

    if (a.kind() == Geometry::Kind::Region) {
        const auto& region = a.as_region();
        for (const auto& p : geometry_points(b))
            if (point_in_region(p, region) == PointLocation::Outside) return false;
        // no boundary of b may properly cross a boundary of a
        const auto sa = geometry_segments(a);
        for (const auto& [b1, b2] : geometry_segments(b)) {
            for (const auto& [a1, a2] : sa)
                if (segments_cross_properly(a1, a2, b1, b2)) return false;
            const Coord mid{(b1.x + b2.x) / 2.0, (b1.y + b2.y) / 2.0};
            if (point_in_region(mid, region) == PointLocation::Outside) return false;
        }
        // a hole of a strictly inside b would poke a gap into b
        if (b.kind() == Geometry::Kind::Region) {
            const auto& b_region = b.as_region();
            for (const auto& poly : region) {
                for (const auto& hole : poly.holes) {
                    for (const auto& hc : hole.coords()) {
                        if (point_in_region(hc, b_region) == PointLocation::Inside)
                            return false;
                    }
                }
            }
        }
        return true;
    }

    // non-area containers: every point of b must lie on a
    for (const auto& p : geometry_points(b))
        if (!point_touches(p, a)) return false;
    for (const auto& [b1, b2] : geometry_segments(b)) {
        const Coord mid{(b1.x + b2.x) / 2.0, (b1.y + b2.y) / 2.0};
        if (!point_touches(mid, a)) return false;
    }
    return true;
}

// ---------------------------------------------------------------- joins

namespace {

bool eval_predicate(SpatialPredicate pred, const Geometry& feature, const Geometry& probe) {
    switch (pred) {
        case SpatialPredicate::Intersects: return geometry_intersects(feature, probe);
        case SpatialPredicate::Contains: return geometry_contains(feature, probe);
        case SpatialPredicate::Within: return geometry_contains(probe, feature);
    }
    return false;
}

}  // namespace

std::optional<SpatialPredicate> spatial_predicate_from_name(std::string_view name) {
    if (name == "intersects") return SpatialPredicate::Intersects;
    if (name == "contains") return SpatialPredicate::Contains;
    if (name == "within") return SpatialPredicate::Within;
    return std::nullopt;
}

std::vector<std::pair<std::string, std::string>> spatial_join(const Layer& left,
                                                              const Layer& right,
                                                              SpatialPredicate pred) {
    if (!crs_equal(left.crs, right.crs))
        throw Error(ErrorKind::CrsMismatch, "layers '" + left.name + "' and '" + right.name +
                                                "' do not share a CRS");
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& [left_id, feature] : left.features) {
        std::vector<std::string> candidates = right.index.query(feature.geometry.envelope());
        std::sort(candidates.begin(), candidates.end());
        for (const auto& right_id : candidates) {
            const auto it = right.features.find(right_id);
            if (it == right.features.end()) continue;
            if (eval_predicate(pred, feature.geometry, it->second.geometry))
                pairs.emplace_back(left_id, right_id);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

// --------------------------------------------------------------- select

namespace {

int find_column(const Layer& layer, const std::string& name) {
    auto fold = [](const std::string& s) {
        std::string out = s;
        std::transform(out.begin(), out.end(), out.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return out;
    };
    const std::string want = fold(name);
    for (std::size_t i = 0; i < layer.schema.size(); ++i)
        if (fold(layer.schema[i].name) == want) return static_cast<int>(i);
    throw Error(ErrorKind::UnknownColumn,
                "layer '" + layer.name + "' has no column '" + name + "'");
}

// three-way compare, nullopt when incomparable
std::optional<int> compare_values(const AttrValue& cell, const AttrValue& probe) {
    if (is_null(cell) || is_null(probe)) return std::nullopt;
    auto num_of = [](const AttrValue& v) -> std::optional<double> {
        if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
        if (const auto* d = std::get_if<double>(&v)) return *d;
        if (const auto* dt = std::get_if<DateValue>(&v)) return static_cast<double>(dt->ymd);
        return std::nullopt;
    };
    if (const auto* s = std::get_if<std::string>(&cell)) {
        const auto* p = std::get_if<std::string>(&probe);
        if (!p) return std::nullopt;
        const int c = s->compare(*p);
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    if (const auto* b = std::get_if<bool>(&cell)) {
        const auto* p = std::get_if<bool>(&probe);
        if (!p) return std::nullopt;
        return static_cast<int>(*b) - static_cast<int>(*p);
    }
    const auto lhs = num_of(cell);
    const auto rhs = num_of(probe);
    if (!lhs || !rhs) return std::nullopt;
    if (*lhs < *rhs) return -1;
    if (*lhs > *rhs) return 1;
    return 0;
}

bool check_op_compat(const ColumnDef& col, const AttributePredicate& pred) {
    using Op = AttributePredicate::Op;
    if (pred.op == Op::ContainsText)
        return col.type == ColType::Char && std::holds_alternative<std::string>(pred.value);
    switch (col.type) {
        case ColType::Char:
            return std::holds_alternative<std::string>(pred.value);
        case ColType::Integer:
        case ColType::SmallInt:
        case ColType::Float:
        case ColType::Decimal:
            return std::holds_alternative<std::int64_t>(pred.value) ||
                   std::holds_alternative<double>(pred.value);
        case ColType::Date:
            return std::holds_alternative<DateValue>(pred.value) ||
                   std::holds_alternative<std::int64_t>(pred.value);
        case ColType::Logical:
            return std::holds_alternative<bool>(pred.value) &&
                   (pred.op == Op::Eq || pred.op == Op::Ne);
    }
    return false;
}

bool eval_attr(const AttrValue& cell, const AttributePredicate& pred) {
    using Op = AttributePredicate::Op;
    if (pred.op == Op::ContainsText) {
        const auto* s = std::get_if<std::string>(&cell);
        const auto& needle = std::get<std::string>(pred.value);
        return s && s->find(needle) != std::string::npos;
    }
    AttrValue probe = pred.value;
    if (const auto* i = std::get_if<std::int64_t>(&pred.value);
        i && std::holds_alternative<DateValue>(cell))
        probe = DateValue{static_cast<std::int32_t>(*i)};
    const auto cmp = compare_values(cell, probe);
    if (!cmp) return false;
    switch (pred.op) {
        case Op::Eq: return *cmp == 0;
        case Op::Ne: return *cmp != 0;
        case Op::Lt: return *cmp < 0;
        case Op::Le: return *cmp <= 0;
        case Op::Gt: return *cmp > 0;
        case Op::Ge: return *cmp >= 0;
        case Op::ContainsText: return false;
    }
    return false;
}

}  // namespace

std::vector<std::string> select_features(
    const Layer& layer, const std::optional<AttributePredicate>& attr,
    const std::optional<std::pair<SpatialPredicate, Geometry>>& spatial) {
    if (!attr && !spatial)
        throw std::invalid_argument("select needs at least one predicate");

    int column = -1;
    if (attr) {
        column = find_column(layer, attr->column);
        if (!check_op_compat(layer.schema[static_cast<std::size_t>(column)], *attr))
            throw Error(ErrorKind::TypeMismatch,
                        "operator/value not applicable to column '" + attr->column + "' (" +
                            column_type_text(layer.schema[static_cast<std::size_t>(column)]) +
                            ")");
    }

    std::set<std::string> spatial_ids;
    if (spatial) {
        for (const auto& id : layer.index.query(spatial->second.envelope()))
            spatial_ids.insert(id);
    }

    std::vector<std::string> out;
    for (const auto& [id, feature] : layer.features) {
        if (attr && !eval_attr(feature.attrs[static_cast<std::size_t>(column)], *attr))
            continue;
        if (spatial) {
            if (!spatial_ids.count(id)) continue;
            if (!eval_predicate(spatial->first, feature.geometry, spatial->second)) continue;
        }
        out.push_back(id);
    }
    return out;
}

}  // namespace pforge
