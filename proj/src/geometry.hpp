#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"

namespace pforge {

// Coordinate equality and boundary snapping tolerance, in the active CRS unit.
inline constexpr double kCoordEps = 1e-9;

struct Coord {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Coord&) const = default;
};

inline bool coord_near(const Coord& a, const Coord& b, double eps = kCoordEps) {
    return std::fabs(a.x - b.x) <= eps && std::fabs(a.y - b.y) <= eps;
}

bool coord_finite(const Coord& c);

struct Envelope {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    static Envelope of_point(const Coord& c) { return {c.x, c.y, c.x, c.y}; }
    static Envelope empty_at(const Coord& c) { return of_point(c); }

    void expand(const Coord& c) {
        if (c.x < min_x) min_x = c.x;
        if (c.y < min_y) min_y = c.y;
        if (c.x > max_x) max_x = c.x;
        if (c.y > max_y) max_y = c.y;
    }
    void expand(const Envelope& e) {
        if (e.min_x < min_x) min_x = e.min_x;
        if (e.min_y < min_y) min_y = e.min_y;
        if (e.max_x > max_x) max_x = e.max_x;
        if (e.max_y > max_y) max_y = e.max_y;
    }
    // Closed-boundary semantics: touching edges intersect.
    bool intersects(const Envelope& e) const {
        return min_x <= e.max_x && e.min_x <= max_x && min_y <= e.max_y && e.min_y <= max_y;
    }
    bool contains(const Coord& c) const {
        return c.x >= min_x && c.x <= max_x && c.y >= min_y && c.y <= max_y;
    }
    bool contains(const Envelope& e) const {
        return e.min_x >= min_x && e.max_x <= max_x && e.min_y >= min_y && e.max_y <= max_y;
    }
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    double area() const { return width() * height(); }

    bool operator==(const Envelope&) const = default;
};

// Closed vertex loop. Construction auto-closes, collapses consecutive
// duplicate vertices (within kCoordEps) and rejects degenerate loops; the
// stored sequence always has front() == back().
class Ring {
public:
    static Ring from_coords(std::vector<Coord> pts);

    const std::vector<Coord>& coords() const { return coords_; }
    // vertex count excluding the closing duplicate
    std::size_t size() const { return coords_.size() - 1; }

    double signed_area() const;
    bool is_ccw() const { return signed_area() > 0.0; }
    void reverse();
    Ring reversed() const;
    Envelope envelope() const;

private:
    Ring() = default;
    std::vector<Coord> coords_;
};

double ring_area_signed(const Ring& ring);

// Area geometry: CCW outer ring, CW holes, every hole vertex inside or on
// the outer ring. `normalized` fixes orientations and validates.
struct Polygon {
    Ring outer;
    std::vector<Ring> holes;

    static Polygon normalized(Ring outer, std::vector<Ring> holes);

    // net area: outer minus holes
    double area() const;
    Envelope envelope() const;
};

// Boolean-operation currency; empty set = empty region.
using PolygonSet = std::vector<Polygon>;

double region_area(const PolygonSet& region);
Envelope region_envelope(const PolygonSet& region);

struct PolyLine {
    std::vector<std::vector<Coord>> parts;
};

class Geometry {
public:
    enum class Kind { None, Point, MultiPoint, PolyLine, Region };

    Geometry() = default;  // None

    static Geometry none() { return Geometry(); }
    static Geometry point(Coord c);
    static Geometry multipoint(std::vector<Coord> pts);
    static Geometry polyline(std::vector<std::vector<Coord>> parts);
    static Geometry region(PolygonSet polygons);

    Kind kind() const { return kind_; }
    bool is_none() const { return kind_ == Kind::None; }

    const Coord& as_point() const { return std::get<Coord>(payload_); }
    const std::vector<Coord>& as_multipoint() const {
        return std::get<std::vector<Coord>>(payload_);
    }
    const PolyLine& as_polyline() const { return std::get<PolyLine>(payload_); }
    const PolygonSet& as_region() const { return std::get<PolygonSet>(payload_); }

    // throws EmptyGeometry for None
    Envelope envelope() const;

    template <typename Fn>
    void for_each_coord(Fn&& fn) const {
        switch (kind_) {
            case Kind::None:
                break;
            case Kind::Point:
                fn(as_point());
                break;
            case Kind::MultiPoint:
                for (const auto& c : as_multipoint()) fn(c);
                break;
            case Kind::PolyLine:
                for (const auto& part : as_polyline().parts)
                    for (const auto& c : part) fn(c);
                break;
            case Kind::Region:
                for (const auto& poly : as_region()) {
                    for (const auto& c : poly.outer.coords()) fn(c);
                    for (const auto& h : poly.holes)
                        for (const auto& c : h.coords()) fn(c);
                }
                break;
        }
    }

    std::size_t coord_count() const;
    bool approx_equals(const Geometry& other, double eps = kCoordEps) const;

private:
    Kind kind_ = Kind::None;
    std::variant<std::monostate, Coord, std::vector<Coord>, PolyLine, PolygonSet> payload_;
};

const char* geometry_kind_name(Geometry::Kind kind);

enum class PointLocation { Inside, Boundary, Outside };

// Even-odd rule over a set of rings; points within eps of any edge are
// Boundary regardless of parity.
PointLocation point_in_rings(const Coord& p, std::span<const Ring> rings,
                             double eps = kCoordEps);
PointLocation point_in_polygon(const Coord& p, const Polygon& poly,
                               double eps = kCoordEps);
PointLocation point_in_region(const Coord& p, const PolygonSet& region,
                              double eps = kCoordEps);

// Group non-crossing rings into polygons by even-odd containment depth.
// Throws CrossingRings when two ring boundaries properly intersect.
PolygonSet classify_rings(std::vector<Ring> rings);

// --- low-level segment predicates shared with the clipper ---

inline double cross(const Coord& o, const Coord& a, const Coord& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double point_segment_distance_sq(const Coord& p, const Coord& a, const Coord& b);

// true when (a1,a2) and (b1,b2) cross at a single point interior to both
bool segments_cross_properly(const Coord& a1, const Coord& a2, const Coord& b1,
                             const Coord& b2);

// true when the closed segments share at least one point
bool segments_touch(const Coord& a1, const Coord& a2, const Coord& b1, const Coord& b2);

}  // namespace pforge
