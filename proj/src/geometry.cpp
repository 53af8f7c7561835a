#include "geometry.hpp"

#include <algorithm>
#include <limits>

namespace pforge {

bool coord_finite(const Coord& c) {
    return std::isfinite(c.x) && std::isfinite(c.y);
}

// ---------------------------------------------------------------- Ring

Ring Ring::from_coords(std::vector<Coord> pts) {
    for (const auto& c : pts) {
        if (!coord_finite(c))
            throw Error(ErrorKind::DegenerateRing, "non-finite coordinate in ring");
    }
    // drop an explicit closing vertex, then collapse consecutive duplicates
    if (pts.size() >= 2 && coord_near(pts.front(), pts.back())) pts.pop_back();
    std::vector<Coord> open;
    open.reserve(pts.size());
    for (const auto& c : pts) {
        if (!open.empty() && coord_near(open.back(), c)) continue;
        open.push_back(c);
    }
    while (open.size() >= 2 && coord_near(open.front(), open.back())) open.pop_back();

    if (open.size() < 3)
        throw Error(ErrorKind::DegenerateRing,
                    "ring needs at least 3 distinct vertices, got " +
                        std::to_string(open.size()));

    double area2 = 0.0;
    for (std::size_t i = 0; i < open.size(); ++i) {
        const Coord& a = open[i];
        const Coord& b = open[(i + 1) % open.size()];
        area2 += a.x * b.y - b.x * a.y;
    }
    if (std::fabs(area2 / 2.0) < kCoordEps * kCoordEps)
        throw Error(ErrorKind::DegenerateRing, "ring encloses no area");

    Ring r;
    r.coords_ = std::move(open);
    r.coords_.push_back(r.coords_.front());
    return r;
}

double Ring::signed_area() const {
    // Walk the loop in a direction chosen from the geometry alone, then
    // apply the stored orientation as a sign. Reversing a ring therefore
    // negates the result bit-exactly despite float summation order.
    const std::size_t n = coords_.size() - 1;
    const auto lex_less = [](const Coord& a, const Coord& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    };
    std::size_t m = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (lex_less(coords_[i], coords_[m])) m = i;
    int dir = 0;
    for (std::size_t k = 1; k < n && dir == 0; ++k) {
        const Coord& fwd = coords_[(m + k) % n];
        const Coord& bwd = coords_[(m + n - k) % n];
        if (fwd == bwd) continue;
        dir = lex_less(fwd, bwd) ? 1 : -1;
    }
    if (dir == 0) dir = 1;  // palindromic loop, orientation is moot

    double area2 = 0.0;
    Coord a = coords_[m];
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t j = (dir > 0) ? (m + k) % n : (m + n - (k % n)) % n;
        const Coord& b = coords_[j];
        area2 += a.x * b.y - b.x * a.y;
        a = b;
    }
    return (dir > 0 ? area2 : -area2) / 2.0;
}

void Ring::reverse() {
    std::reverse(coords_.begin(), coords_.end());
}

Ring Ring::reversed() const {
    Ring r = *this;
    r.reverse();
    return r;
}

Envelope Ring::envelope() const {
    Envelope env = Envelope::of_point(coords_.front());
    for (const auto& c : coords_) env.expand(c);
    return env;
}

double ring_area_signed(const Ring& ring) {
    return ring.signed_area();
}

// ---------------------------------------------------------------- Polygon

Polygon Polygon::normalized(Ring outer, std::vector<Ring> holes) {
    if (!outer.is_ccw()) outer.reverse();
    for (auto& h : holes) {
        if (h.is_ccw()) h.reverse();
    }
    const Ring* rings[1] = {&outer};
    (void)rings;
    for (const auto& h : holes) {
        for (std::size_t i = 0; i + 1 < h.coords().size(); ++i) {
            std::span<const Ring> outer_span(&outer, 1);
            if (point_in_rings(h.coords()[i], outer_span) == PointLocation::Outside)
                throw std::invalid_argument("hole vertex outside outer ring");
        }
    }
    return Polygon{std::move(outer), std::move(holes)};
}

double Polygon::area() const {
    double a = outer.signed_area();
    for (const auto& h : holes) a += h.signed_area();  // holes are CW, negative
    return a;
}

Envelope Polygon::envelope() const {
    return outer.envelope();
}

double region_area(const PolygonSet& region) {
    double a = 0.0;
    for (const auto& p : region) a += p.area();
    return a;
}

Envelope region_envelope(const PolygonSet& region) {
    if (region.empty())
        throw Error(ErrorKind::EmptyGeometry, "empty region has no envelope");
    Envelope env = region.front().envelope();
    for (const auto& p : region) env.expand(p.envelope());
    return env;
}

// ---------------------------------------------------------------- Geometry

Geometry Geometry::point(Coord c) {
    if (!coord_finite(c)) throw std::invalid_argument("non-finite point coordinate");
    Geometry g;
    g.kind_ = Kind::Point;
    g.payload_ = c;
    return g;
}

Geometry Geometry::multipoint(std::vector<Coord> pts) {
    if (pts.empty()) throw std::invalid_argument("multipoint needs at least one coordinate");
    for (const auto& c : pts)
        if (!coord_finite(c)) throw std::invalid_argument("non-finite multipoint coordinate");
    Geometry g;
    g.kind_ = Kind::MultiPoint;
    g.payload_ = std::move(pts);
    return g;
}

Geometry Geometry::polyline(std::vector<std::vector<Coord>> parts) {
    if (parts.empty()) throw std::invalid_argument("polyline needs at least one part");
    for (const auto& part : parts) {
        if (part.size() < 2) throw std::invalid_argument("polyline part needs >= 2 coordinates");
        for (const auto& c : part)
            if (!coord_finite(c)) throw std::invalid_argument("non-finite polyline coordinate");
    }
    Geometry g;
    g.kind_ = Kind::PolyLine;
    g.payload_ = PolyLine{std::move(parts)};
    return g;
}

Geometry Geometry::region(PolygonSet polygons) {
    if (polygons.empty()) throw std::invalid_argument("region needs at least one polygon");
    Geometry g;
    g.kind_ = Kind::Region;
    g.payload_ = std::move(polygons);
    return g;
}

Envelope Geometry::envelope() const {
    if (kind_ == Kind::None)
        throw Error(ErrorKind::EmptyGeometry, "geometry of kind None has no envelope");
    bool first = true;
    Envelope env;
    for_each_coord([&](const Coord& c) {
        if (first) {
            env = Envelope::of_point(c);
            first = false;
        } else {
            env.expand(c);
        }
    });
    return env;
}

std::size_t Geometry::coord_count() const {
    std::size_t n = 0;
    for_each_coord([&](const Coord&) { ++n; });
    return n;
}

bool Geometry::approx_equals(const Geometry& other, double eps) const {
    if (kind_ != other.kind_) return false;
    switch (kind_) {
        case Kind::None:
            return true;
        case Kind::Point:
            return coord_near(as_point(), other.as_point(), eps);
        case Kind::MultiPoint: {
            const auto& a = as_multipoint();
            const auto& b = other.as_multipoint();
            if (a.size() != b.size()) return false;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (!coord_near(a[i], b[i], eps)) return false;
            return true;
        }
        case Kind::PolyLine: {
            const auto& a = as_polyline().parts;
            const auto& b = other.as_polyline().parts;
            if (a.size() != b.size()) return false;
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (a[i].size() != b[i].size()) return false;
                for (std::size_t j = 0; j < a[i].size(); ++j)
                    if (!coord_near(a[i][j], b[i][j], eps)) return false;
            }
            return true;
        }
        case Kind::Region: {
            const auto& a = as_region();
            const auto& b = other.as_region();
            if (a.size() != b.size()) return false;
            auto rings_near = [eps](const Ring& x, const Ring& y) {
                if (x.coords().size() != y.coords().size()) return false;
                for (std::size_t i = 0; i < x.coords().size(); ++i)
                    if (!coord_near(x.coords()[i], y.coords()[i], eps)) return false;
                return true;
            };
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (!rings_near(a[i].outer, b[i].outer)) return false;
                if (a[i].holes.size() != b[i].holes.size()) return false;
                for (std::size_t j = 0; j < a[i].holes.size(); ++j)
                    if (!rings_near(a[i].holes[j], b[i].holes[j])) return false;
            }
            return true;
        }
    }
    return false;
}

const char* geometry_kind_name(Geometry::Kind kind) {
    switch (kind) {
        case Geometry::Kind::None: return "None";
        case Geometry::Kind::Point: return "Point";
        case Geometry::Kind::MultiPoint: return "MultiPoint";
        case Geometry::Kind::PolyLine: return "PolyLine";
        case Geometry::Kind::Region: return "Region";
    }
    return "Unknown";
}

// ---------------------------------------------------------------- containment

double point_segment_distance_sq(const Coord& p, const Coord& a, const Coord& b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double wx = p.x - a.x, wy = p.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? (wx * vx + wy * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = p.x - (a.x + t * vx);
    const double dy = p.y - (a.y + t * vy);
    return dx * dx + dy * dy;
}

PointLocation point_in_rings(const Coord& p, std::span<const Ring> rings, double eps) {
    for (const auto& ring : rings) {
        const auto& cs = ring.coords();
        for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
            if (point_segment_distance_sq(p, cs[i], cs[i + 1]) <= eps * eps)
                return PointLocation::Boundary;
        }
    }
    bool inside = false;
    for (const auto& ring : rings) {
        const auto& cs = ring.coords();
        for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
            const Coord& a = cs[i];
            const Coord& b = cs[i + 1];
            if ((a.y > p.y) != (b.y > p.y)) {
                const double x_int = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if (p.x < x_int) inside = !inside;
            }
        }
    }
    return inside ? PointLocation::Inside : PointLocation::Outside;
}

PointLocation point_in_polygon(const Coord& p, const Polygon& poly, double eps) {
    std::vector<Ring> rings;
    rings.reserve(1 + poly.holes.size());
    rings.push_back(poly.outer);
    for (const auto& h : poly.holes) rings.push_back(h);
    return point_in_rings(p, rings, eps);
}

PointLocation point_in_region(const Coord& p, const PolygonSet& region, double eps) {
    // even-odd parity across every ring of every polygon
    bool boundary = false;
    bool inside = false;
    auto scan = [&](const Ring& ring) {
        const auto& cs = ring.coords();
        for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
            if (!boundary && point_segment_distance_sq(p, cs[i], cs[i + 1]) <= eps * eps)
                boundary = true;
            const Coord& a = cs[i];
            const Coord& b = cs[i + 1];
            if ((a.y > p.y) != (b.y > p.y)) {
                const double x_int = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if (p.x < x_int) inside = !inside;
            }
        }
    };
    for (const auto& poly : region) {
        scan(poly.outer);
        for (const auto& h : poly.holes) scan(h);
    }
    if (boundary) return PointLocation::Boundary;
    return inside ? PointLocation::Inside : PointLocation::Outside;
}

// ---------------------------------------------------------------- segments

bool segments_cross_properly(const Coord& a1, const Coord& a2, const Coord& b1,
                             const Coord& b2) {
    const double d1 = cross(b1, b2, a1);
    const double d2 = cross(b1, b2, a2);
    const double d3 = cross(a1, a2, b1);
    const double d4 = cross(a1, a2, b2);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
           ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

static bool on_segment_collinear(const Coord& p, const Coord& a, const Coord& b) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_touch(const Coord& a1, const Coord& a2, const Coord& b1, const Coord& b2) {
    const double d1 = cross(b1, b2, a1);
    const double d2 = cross(b1, b2, a2);
    const double d3 = cross(a1, a2, b1);
    const double d4 = cross(a1, a2, b2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment_collinear(a1, b1, b2)) return true;
    if (d2 == 0 && on_segment_collinear(a2, b1, b2)) return true;
    if (d3 == 0 && on_segment_collinear(b1, a1, a2)) return true;
    if (d4 == 0 && on_segment_collinear(b2, a1, a2)) return true;
    return false;
}

// ---------------------------------------------------------------- classify

namespace {

// containment of one non-crossing ring inside another, decided by a
// boundary point of `inner` that is not on the boundary of `outer`
bool ring_contains_ring(const Ring& outer, const Ring& inner) {
    if (!outer.envelope().contains(inner.envelope())) return false;
    std::span<const Ring> one(&outer, 1);
    const auto& cs = inner.coords();
    for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
        PointLocation loc = point_in_rings(cs[i], one);
        if (loc != PointLocation::Boundary) return loc == PointLocation::Inside;
        const Coord mid{(cs[i].x + cs[i + 1].x) / 2.0, (cs[i].y + cs[i + 1].y) / 2.0};
        loc = point_in_rings(mid, one);
        if (loc != PointLocation::Boundary) return loc == PointLocation::Inside;
    }
    // coincident boundaries; rank by enclosed area
    return std::fabs(inner.signed_area()) < std::fabs(outer.signed_area());
}

bool rings_cross(const Ring& r1, const Ring& r2) {
    if (!r1.envelope().intersects(r2.envelope())) return false;
    const auto& a = r1.coords();
    const auto& b = r2.coords();
    for (std::size_t i = 0; i + 1 < a.size(); ++i)
        for (std::size_t j = 0; j + 1 < b.size(); ++j)
            if (segments_cross_properly(a[i], a[i + 1], b[j], b[j + 1])) return true;
    return false;
}

}  // namespace

PolygonSet classify_rings(std::vector<Ring> rings) {
    if (rings.empty()) return {};
    const std::size_t n = rings.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rings_cross(rings[i], rings[j]))
                throw Error(ErrorKind::CrossingRings,
                            "ring " + std::to_string(i) + " properly intersects ring " +
                                std::to_string(j));

    std::vector<int> depth(n, 0);
    std::vector<std::vector<std::size_t>> containers(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (ring_contains_ring(rings[j], rings[i])) {
                ++depth[i];
                containers[i].push_back(j);
            }
        }
    }

    std::vector<std::size_t> outer_index(n, SIZE_MAX);
    PolygonSet polys;
    std::vector<std::size_t> poly_of_ring(n, SIZE_MAX);
    for (std::size_t i = 0; i < n; ++i) {
        if (depth[i] % 2 != 0) continue;
        Ring outer = rings[i];
        if (!outer.is_ccw()) outer.reverse();
        poly_of_ring[i] = polys.size();
        polys.push_back(Polygon{std::move(outer), {}});
        outer_index[i] = polys.size() - 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (depth[i] % 2 == 0) continue;
        // immediate container: smallest even-depth container one level up
        std::size_t best = SIZE_MAX;
        double best_area = std::numeric_limits<double>::infinity();
        for (std::size_t j : containers[i]) {
            if (depth[j] != depth[i] - 1) continue;
            const double a = std::fabs(rings[j].signed_area());
            if (a < best_area) {
                best_area = a;
                best = j;
            }
        }
        if (best == SIZE_MAX || outer_index[best] == SIZE_MAX)
            throw Error(ErrorKind::CrossingRings,
                        "odd-depth ring " + std::to_string(i) + " has no containing ring");
        Ring hole = rings[i];
        if (hole.is_ccw()) hole.reverse();
        polys[outer_index[best]].holes.push_back(std::move(hole));
    }
    return polys;
}

}  // namespace pforge
