#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "clip.hpp"
#include "geometry.hpp"

namespace testutil {

using namespace pforge;

inline Ring ring_of(std::initializer_list<Coord> pts) {
    return Ring::from_coords(std::vector<Coord>(pts));
}

inline Ring square_ring(double x0, double y0, double side) {
    return ring_of({{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}});
}

inline Polygon square_polygon(double x0, double y0, double side) {
    return Polygon::normalized(square_ring(x0, y0, side), {});
}

inline PolygonSet square_region(double x0, double y0, double side) {
    return {square_polygon(x0, y0, side)};
}

inline Geometry square_geometry(double x0, double y0, double side) {
    return Geometry::region(square_region(x0, y0, side));
}

// simple star-shaped polygon around a center; always non-self-intersecting
inline Ring star_ring(std::mt19937& rng, Coord center, double r_min, double r_max,
                      int vertices) {
    std::uniform_real_distribution<double> radius(r_min, r_max);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    std::vector<double> angles(vertices);
    const double step = 2.0 * std::numbers::pi / vertices;
    for (int i = 0; i < vertices; ++i)
        angles[i] = i * step + jitter(rng) * step * 0.8;
    std::vector<Coord> pts;
    pts.reserve(vertices);
    for (int i = 0; i < vertices; ++i) {
        const double r = radius(rng);
        pts.push_back({center.x + r * std::cos(angles[i]), center.y + r * std::sin(angles[i])});
    }
    return Ring::from_coords(std::move(pts));
}

inline PolygonSet star_region(std::mt19937& rng, Coord center, double r_min, double r_max,
                              int vertices) {
    return {Polygon::normalized(star_ring(rng, center, r_min, r_max, vertices), {})};
}

// Independent even-odd ray test used as the brute-force oracle. Written
// against raw coordinate loops on purpose; returns true when the point is
// strictly inside by crossing parity.
inline bool oracle_even_odd(const Coord& p, const PolygonSet& region) {
    int crossings = 0;
    auto scan_ring = [&](const std::vector<Coord>& cs) {
        for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
            double x1 = cs[i].x, y1 = cs[i].y;
            double x2 = cs[i + 1].x, y2 = cs[i + 1].y;
            if (y1 == y2) continue;
            if (y1 > y2) {
                std::swap(x1, x2);
                std::swap(y1, y2);
            }
            if (p.y >= y1 && p.y < y2) {
                const double t = (p.y - y1) / (y2 - y1);
                if (x1 + t * (x2 - x1) > p.x) ++crossings;
            }
        }
    };
    for (const auto& poly : region) {
        scan_ring(poly.outer.coords());
        for (const auto& h : poly.holes) scan_ring(h.coords());
    }
    return crossings % 2 == 1;
}

// distance from p to the nearest edge of the region boundary
inline double boundary_distance(const Coord& p, const PolygonSet& region) {
    double best = std::numeric_limits<double>::infinity();
    auto scan_ring = [&](const std::vector<Coord>& cs) {
        for (std::size_t i = 0; i + 1 < cs.size(); ++i)
            best = std::min(best, point_segment_distance_sq(p, cs[i], cs[i + 1]));
    };
    for (const auto& poly : region) {
        scan_ring(poly.outer.coords());
        for (const auto& h : poly.holes) scan_ring(h.coords());
    }
    return std::sqrt(best);
}

}  // namespace testutil
