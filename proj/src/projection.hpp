#pragma once

#include <string>
#include <variant>
#include <vector>

#include "geometry.hpp"

namespace pforge {

struct Ellipsoid {
    double a = 6378137.0;             // semi-major axis, meters
    double inv_f = 298.257223563;     // inverse flattening

    double flattening() const { return 1.0 / inv_f; }
    double e2() const {
        const double f = flattening();
        return f * (2.0 - f);
    }
    bool operator==(const Ellipsoid&) const = default;
};

inline constexpr Ellipsoid kWgs84{6378137.0, 298.257223563};
inline constexpr Ellipsoid kClarke1880Ign{6378249.2, 293.4660212936294};

// One-standard-parallel Lambert Conformal Conic parameter set.
struct LccParams {
    Ellipsoid ellipsoid;
    double lat_0 = 0.0;           // degrees, != 0, |lat_0| < 90
    double lon_0 = 0.0;           // degrees
    double k_0 = 1.0;             // scale at origin
    double false_easting = 0.0;   // meters
    double false_northing = 0.0;  // meters

    bool operator==(const LccParams&) const = default;
};

struct GeoCoord {
    double lon = 0.0;  // degrees
    double lat = 0.0;  // degrees

    bool operator==(const GeoCoord&) const = default;
};

struct Geographic {
    bool operator==(const Geographic&) const = default;
};
struct NonEarth {
    bool operator==(const NonEarth&) const = default;
};

using Crs = std::variant<Geographic, LccParams, NonEarth>;

const char* crs_kind_name(const Crs& crs);
bool crs_equal(const Crs& a, const Crs& b);

Coord lcc_forward(const GeoCoord& g, const LccParams& p);
GeoCoord lcc_inverse(const Coord& c, const LccParams& p);

// Local point scale factor of the projection at a latitude (k ~ k_0 near
// the standard parallel); used by tests to cross-check conformal areas.
double lcc_scale_factor(double lat_deg, const LccParams& p);

// Maps every coordinate through geographic as the pivot and re-normalizes
// ring orientations. Vertex, part and hole counts are preserved exactly.
// NonEarth endpoints are rejected with CrsMismatch.
Geometry reproject_geometry(const Geometry& geom, const Crs& from, const Crs& to);

// world = (a*col + b*row + c, d*col + e*row + f)
struct AffineTransform {
    double a = 1.0, b = 0.0, c = 0.0;
    double d = 0.0, e = 1.0, f = 0.0;

    bool invertible() const { return a * e - b * d != 0.0; }
    bool operator==(const AffineTransform&) const = default;
};

struct ControlPoint {
    double col = 0.0, row = 0.0;  // pixel space
    double x = 0.0, y = 0.0;      // world space, meters
};

struct AffineFit {
    AffineTransform transform;
    std::vector<double> residuals;  // per-point distance, meters
    double rms = 0.0;
};

// Least-squares fit over >= 3 non-collinear control points; exact
// interpolation at n = 3. Throws DegenerateConfiguration when the pixel
// points are collinear.
AffineFit fit_affine(std::span<const ControlPoint> points);

Coord apply_affine(const AffineTransform& t, double col, double row);

// Six lines in the order a, d, b, e, c, f — standard world-file layout.
std::string world_file(const AffineTransform& t);

}  // namespace pforge
