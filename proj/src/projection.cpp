#include "projection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "wkt.hpp"

namespace pforge {

namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double d) {
    return d * kPi / 180.0;
}
double rad2deg(double r) {
    return r * 180.0 / kPi;
}

struct LccDerived {
    double e;    // first eccentricity
    double n;    // cone constant, sin(lat_0)
    double af;   // a * k_0 * F
    double r0;   // radius at the origin parallel
    double lam0; // lon_0 in radians
};

double iso_t(double phi, double e) {
    const double es = e * std::sin(phi);
    return std::tan(kPi / 4.0 - phi / 2.0) / std::pow((1.0 - es) / (1.0 + es), e / 2.0);
}

LccDerived derive(const LccParams& p) {
    const double e = std::sqrt(p.ellipsoid.e2());
    const double phi0 = deg2rad(p.lat_0);
    const double n = std::sin(phi0);
    const double t0 = iso_t(phi0, e);
    const double m0 = std::cos(phi0) / std::sqrt(1.0 - p.ellipsoid.e2() * std::sin(phi0) * std::sin(phi0));
    const double big_f = m0 / (n * std::pow(t0, n));
    LccDerived d;
    d.e = e;
    d.n = n;
    d.af = p.ellipsoid.a * p.k_0 * big_f;
    d.r0 = d.af * std::pow(t0, n);
    d.lam0 = deg2rad(p.lon_0);
    return d;
}

}  // namespace

const char* crs_kind_name(const Crs& crs) {
    if (std::holds_alternative<Geographic>(crs)) return "geographic";
    if (std::holds_alternative<LccParams>(crs)) return "lcc";
    return "nonearth";
}

bool crs_equal(const Crs& a, const Crs& b) {
    return a == b;
}

Coord lcc_forward(const GeoCoord& g, const LccParams& p) {
    if (!std::isfinite(g.lat) || !std::isfinite(g.lon))
        throw Error(ErrorKind::OutOfDomain, "non-finite geographic coordinate");
    const LccDerived d = derive(p);
    // the pole opposite the origin's hemisphere is the singular one
    if (g.lat <= -90.0 || g.lat >= 90.0) {
        const bool singular = (d.n > 0.0) ? g.lat <= -90.0 : g.lat >= 90.0;
        if (singular || std::fabs(g.lat) > 90.0)
            throw Error(ErrorKind::OutOfDomain,
                        "latitude " + format_double(g.lat, 12) + " is at or beyond the singular pole");
    }
    const double t = iso_t(deg2rad(g.lat), d.e);
    const double r = d.af * std::pow(t, d.n);
    if (!std::isfinite(r))
        throw Error(ErrorKind::OutOfDomain, "projection radius overflows near the singular pole");
    const double theta = d.n * (deg2rad(g.lon) - d.lam0);
    return {p.false_easting + r * std::sin(theta),
            p.false_northing + d.r0 - r * std::cos(theta)};
}

GeoCoord lcc_inverse(const Coord& c, const LccParams& p) {
    if (!coord_finite(c))
        throw Error(ErrorKind::OutOfDomain, "non-finite projected coordinate");
    const LccDerived d = derive(p);
    const double dx = c.x - p.false_easting;
    const double dy = d.r0 - (c.y - p.false_northing);
    double r = std::hypot(dx, dy);
    if (d.n < 0.0) r = -r;
    const double theta = std::atan2(d.n < 0.0 ? -dx : dx, d.n < 0.0 ? -dy : dy);
    const double lon = rad2deg(theta / d.n + d.lam0);
    if (r == 0.0)
        return {lon, d.n > 0.0 ? 90.0 : -90.0};  // cone apex
    const double t = std::pow(r / d.af, 1.0 / d.n);
    // iterate the isometric latitude inversion, spherical start
    double phi = kPi / 2.0 - 2.0 * std::atan(t);
    constexpr double kTol = 1e-12;
    constexpr int kMaxIter = 25;
    for (int i = 0; i < kMaxIter; ++i) {
        const double es = d.e * std::sin(phi);
        const double next =
            kPi / 2.0 - 2.0 * std::atan(t * std::pow((1.0 - es) / (1.0 + es), d.e / 2.0));
        const double delta = std::fabs(next - phi);
        phi = next;
        if (delta <= kTol) return {lon, rad2deg(phi)};
    }
    throw Error(ErrorKind::NoConvergence,
                "isometric latitude iteration did not converge in 25 steps");
}

double lcc_scale_factor(double lat_deg, const LccParams& p) {
    const LccDerived d = derive(p);
    const double phi = deg2rad(lat_deg);
    const double t = iso_t(phi, d.e);
    const double r = d.af * std::pow(t, d.n);
    const double m =
        std::cos(phi) / std::sqrt(1.0 - p.ellipsoid.e2() * std::sin(phi) * std::sin(phi));
    return r * d.n / (p.ellipsoid.a * m);
}

namespace {

class CoordMapper {
public:
    CoordMapper(const Crs& from, const Crs& to) : from_(from), to_(to) {}

    Coord map(const Coord& c) {
        ++index_;
        try {
            GeoCoord g;
            if (const auto* lcc = std::get_if<LccParams>(&from_)) {
                g = lcc_inverse(c, *lcc);
            } else {
                g = {c.x, c.y};
            }
            if (const auto* lcc = std::get_if<LccParams>(&to_)) {
                return lcc_forward(g, *lcc);
            }
            return {g.lon, g.lat};
        } catch (Error& e) {
            throw Error(e.kind(), e.detail() + " (coordinate " + std::to_string(index_ - 1) + ")");
        }
    }

private:
    const Crs& from_;
    const Crs& to_;
    std::size_t index_ = 0;
};

Ring map_ring(const Ring& ring, CoordMapper& mapper) {
    // map the open portion, then close with the mapped first vertex so the
    // vertex count is preserved exactly
    std::vector<Coord> mapped;
    mapped.reserve(ring.coords().size());
    for (std::size_t i = 0; i + 1 < ring.coords().size(); ++i)
        mapped.push_back(mapper.map(ring.coords()[i]));
    mapped.push_back(mapped.front());
    return Ring::from_coords(std::move(mapped));
}

}  // namespace

Geometry reproject_geometry(const Geometry& geom, const Crs& from, const Crs& to) {
    if (std::holds_alternative<NonEarth>(from) || std::holds_alternative<NonEarth>(to))
        throw Error(ErrorKind::CrsMismatch, "cannot reproject a NonEarth CRS");
    if (crs_equal(from, to)) return geom;
    if (geom.is_none()) return geom;

    CoordMapper mapper(from, to);
    switch (geom.kind()) {
        case Geometry::Kind::Point:
            return Geometry::point(mapper.map(geom.as_point()));
        case Geometry::Kind::MultiPoint: {
            std::vector<Coord> pts;
            pts.reserve(geom.as_multipoint().size());
            for (const auto& c : geom.as_multipoint()) pts.push_back(mapper.map(c));
            return Geometry::multipoint(std::move(pts));
        }
        case Geometry::Kind::PolyLine: {
            std::vector<std::vector<Coord>> parts;
            parts.reserve(geom.as_polyline().parts.size());
            for (const auto& part : geom.as_polyline().parts) {
                std::vector<Coord> mapped;
                mapped.reserve(part.size());
                for (const auto& c : part) mapped.push_back(mapper.map(c));
                parts.push_back(std::move(mapped));
            }
            return Geometry::polyline(std::move(parts));
        }
        case Geometry::Kind::Region: {
            PolygonSet polys;
            polys.reserve(geom.as_region().size());
            for (const auto& poly : geom.as_region()) {
                Ring outer = map_ring(poly.outer, mapper);
                if (!outer.is_ccw()) outer.reverse();
                std::vector<Ring> holes;
                holes.reserve(poly.holes.size());
                for (const auto& h : poly.holes) {
                    Ring hh = map_ring(h, mapper);
                    if (hh.is_ccw()) hh.reverse();
                    holes.push_back(std::move(hh));
                }
                polys.push_back(Polygon{std::move(outer), std::move(holes)});
            }
            return Geometry::region(std::move(polys));
        }
        case Geometry::Kind::None:
            break;
    }
    return geom;
}

AffineFit fit_affine(std::span<const ControlPoint> points) {
    if (points.size() < 3)
        throw Error(ErrorKind::DegenerateConfiguration,
                    "affine fit needs at least 3 control points, got " +
                        std::to_string(points.size()));
    for (const auto& p : points) {
        if (!std::isfinite(p.col) || !std::isfinite(p.row) || !std::isfinite(p.x) ||
            !std::isfinite(p.y))
            throw Error(ErrorKind::DegenerateConfiguration, "non-finite control point");
    }

    // two independent normal-equation systems over the basis (col, row, 1)
    std::array<std::array<double, 3>, 3> nmat{};
    std::array<double, 3> bx{}, by{};
    for (const auto& p : points) {
        const std::array<double, 3> basis{p.col, p.row, 1.0};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) nmat[i][j] += basis[i] * basis[j];
            bx[i] += basis[i] * p.x;
            by[i] += basis[i] * p.y;
        }
    }

    double norm = 0.0;
    for (const auto& row : nmat)
        for (double v : row) norm = std::max(norm, std::fabs(v));

    // Gaussian elimination with partial pivoting on [N | bx | by]
    std::array<std::array<double, 5>, 3> m{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = nmat[i][j];
        m[i][3] = bx[i];
        m[i][4] = by[i];
    }
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
        if (std::fabs(m[pivot][col]) <= 1e-12 * norm)
            throw Error(ErrorKind::DegenerateConfiguration,
                        "control points are collinear in pixel space");
        std::swap(m[col], m[pivot]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double k = m[r][col] / m[col][col];
            for (int j = col; j < 5; ++j) m[r][j] -= k * m[col][j];
        }
    }
    const double sa = m[0][3] / m[0][0], sb = m[1][3] / m[1][1], sc = m[2][3] / m[2][2];
    const double sd = m[0][4] / m[0][0], se = m[1][4] / m[1][1], sf = m[2][4] / m[2][2];

    AffineFit fit;
    fit.transform = {sa, sb, sc, sd, se, sf};
    fit.residuals.reserve(points.size());
    double sq = 0.0;
    for (const auto& p : points) {
        const Coord mapped = apply_affine(fit.transform, p.col, p.row);
        const double dist = std::hypot(p.x - mapped.x, p.y - mapped.y);
        fit.residuals.push_back(dist);
        sq += dist * dist;
    }
    fit.rms = std::sqrt(sq / static_cast<double>(points.size()));
    return fit;
}

Coord apply_affine(const AffineTransform& t, double col, double row) {
    return {t.a * col + t.b * row + t.c, t.d * col + t.e * row + t.f};
}

std::string world_file(const AffineTransform& t) {
    std::string out;
    for (double v : {t.a, t.d, t.b, t.e, t.c, t.f}) {
        out += format_double(v, 17);
        out += '\n';
    }
    return out;
}

}  // namespace pforge
