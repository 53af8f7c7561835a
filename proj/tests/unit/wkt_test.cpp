#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "wkt.hpp"

using namespace pforge;
using namespace testutil;

TEST_SUITE_BEGIN("wkt");

TEST_CASE("point serialization") {
    CHECK(to_wkt(Geometry::point({1, 2})) == "POINT (1 2)");
    CHECK(to_wkt(Geometry::point({1.5, -2.25})) == "POINT (1.5 -2.25)");
    const Geometry g = from_wkt("POINT (1 2)");
    REQUIRE(g.kind() == Geometry::Kind::Point);
    CHECK(g.as_point() == Coord{1, 2});
}

TEST_CASE("polygon with hole round-trips as a fixpoint") {
    const Geometry g = Geometry::region({Polygon::normalized(
        square_ring(0, 0, 1), {square_ring(0.25, 0.25, 0.5)})});
    const std::string wkt = to_wkt(g);
    CHECK(wkt.substr(0, 32) == "POLYGON ((0 0, 1 0, 1 1, 0 1, 0 ");
    const Geometry back = from_wkt(wkt);
    CHECK(back.approx_equals(g));
    CHECK(to_wkt(back) == wkt);
}

TEST_CASE("unclosed ring is a syntax error") {
    try {
        from_wkt("POLYGON((0 0,1 0,1 1))");
        FAIL("expected WktSyntax");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::WktSyntax);
        CHECK(e.detail().find("unclosed") != std::string::npos);
        CHECK(e.position() > 0);
    }
}

TEST_CASE("multipoint accepts both spellings") {
    const Geometry a = from_wkt("MULTIPOINT ((1 2), (3 4))");
    const Geometry b = from_wkt("MULTIPOINT (1 2, 3 4)");
    CHECK(a.approx_equals(b));
    CHECK(to_wkt(a) == "MULTIPOINT ((1 2), (3 4))");
}

TEST_CASE("keywords are case-insensitive") {
    CHECK(from_wkt("point(7 8)").kind() == Geometry::Kind::Point);
    CHECK(from_wkt("LineString (0 0, 1 1)").kind() == Geometry::Kind::PolyLine);
}

TEST_CASE("malformed input reports position") {
    CHECK_THROWS_AS(from_wkt("TRIANGLE (0 0)"), Error);
    CHECK_THROWS_AS(from_wkt("POINT (1 2) junk"), Error);
    CHECK_THROWS_AS(from_wkt("POINT (1)"), Error);
    CHECK_THROWS_AS(from_wkt("POINT EMPTY"), Error);
    CHECK_THROWS_AS(from_wkt("LINESTRING (0 0)"), Error);
    CHECK_THROWS_AS(from_wkt(""), Error);
}

TEST_CASE("serializing None is an error") {
    CHECK_THROWS_AS(to_wkt(Geometry::none()), Error);
}

namespace {

Geometry random_geometry(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1000.0, 1000.0);
    std::uniform_int_distribution<int> kind(0, 3);
    switch (kind(rng)) {
        case 0:
            return Geometry::point({u(rng), u(rng)});
        case 1: {
            std::vector<Coord> pts(1 + rng() % 6);
            for (auto& c : pts) c = {u(rng), u(rng)};
            return Geometry::multipoint(std::move(pts));
        }
        case 2: {
            std::vector<std::vector<Coord>> parts(1 + rng() % 3);
            for (auto& part : parts) {
                part.resize(2 + rng() % 5);
                for (auto& c : part) c = {u(rng), u(rng)};
            }
            return Geometry::polyline(std::move(parts));
        }
        default: {
            PolygonSet polys;
            const int n = 1 + static_cast<int>(rng() % 2);
            for (int i = 0; i < n; ++i) {
                const Coord center{u(rng) / 2, u(rng) / 2};
                Polygon p =
                    Polygon::normalized(star_ring(rng, center, 15.0, 60.0, 8 + rng() % 8), {});
                if (rng() % 2) {
                    p = Polygon::normalized(p.outer,
                                            {star_ring(rng, center, 0.5, 4.0, 4 + rng() % 5)});
                }
                polys.push_back(std::move(p));
            }
            return Geometry::region(std::move(polys));
        }
    }
}

}  // namespace

TEST_CASE("round trip identity over randomized geometries") {
    std::mt19937 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const Geometry g = random_geometry(rng);
        const Geometry back = from_wkt(to_wkt(g));
        CHECK(back.approx_equals(g, kCoordEps));
    }
}

TEST_SUITE_END();
