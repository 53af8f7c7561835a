#include "wkt.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace pforge {

std::string format_double(double value, int significant_digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, value);
    return buf;
}

namespace {

void append_coord(std::string& out, const Coord& c, int digits) {
    out += format_double(c.x, digits);
    out += ' ';
    out += format_double(c.y, digits);
}

void append_coord_list(std::string& out, const std::vector<Coord>& cs, int digits) {
    out += '(';
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i) out += ", ";
        append_coord(out, cs[i], digits);
    }
    out += ')';
}

void append_polygon_body(std::string& out, const Polygon& poly, int digits) {
    out += '(';
    append_coord_list(out, poly.outer.coords(), digits);
    for (const auto& h : poly.holes) {
        out += ", ";
        append_coord_list(out, h.coords(), digits);
    }
    out += ')';
}

}  // namespace

std::string to_wkt(const Geometry& geom, int digits) {
    std::string out;
    switch (geom.kind()) {
        case Geometry::Kind::None:
            throw Error(ErrorKind::EmptyGeometry, "cannot serialize geometry of kind None");
        case Geometry::Kind::Point:
            out = "POINT (";
            append_coord(out, geom.as_point(), digits);
            out += ')';
            break;
        case Geometry::Kind::MultiPoint: {
            out = "MULTIPOINT (";
            const auto& pts = geom.as_multipoint();
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (i) out += ", ";
                out += '(';
                append_coord(out, pts[i], digits);
                out += ')';
            }
            out += ')';
            break;
        }
        case Geometry::Kind::PolyLine: {
            const auto& parts = geom.as_polyline().parts;
            if (parts.size() == 1) {
                out = "LINESTRING ";
                append_coord_list(out, parts[0], digits);
            } else {
                out = "MULTILINESTRING (";
                for (std::size_t i = 0; i < parts.size(); ++i) {
                    if (i) out += ", ";
                    append_coord_list(out, parts[i], digits);
                }
                out += ')';
            }
            break;
        }
        case Geometry::Kind::Region: {
            const auto& polys = geom.as_region();
            if (polys.size() == 1) {
                out = "POLYGON ";
                append_polygon_body(out, polys[0], digits);
            } else {
                out = "MULTIPOLYGON (";
                for (std::size_t i = 0; i < polys.size(); ++i) {
                    if (i) out += ", ";
                    append_polygon_body(out, polys[i], digits);
                }
                out += ')';
            }
            break;
        }
    }
    return out;
}

namespace {

class WktParser {
public:
    explicit WktParser(std::string_view text) : text_(text) {}

    Geometry parse() {
        skip_ws();
        const std::string kw = keyword();
        Geometry g;
        if (kw == "POINT") {
            expect('(');
            g = Geometry::point(coord());
            expect(')');
        } else if (kw == "MULTIPOINT") {
            g = Geometry::multipoint(multipoint_body());
        } else if (kw == "LINESTRING") {
            auto cs = coord_list();
            if (cs.size() < 2) fail("LINESTRING needs at least 2 coordinates");
            g = Geometry::polyline({std::move(cs)});
        } else if (kw == "MULTILINESTRING") {
            std::vector<std::vector<Coord>> parts;
            expect('(');
            do {
                auto cs = coord_list();
                if (cs.size() < 2) fail("line part needs at least 2 coordinates");
                parts.push_back(std::move(cs));
            } while (accept(','));
            expect(')');
            g = Geometry::polyline(std::move(parts));
        } else if (kw == "POLYGON") {
            g = Geometry::region({polygon_body()});
        } else if (kw == "MULTIPOLYGON") {
            PolygonSet polys;
            expect('(');
            do {
                polys.push_back(polygon_body());
            } while (accept(','));
            expect(')');
            g = Geometry::region(std::move(polys));
        } else {
            fail("unknown geometry type '" + kw + "'");
        }
        skip_ws();
        if (pos_ != text_.size()) fail("trailing characters after geometry");
        return g;
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw Error(ErrorKind::WktSyntax, message, "", 0,
                    static_cast<std::int64_t>(pos_));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    std::string keyword() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ == start) fail("expected geometry keyword");
        std::string kw(text_.substr(start, pos_ - start));
        for (auto& ch : kw) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        return kw;
    }

    double number() {
        skip_ws();
        const char* begin = text_.data() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("expected a number");
        pos_ += static_cast<std::size_t>(end - begin);
        if (!std::isfinite(v)) fail("non-finite coordinate");
        return v;
    }

    Coord coord() { return {number(), number()}; }

    std::vector<Coord> coord_list() {
        expect('(');
        std::vector<Coord> cs;
        do {
            cs.push_back(coord());
        } while (accept(','));
        expect(')');
        return cs;
    }

    std::vector<Coord> multipoint_body() {
        expect('(');
        std::vector<Coord> pts;
        do {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '(') {
                ++pos_;
                pts.push_back(coord());
                expect(')');
            } else {
                pts.push_back(coord());
            }
        } while (accept(','));
        expect(')');
        return pts;
    }

    Ring ring() {
        const std::size_t at = pos_;
        auto cs = coord_list();
        if (cs.size() < 3) {
            pos_ = at;
            fail("ring needs at least 4 coordinates including closure");
        }
        if (!coord_near(cs.front(), cs.back())) {
            pos_ = at;
            fail("unclosed ring");
        }
        if (cs.size() < 4) {
            pos_ = at;
            fail("ring needs at least 4 coordinates including closure");
        }
        try {
            return Ring::from_coords(std::move(cs));
        } catch (const Error& e) {
            pos_ = at;
            fail(e.detail());
        }
    }

    Polygon polygon_body() {
        const std::size_t at = pos_;
        expect('(');
        Ring outer = ring();
        std::vector<Ring> holes;
        while (accept(',')) holes.push_back(ring());
        expect(')');
        try {
            return Polygon::normalized(std::move(outer), std::move(holes));
        } catch (const std::invalid_argument& e) {
            pos_ = at;
            fail(e.what());
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Geometry from_wkt(std::string_view text) {
    return WktParser(text).parse();
}

}  // namespace pforge
