#include "mif.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>

#include "wkt.hpp"

namespace pforge {

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

void check_utf8(std::string_view text, const char* what) {
    std::size_t i = 0;
    int line = 1;
    while (i < text.size()) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (c == '\n') ++line;
        std::size_t extra = 0;
        if (c < 0x80) {
            extra = 0;
        } else if ((c >> 5) == 0x6) {
            extra = 1;
        } else if ((c >> 4) == 0xE) {
            extra = 2;
        } else if ((c >> 3) == 0x1E) {
            extra = 3;
        } else {
            throw Error(ErrorKind::SyntaxError, "invalid UTF-8 byte", what, line);
        }
        for (std::size_t k = 1; k <= extra; ++k) {
            if (i + k >= text.size() ||
                (static_cast<unsigned char>(text[i + k]) >> 6) != 0x2)
                throw Error(ErrorKind::SyntaxError, "invalid UTF-8 sequence", what, line);
        }
        i += extra + 1;
    }
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            std::string line(text.substr(start, i - start));
            if (!line.empty() && line.back() == '\r') line.pop_back();
            lines.push_back(std::move(line));
            start = i + 1;
        }
    }
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

struct Token {
    std::string text;
    int line = 0;
    bool quoted = false;
};

std::vector<Token> tokenize_line(const std::string& line, int line_no) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '"') {
            std::string text;
            ++i;
            bool closed = false;
            while (i < line.size()) {
                if (line[i] == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        text.push_back('"');
                        i += 2;
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                text.push_back(line[i++]);
            }
            if (!closed)
                throw Error(ErrorKind::SyntaxError, "unterminated quote", "mif", line_no);
            out.push_back({std::move(text), line_no, true});
            continue;
        }
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        out.push_back({line.substr(start, i - start), line_no, false});
    }
    return out;
}

class TokenStream {
public:
    TokenStream(const std::vector<std::string>& lines, std::size_t first_line) {
        for (std::size_t i = first_line; i < lines.size(); ++i) {
            auto toks = tokenize_line(lines[i], static_cast<int>(i + 1));
            tokens_.insert(tokens_.end(), toks.begin(), toks.end());
        }
    }

    bool eof() const { return pos_ >= tokens_.size(); }
    int last_line() const {
        return tokens_.empty() ? 1 : tokens_.back().line;
    }
    const Token& peek() const {
        if (eof()) throw Error(ErrorKind::SyntaxError, "unexpected end of file", "mif", last_line());
        return tokens_[pos_];
    }
    Token next() {
        Token t = peek();
        ++pos_;
        return t;
    }
    double number() {
        Token t = next();
        const char* begin = t.text.c_str();
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end != begin + t.text.size() || t.text.empty() || !std::isfinite(v))
            throw Error(ErrorKind::SyntaxError, "expected a number, got '" + t.text + "'",
                        "mif", t.line);
        return v;
    }
    long integer() {
        Token t = next();
        char* end = nullptr;
        const long v = std::strtol(t.text.c_str(), &end, 10);
        if (*end != '\0' || t.text.empty())
            throw Error(ErrorKind::SyntaxError, "expected an integer, got '" + t.text + "'",
                        "mif", t.line);
        return v;
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

// one MID record: cells with their quoting flags
struct MidRow {
    std::vector<std::pair<std::string, bool>> cells;
    int line = 0;
};

std::vector<MidRow> parse_mid_rows(std::string_view text, char delimiter) {
    std::vector<MidRow> rows;
    const auto lines = split_lines(text);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::string& line = lines[li];
        MidRow row;
        row.line = static_cast<int>(li + 1);
        std::string cell;
        bool quoted = false;
        bool in_quotes = false;
        bool cell_was_quoted = false;
        std::size_t i = 0;
        while (i <= line.size()) {
            if (i == line.size()) {
                if (in_quotes)
                    throw Error(ErrorKind::SyntaxError, "unterminated quote", "mid", row.line);
                row.cells.emplace_back(std::move(cell), cell_was_quoted);
                break;
            }
            const char c = line[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        cell.push_back('"');
                        i += 2;
                        continue;
                    }
                    in_quotes = false;
                    ++i;
                    continue;
                }
                cell.push_back(c);
                ++i;
                continue;
            }
            if (c == '"' && cell.empty()) {
                in_quotes = true;
                cell_was_quoted = true;
                ++i;
                continue;
            }
            if (c == delimiter) {
                row.cells.emplace_back(std::move(cell), cell_was_quoted);
                cell.clear();
                cell_was_quoted = false;
                ++i;
                continue;
            }
            cell.push_back(c);
            ++i;
        }
        (void)quoted;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<Coord> read_coords(TokenStream& ts, long n) {
    std::vector<Coord> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const double x = ts.number();
        const double y = ts.number();
        pts.push_back({x, y});
    }
    return pts;
}

void consume_style_clauses(TokenStream& ts) {
    while (!ts.eof()) {
        const std::string kw = upper(ts.peek().text);
        if (kw == "PEN" || kw == "BRUSH" || kw == "SYMBOL") {
            const Token head = ts.next();
            if (ts.eof() || ts.peek().text.front() != '(')
                throw Error(ErrorKind::SyntaxError, kw + " clause needs (...)", "mif",
                            head.line);
            int depth = 0;
            do {
                const Token t = ts.next();
                for (char c : t.text) {
                    if (c == '(') ++depth;
                    if (c == ')') --depth;
                }
            } while (depth > 0 && !ts.eof());
            if (depth != 0)
                throw Error(ErrorKind::SyntaxError, kw + " clause not closed", "mif",
                            head.line);
        } else if (kw == "CENTER") {
            ts.next();
            ts.number();
            ts.number();
        } else {
            break;
        }
    }
}

Geometry parse_region(TokenStream& ts, int line) {
    const long ring_count = ts.integer();
    if (ring_count < 1)
        throw Error(ErrorKind::SyntaxError, "REGION needs at least 1 ring", "mif", line);
    std::vector<Ring> rings;
    rings.reserve(static_cast<std::size_t>(ring_count));
    for (long r = 0; r < ring_count; ++r) {
        const long n = ts.integer();
        if (n < 3)
            throw Error(ErrorKind::SyntaxError, "region ring needs at least 3 points", "mif",
                        line);
        try {
            rings.push_back(Ring::from_coords(read_coords(ts, n)));
        } catch (Error& e) {
            if (e.kind() == ErrorKind::DegenerateRing)
                throw Error(e.kind(), e.detail(), "mif", line);
            throw;
        }
    }
    try {
        return Geometry::region(classify_rings(std::move(rings)));
    } catch (Error& e) {
        if (e.kind() == ErrorKind::CrossingRings)
            throw Error(e.kind(), e.detail(), "mif", line);
        throw;
    }
}

}  // namespace

FeatureTable parse_mif_mid(std::string_view mif_text,
                           std::optional<std::string_view> mid_text) {
    check_utf8(mif_text, "mif");
    if (mid_text) check_utf8(*mid_text, "mid");

    const auto lines = split_lines(mif_text);
    FeatureTable table;
    MifHeader& header = table.header;

    std::size_t li = 0;
    bool saw_version = false;
    bool saw_data = false;
    std::set<std::string> seen_names;
    while (li < lines.size()) {
        const int line_no = static_cast<int>(li + 1);
        auto toks = tokenize_line(lines[li], line_no);
        if (toks.empty()) {
            ++li;
            continue;
        }
        const std::string kw = upper(toks[0].text);
        if (!saw_version && kw != "VERSION")
            throw Error(ErrorKind::SyntaxError, "file must begin with a VERSION clause",
                        "mif", line_no);
        if (kw == "VERSION") {
            if (toks.size() != 2)
                throw Error(ErrorKind::SyntaxError, "VERSION needs one value", "mif", line_no);
            header.version = std::atoi(toks[1].text.c_str());
            if (header.version < 300)
                throw Error(ErrorKind::SyntaxError,
                            "unsupported version " + toks[1].text, "mif", line_no);
            saw_version = true;
        } else if (kw == "CHARSET") {
            if (toks.size() != 2)
                throw Error(ErrorKind::SyntaxError, "CHARSET needs one value", "mif", line_no);
            header.charset = toks[1].text;
        } else if (kw == "DELIMITER") {
            if (toks.size() != 2 || toks[1].text.size() != 1 ||
                !std::isprint(static_cast<unsigned char>(toks[1].text[0])))
                throw Error(ErrorKind::SyntaxError, "DELIMITER needs one printable character",
                            "mif", line_no);
            header.delimiter = toks[1].text[0];
        } else if (kw == "COORDSYS") {
            header.coordsys = trim(lines[li]);
        } else if (kw == "COLUMNS") {
            if (toks.size() != 2)
                throw Error(ErrorKind::SyntaxError, "COLUMNS needs a count", "mif", line_no);
            const int n = std::atoi(toks[1].text.c_str());
            if (n < 0)
                throw Error(ErrorKind::SyntaxError, "negative column count", "mif", line_no);
            for (int c = 0; c < n; ++c) {
                ++li;
                if (li >= lines.size())
                    throw Error(ErrorKind::SyntaxError, "missing column definition", "mif",
                                static_cast<int>(li));
                const int col_line = static_cast<int>(li + 1);
                auto col_toks = tokenize_line(lines[li], col_line);
                if (col_toks.size() < 2)
                    throw Error(ErrorKind::SyntaxError, "column needs a name and a type",
                                "mif", col_line);
                std::string type_text;
                for (std::size_t t = 1; t < col_toks.size(); ++t) type_text += col_toks[t].text;
                try {
                    header.columns.push_back(parse_column_def(col_toks[0].text, type_text));
                } catch (Error& e) {
                    throw Error(e.kind(), e.detail(), "mif", col_line);
                }
                const std::string lowered = upper(col_toks[0].text);
                if (!seen_names.insert(lowered).second)
                    throw Error(ErrorKind::SyntaxError,
                                "duplicate column name '" + col_toks[0].text + "'", "mif",
                                col_line);
            }
        } else if (kw == "DATA") {
            saw_data = true;
            ++li;
            break;
        } else {
            throw Error(ErrorKind::SyntaxError, "unknown header keyword '" + toks[0].text + "'",
                        "mif", line_no);
        }
        ++li;
    }
    if (!saw_version)
        throw Error(ErrorKind::SyntaxError, "file must begin with a VERSION clause", "mif", 1);

    // data section
    std::vector<Geometry> geometries;
    if (saw_data) {
        TokenStream ts(lines, li);
        while (!ts.eof()) {
            const Token head = ts.next();
            const std::string kw = upper(head.text);
            if (kw == "NONE") {
                geometries.push_back(Geometry::none());
            } else if (kw == "POINT") {
                const double x = ts.number();
                const double y = ts.number();
                geometries.push_back(Geometry::point({x, y}));
            } else if (kw == "MULTIPOINT") {
                const long n = ts.integer();
                if (n < 1)
                    throw Error(ErrorKind::SyntaxError, "MULTIPOINT needs at least 1 point",
                                "mif", head.line);
                geometries.push_back(Geometry::multipoint(read_coords(ts, n)));
            } else if (kw == "LINE") {
                const double x1 = ts.number();
                const double y1 = ts.number();
                const double x2 = ts.number();
                const double y2 = ts.number();
                geometries.push_back(Geometry::polyline({{{x1, y1}, {x2, y2}}}));
            } else if (kw == "PLINE") {
                long sections = 1;
                if (!ts.eof() && upper(ts.peek().text) == "MULTIPLE") {
                    ts.next();
                    sections = ts.integer();
                    if (sections < 1)
                        throw Error(ErrorKind::SyntaxError, "PLINE MULTIPLE needs >= 1 sections",
                                    "mif", head.line);
                }
                std::vector<std::vector<Coord>> parts;
                parts.reserve(static_cast<std::size_t>(sections));
                for (long s = 0; s < sections; ++s) {
                    const long n = ts.integer();
                    if (n < 2)
                        throw Error(ErrorKind::SyntaxError,
                                    "polyline section needs at least 2 points", "mif",
                                    head.line);
                    parts.push_back(read_coords(ts, n));
                }
                geometries.push_back(Geometry::polyline(std::move(parts)));
            } else if (kw == "REGION") {
                geometries.push_back(parse_region(ts, head.line));
            } else if (kw == "RECT") {
                const double x1 = ts.number();
                const double y1 = ts.number();
                const double x2 = ts.number();
                const double y2 = ts.number();
                const double min_x = std::min(x1, x2), max_x = std::max(x1, x2);
                const double min_y = std::min(y1, y2), max_y = std::max(y1, y2);
                try {
                    geometries.push_back(Geometry::region({Polygon::normalized(
                        Ring::from_coords(
                            {{min_x, min_y}, {max_x, min_y}, {max_x, max_y}, {min_x, max_y}}),
                        {})}));
                } catch (const Error& e) {
                    throw Error(ErrorKind::SyntaxError, "degenerate RECT: " + e.detail(),
                                "mif", head.line);
                }
            } else {
                throw Error(ErrorKind::SyntaxError, "unknown keyword '" + head.text + "'",
                            "mif", head.line);
            }
            consume_style_clauses(ts);
        }
    }

    // attributes
    const std::size_t ncols = header.columns.size();
    if (ncols > 0 && !mid_text)
        throw Error(ErrorKind::MissingMid,
                    "schema declares " + std::to_string(ncols) + " columns but no MID content");
    std::vector<MidRow> rows;
    if (mid_text && ncols > 0) rows = parse_mid_rows(*mid_text, header.delimiter);
    if (ncols > 0 && rows.size() != geometries.size())
        throw Error(ErrorKind::RowCountMismatch,
                    "MIF has " + std::to_string(geometries.size()) + " features but MID has " +
                        std::to_string(rows.size()) + " rows");

    table.features.reserve(geometries.size());
    for (std::size_t i = 0; i < geometries.size(); ++i) {
        Feature f;
        f.geometry = std::move(geometries[i]);
        if (ncols > 0) {
            const MidRow& row = rows[i];
            if (row.cells.size() != ncols)
                throw Error(ErrorKind::SyntaxError,
                            "expected " + std::to_string(ncols) + " cells, got " +
                                std::to_string(row.cells.size()),
                            "mid", row.line);
            for (std::size_t c = 0; c < ncols; ++c) {
                try {
                    f.attrs.push_back(
                        parse_cell(row.cells[c].first, row.cells[c].second, header.columns[c]));
                } catch (Error& e) {
                    throw Error(ErrorKind::TypeError, e.detail(), "mid", row.line,
                                static_cast<std::int64_t>(c + 1));
                }
            }
        }
        table.features.push_back(std::move(f));
    }
    return table;
}

namespace {

std::string coord_pair(const Coord& c) {
    return format_double_shortest(c.x) + " " + format_double_shortest(c.y);
}

void write_geometry(std::string& out, const Geometry& g) {
    switch (g.kind()) {
        case Geometry::Kind::None:
            out += "NONE\n";
            break;
        case Geometry::Kind::Point:
            out += "POINT " + coord_pair(g.as_point()) + "\n";
            break;
        case Geometry::Kind::MultiPoint: {
            const auto& pts = g.as_multipoint();
            out += "MULTIPOINT " + std::to_string(pts.size()) + "\n";
            for (const auto& c : pts) out += coord_pair(c) + "\n";
            break;
        }
        case Geometry::Kind::PolyLine: {
            const auto& parts = g.as_polyline().parts;
            if (parts.size() == 1 && parts[0].size() == 2) {
                out += "LINE " + coord_pair(parts[0][0]) + " " + coord_pair(parts[0][1]) + "\n";
                break;
            }
            if (parts.size() == 1) {
                out += "PLINE " + std::to_string(parts[0].size()) + "\n";
                for (const auto& c : parts[0]) out += coord_pair(c) + "\n";
            } else {
                out += "PLINE MULTIPLE " + std::to_string(parts.size()) + "\n";
                for (const auto& part : parts) {
                    out += std::to_string(part.size()) + "\n";
                    for (const auto& c : part) out += coord_pair(c) + "\n";
                }
            }
            break;
        }
        case Geometry::Kind::Region: {
            const auto& polys = g.as_region();
            std::size_t rings = 0;
            for (const auto& p : polys) rings += 1 + p.holes.size();
            out += "REGION " + std::to_string(rings) + "\n";
            auto write_ring = [&out](const Ring& r) {
                out += std::to_string(r.size()) + "\n";
                for (std::size_t i = 0; i + 1 < r.coords().size(); ++i)
                    out += coord_pair(r.coords()[i]) + "\n";
            };
            for (const auto& p : polys) {
                write_ring(p.outer);
                for (const auto& h : p.holes) write_ring(h);
            }
            break;
        }
    }
}

}  // namespace

std::pair<std::string, std::string> write_mif_mid(const FeatureTable& table) {
    std::string mif;
    const MifHeader& h = table.header;
    mif += "VERSION " + std::to_string(h.version) + "\n";
    mif += "CHARSET \"" + h.charset + "\"\n";
    mif += std::string("DELIMITER \"") + h.delimiter + "\"\n";
    if (!h.coordsys.empty()) mif += h.coordsys + "\n";
    if (!h.columns.empty()) {
        mif += "COLUMNS " + std::to_string(h.columns.size()) + "\n";
        for (const auto& col : h.columns)
            mif += "  " + col.name + " " + column_type_text(col) + "\n";
    }
    mif += "DATA\n";
    for (const auto& f : table.features) write_geometry(mif, f.geometry);

    std::string mid;
    for (const auto& f : table.features) {
        for (std::size_t c = 0; c < h.columns.size(); ++c) {
            if (c) mid.push_back(h.delimiter);
            const std::string cell = format_cell(f.attrs[c], h.columns[c]);
            if (cell_needs_quotes(h.columns[c]) && !is_null(f.attrs[c])) {
                mid.push_back('"');
                for (char ch : cell) {
                    mid.push_back(ch);
                    if (ch == '"') mid.push_back('"');
                }
                mid.push_back('"');
            } else {
                mid += cell;
            }
        }
        if (!h.columns.empty()) mid.push_back('\n');
    }
    return {std::move(mif), std::move(mid)};
}

// ------------------------------------------------------------- coordsys

namespace {

std::vector<std::string> split_csv_params(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : s) {
        if (c == '"') {
            quoted = !quoted;
            continue;
        }
        if (c == ',' && !quoted) {
            out.push_back(trim(cur));
            cur.clear();
            continue;
        }
        cur.push_back(c);
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

Ellipsoid ellipsoid_for_datum(int datum) {
    switch (datum) {
        case 31: return kClarke1880Ign;  // Merchich
        default: return kWgs84;
    }
}

bool ellipsoid_close(const Ellipsoid& a, const Ellipsoid& b) {
    return std::fabs(a.a - b.a) < 1e-3 && std::fabs(a.inv_f - b.inv_f) < 1e-6;
}

}  // namespace

Crs coordsys_to_projection(std::string_view clause) {
    const std::string text = trim(clause);
    auto toks = tokenize_line(text, 1);
    std::size_t i = 0;
    auto kw = [&](std::size_t idx) {
        return idx < toks.size() ? upper(toks[idx].text) : std::string();
    };
    if (kw(i) == "COORDSYS") ++i;
    if (kw(i) == "NONEARTH") return NonEarth{};
    if (kw(i) != "EARTH" || kw(i + 1) != "PROJECTION")
        throw Error(ErrorKind::UnsupportedCoordSys, "unrecognized clause: " + text);
    // everything after the "Projection" keyword is a comma-separated list
    std::size_t param_start = text.size();
    {
        // locate end of the Projection token in the raw text
        std::string up = upper(text);
        const std::size_t at = up.find("PROJECTION");
        param_start = at + std::string("PROJECTION").size();
    }
    std::string tail = text.substr(param_start);
    // drop an optional trailing Bounds (...) clause
    {
        std::string up = upper(tail);
        const std::size_t b = up.find("BOUNDS");
        if (b != std::string::npos) tail = tail.substr(0, b);
    }
    const auto params = split_csv_params(tail);
    if (params.empty())
        throw Error(ErrorKind::UnsupportedCoordSys, "missing projection number: " + text);
    const int proj = std::atoi(params[0].c_str());
    if (proj == 1) return Geographic{};
    if (proj != 3)
        throw Error(ErrorKind::UnsupportedCoordSys,
                    "projection " + params[0] + " is not supported: " + text);
    if (params.size() != 8)
        throw Error(ErrorKind::UnsupportedCoordSys,
                    "Lambert clause needs 8 parameters, got " +
                        std::to_string(params.size()) + ": " + text);
    LccParams lcc;
    lcc.ellipsoid = ellipsoid_for_datum(std::atoi(params[1].c_str()));
    // params[2] is the unit name
    lcc.lon_0 = std::atof(params[3].c_str());
    lcc.lat_0 = std::atof(params[4].c_str());
    lcc.k_0 = std::atof(params[5].c_str());
    lcc.false_easting = std::atof(params[6].c_str());
    lcc.false_northing = std::atof(params[7].c_str());
    if (lcc.k_0 <= 0 || lcc.lat_0 == 0 || std::fabs(lcc.lat_0) >= 90)
        throw Error(ErrorKind::UnsupportedCoordSys, "invalid Lambert parameters: " + text);
    return lcc;
}

std::string coordsys_from_crs(const Crs& crs) {
    if (std::holds_alternative<Geographic>(crs))
        return "CoordSys Earth Projection 1, 104";
    if (std::holds_alternative<NonEarth>(crs))
        return "CoordSys NonEarth Units \"m\"";
    const auto& p = std::get<LccParams>(crs);
    const int datum = ellipsoid_close(p.ellipsoid, kClarke1880Ign) ? 31 : 104;
    std::string out = "CoordSys Earth Projection 3, " + std::to_string(datum) + ", \"m\"";
    for (double v : {p.lon_0, p.lat_0, p.k_0, p.false_easting, p.false_northing})
        out += ", " + format_double_shortest(v);
    return out;
}

}  // namespace pforge
