#include "attr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace pforge {

const char* col_type_name(ColType t) {
    switch (t) {
        case ColType::Char: return "Char";
        case ColType::Integer: return "Integer";
        case ColType::SmallInt: return "SmallInt";
        case ColType::Float: return "Float";
        case ColType::Decimal: return "Decimal";
        case ColType::Date: return "Date";
        case ColType::Logical: return "Logical";
    }
    return "?";
}

std::string column_type_text(const ColumnDef& col) {
    switch (col.type) {
        case ColType::Char:
            return "Char (" + std::to_string(col.width) + ")";
        case ColType::Decimal:
            return "Decimal (" + std::to_string(col.width) + ", " +
                   std::to_string(col.precision) + ")";
        default:
            return col_type_name(col.type);
    }
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool parse_int_strict(std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

ColumnDef parse_column_def(std::string_view name, std::string_view type_text) {
    if (name.empty())
        throw Error(ErrorKind::SyntaxError, "column name must not be empty");
    ColumnDef col;
    col.name = std::string(name);
    std::string t = lower(type_text);
    // strip whitespace
    t.erase(std::remove_if(t.begin(), t.end(),
                           [](unsigned char c) { return std::isspace(c); }),
            t.end());
    auto args_of = [&](std::string_view head) -> std::optional<std::string> {
        if (t.size() <= head.size() || t.compare(0, head.size(), head) != 0) return std::nullopt;
        std::string rest = t.substr(head.size());
        if (rest.size() < 2 || rest.front() != '(' || rest.back() != ')') return std::nullopt;
        return rest.substr(1, rest.size() - 2);
    };
    if (t == "integer") {
        col.type = ColType::Integer;
    } else if (t == "smallint") {
        col.type = ColType::SmallInt;
    } else if (t == "float") {
        col.type = ColType::Float;
    } else if (t == "date") {
        col.type = ColType::Date;
    } else if (t == "logical") {
        col.type = ColType::Logical;
    } else if (auto args = args_of("char")) {
        std::int64_t n = 0;
        if (!parse_int_strict(*args, n) || n < 1)
            throw Error(ErrorKind::SyntaxError, "bad Char width '" + *args + "'");
        col.type = ColType::Char;
        col.width = static_cast<int>(n);
    } else if (auto dargs = args_of("decimal")) {
        const auto comma = dargs->find(',');
        std::int64_t w = 0, p = 0;
        if (comma == std::string::npos || !parse_int_strict(dargs->substr(0, comma), w) ||
            !parse_int_strict(dargs->substr(comma + 1), p) || w < p || p < 0 || w < 1)
            throw Error(ErrorKind::SyntaxError, "bad Decimal spec '" + *dargs + "'");
        col.type = ColType::Decimal;
        col.width = static_cast<int>(w);
        col.precision = static_cast<int>(p);
    } else {
        throw Error(ErrorKind::SyntaxError,
                    "unknown column type '" + std::string(type_text) + "'");
    }
    return col;
}

bool valid_date(std::int32_t ymd) {
    if (ymd < 10000101 || ymd > 99991231) return false;
    const int month = (ymd / 100) % 100;
    const int day = ymd % 100;
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

bool value_matches(const ColumnDef& col, const AttrValue& v) {
    if (is_null(v)) return true;
    switch (col.type) {
        case ColType::Char: {
            const auto* s = std::get_if<std::string>(&v);
            return s && static_cast<int>(s->size()) <= col.width;
        }
        case ColType::Integer: {
            const auto* i = std::get_if<std::int64_t>(&v);
            return i && *i >= INT32_MIN && *i <= INT32_MAX;
        }
        case ColType::SmallInt: {
            const auto* i = std::get_if<std::int64_t>(&v);
            return i && *i >= -32768 && *i <= 32767;
        }
        case ColType::Float:
        case ColType::Decimal:
            return std::holds_alternative<double>(v);
        case ColType::Date: {
            const auto* d = std::get_if<DateValue>(&v);
            return d && valid_date(d->ymd);
        }
        case ColType::Logical:
            return std::holds_alternative<bool>(v);
    }
    return false;
}

std::string format_double_shortest(double v) {
    char buf[40];
    for (int digits = 15; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

AttrValue parse_cell(std::string_view text, bool quoted, const ColumnDef& col) {
    if (text.empty() && !quoted) return std::monostate{};
    switch (col.type) {
        case ColType::Char: {
            std::string s(text);
            if (static_cast<int>(s.size()) > col.width)
                s.resize(static_cast<std::size_t>(col.width));  // legacy exports overflow
            return s;
        }
        case ColType::Integer:
        case ColType::SmallInt: {
            std::int64_t value = 0;
            if (!parse_int_strict(text, value))
                throw Error(ErrorKind::TypeError,
                            "'" + std::string(text) + "' is not an integer");
            const ColumnDef probe = col;
            AttrValue v = value;
            if (!value_matches(probe, v))
                throw Error(ErrorKind::TypeError,
                            "'" + std::string(text) + "' out of range for " +
                                col_type_name(col.type));
            return v;
        }
        case ColType::Float:
        case ColType::Decimal: {
            const std::string s(text);
            char* end = nullptr;
            const double value = std::strtod(s.c_str(), &end);
            if (end != s.c_str() + s.size() || s.empty() || !std::isfinite(value))
                throw Error(ErrorKind::TypeError, "'" + s + "' is not a number");
            return value;
        }
        case ColType::Date: {
            std::int64_t value = 0;
            if (text.size() != 8 || !parse_int_strict(text, value) ||
                !valid_date(static_cast<std::int32_t>(value)))
                throw Error(ErrorKind::TypeError,
                            "'" + std::string(text) + "' is not a YYYYMMDD date");
            return DateValue{static_cast<std::int32_t>(value)};
        }
        case ColType::Logical: {
            const std::string t = lower(text);
            if (t == "t" || t == "true") return true;
            if (t == "f" || t == "false") return false;
            throw Error(ErrorKind::TypeError,
                        "'" + std::string(text) + "' is not a logical value");
        }
    }
    throw Error(ErrorKind::TypeError, "unhandled column type");
}

std::string format_cell(const AttrValue& v, const ColumnDef& col) {
    if (is_null(v)) return "";
    switch (col.type) {
        case ColType::Char:
            return std::get<std::string>(v);
        case ColType::Integer:
        case ColType::SmallInt:
            return std::to_string(std::get<std::int64_t>(v));
        case ColType::Float:
            return format_double_shortest(std::get<double>(v));
        case ColType::Decimal: {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.*f", col.precision, std::get<double>(v));
            return buf;
        }
        case ColType::Date: {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%08d", std::get<DateValue>(v).ymd);
            return buf;
        }
        case ColType::Logical:
            return std::get<bool>(v) ? "T" : "F";
    }
    return "";
}

bool cell_needs_quotes(const ColumnDef& col) {
    return col.type == ColType::Char;
}

}  // namespace pforge
