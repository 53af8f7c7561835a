#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "error.hpp"

namespace pforge {

enum class ColType : std::uint8_t { Char, Integer, SmallInt, Float, Decimal, Date, Logical };

struct ColumnDef {
    std::string name;
    ColType type = ColType::Char;
    int width = 0;      // Char(n), Decimal(w, p)
    int precision = 0;  // Decimal p

    bool operator==(const ColumnDef&) const = default;
};

struct DateValue {
    std::int32_t ymd = 0;  // yyyymmdd

    bool operator==(const DateValue&) const = default;
};

// Null | Text | Int | Real | Bool | Date
using AttrValue =
    std::variant<std::monostate, std::string, std::int64_t, double, bool, DateValue>;

inline bool is_null(const AttrValue& v) {
    return std::holds_alternative<std::monostate>(v);
}

// "Char (12)", "Decimal (10, 2)", "Integer", ... as written in a MIF
// COLUMNS section
std::string column_type_text(const ColumnDef& col);

// parses the type portion; throws SyntaxError on unknown or invalid specs
ColumnDef parse_column_def(std::string_view name, std::string_view type_text);

bool value_matches(const ColumnDef& col, const AttrValue& v);

// MID cell <-> value. `quoted` distinguishes Text "" from Null. Throws
// TypeError (without positions; callers attach line/column).
AttrValue parse_cell(std::string_view text, bool quoted, const ColumnDef& col);
std::string format_cell(const AttrValue& v, const ColumnDef& col);
bool cell_needs_quotes(const ColumnDef& col);

// shortest decimal text that parses back to exactly the same double
std::string format_double_shortest(double v);

// valid yyyymmdd with sane month/day ranges
bool valid_date(std::int32_t ymd);

const char* col_type_name(ColType t);

using AttrRow = std::vector<AttrValue>;

}  // namespace pforge
