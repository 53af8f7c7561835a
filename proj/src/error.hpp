#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pforge {

enum class ErrorKind {
    // geometry
    EmptyGeometry,
    CrossingRings,
    DegenerateRing,
    WktSyntax,
    // projection
    OutOfDomain,
    NoConvergence,
    DegenerateConfiguration,
    // mif/mid
    SyntaxError,
    RowCountMismatch,
    TypeError,
    MissingMid,
    UnsupportedCoordSys,
    // titles
    Unparseable,
    Ambiguous,
    MissingConservation,
    // geoprocessing
    NonPositiveDistance,
    CrsMismatch,
    UnknownColumn,
    TypeMismatch,
    // store
    UnknownLayer,
    SchemaViolation,
    Io,
    CorruptStore,
    NonEarthExport,
    // integration
    CsvSyntax,
    MissingColumn,
    // pipeline / config
    BadConfig,
    PipelineError,
};

const char* error_kind_name(ErrorKind kind);

// Structured error carried by every failing operation. `line`/`column` are
// 1-based where they apply, 0 otherwise; `position` is a 0-based text offset
// (WKT). `context` names the file or stage when one is known.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(format(kind, message, "", 0, 0)),
          kind_(kind), detail_(std::move(message)) {}

    Error(ErrorKind kind, std::string message, std::string context,
          std::int64_t line = 0, std::int64_t column = 0)
        : std::runtime_error(format(kind, message, context, line, column)),
          kind_(kind), detail_(std::move(message)), context_(std::move(context)),
          line_(line), column_(column) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }
    const std::string& context() const noexcept { return context_; }
    std::int64_t line() const noexcept { return line_; }
    std::int64_t column() const noexcept { return column_; }
    std::int64_t position() const noexcept { return column_; }

    Error& with_context(std::string context) {
        context_ = std::move(context);
        return *this;
    }

private:
    static std::string format(ErrorKind kind, const std::string& message,
                              const std::string& context, std::int64_t line,
                              std::int64_t column);

    ErrorKind kind_;
    std::string detail_;
    std::string context_;
    std::int64_t line_ = 0;
    std::int64_t column_ = 0;
};

}  // namespace pforge
