#include "error.hpp"

namespace pforge {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::EmptyGeometry: return "EmptyGeometry";
        case ErrorKind::CrossingRings: return "CrossingRings";
        case ErrorKind::DegenerateRing: return "DegenerateRing";
        case ErrorKind::WktSyntax: return "WktSyntax";
        case ErrorKind::OutOfDomain: return "OutOfDomain";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
        case ErrorKind::SyntaxError: return "SyntaxError";
        case ErrorKind::RowCountMismatch: return "RowCountMismatch";
        case ErrorKind::TypeError: return "TypeError";
        case ErrorKind::MissingMid: return "MissingMid";
        case ErrorKind::UnsupportedCoordSys: return "UnsupportedCoordSys";
        case ErrorKind::Unparseable: return "Unparseable";
        case ErrorKind::Ambiguous: return "Ambiguous";
        case ErrorKind::MissingConservation: return "MissingConservation";
        case ErrorKind::NonPositiveDistance: return "NonPositiveDistance";
        case ErrorKind::CrsMismatch: return "CrsMismatch";
        case ErrorKind::UnknownColumn: return "UnknownColumn";
        case ErrorKind::TypeMismatch: return "TypeMismatch";
        case ErrorKind::UnknownLayer: return "UnknownLayer";
        case ErrorKind::SchemaViolation: return "SchemaViolation";
        case ErrorKind::Io: return "Io";
        case ErrorKind::CorruptStore: return "CorruptStore";
        case ErrorKind::NonEarthExport: return "NonEarthExport";
        case ErrorKind::CsvSyntax: return "CsvSyntax";
        case ErrorKind::MissingColumn: return "MissingColumn";
        case ErrorKind::BadConfig: return "BadConfig";
        case ErrorKind::PipelineError: return "PipelineError";
    }
    return "Unknown";
}

std::string Error::format(ErrorKind kind, const std::string& message,
                          const std::string& context, std::int64_t line,
                          std::int64_t column) {
    std::string out = error_kind_name(kind);
    if (!context.empty()) {
        out += " [" + context + "]";
    }
    if (line > 0) {
        out += " at line " + std::to_string(line);
        if (column > 0) out += ", column " + std::to_string(column);
    } else if (column > 0) {
        out += " at position " + std::to_string(column);
    }
    out += ": " + message;
    return out;
}

}  // namespace pforge
