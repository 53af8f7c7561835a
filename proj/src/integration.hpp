#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attr.hpp"
#include "geometry.hpp"
#include "title.hpp"

namespace pforge {

struct GraphicRecord {
    std::string source_id;
    std::int64_t feature_id = 0;
    std::string raw_title;
    Geometry geometry;
};

using NamedAttrs = std::vector<std::pair<std::string, AttrValue>>;

struct AlphaRecord {
    std::string source_id;
    std::int64_t row_id = 0;
    std::string raw_title;
    NamedAttrs attributes;
};

enum class AnomalyKind {
    TitleParseFailure,
    OrphanGeometry,
    OrphanAttributes,
    DuplicateGeometry,
    DuplicateAttributes,
    ConservationConflict,
    AreaMismatch,
};

const char* anomaly_kind_name(AnomalyKind kind);

struct Anomaly {
    AnomalyKind kind = AnomalyKind::TitleParseFailure;
    std::vector<std::string> refs;  // "graphic:<source>:<fid>" / "alpha:<source>:<rid>"
    std::string detail;
    std::vector<std::string> raw_titles;
};

struct MergedParcel {
    TitleKey key;
    Geometry geometry;
    NamedAttrs attributes;
    std::string graphic_source;
    std::int64_t graphic_feature = 0;
    std::string alpha_source;
    std::int64_t alpha_row = 0;
};

enum class DuplicatePolicy { FirstWins, RejectBoth };

struct MergePolicy {
    DuplicatePolicy duplicates = DuplicatePolicy::FirstWins;
    // source ids in priority order; unlisted sources rank after listed ones
    std::vector<std::string> source_priority;
    std::optional<std::string> area_attribute;
    double area_tol_rel = 0.05;
};

struct MergeResult {
    std::vector<MergedParcel> parcels;    // sorted by canonical key
    std::vector<Anomaly> anomalies;       // sorted by (kind, refs)
};

std::string graphic_ref(const GraphicRecord& g);
std::string alpha_ref(const AlphaRecord& a);

// Buckets records by the conservation-blind canonical core, merges
// exactly-one-graphic/exactly-one-alpha buckets, reconciles conservation
// codes (graphic side wins on conflict) and reports everything else as
// anomalies. Never fails: data problems become anomalies.
MergeResult merge_sources(std::span<const GraphicRecord> graphics,
                          std::span<const AlphaRecord> alphas, const MergePolicy& policy);

// RFC-4180-style CSV with a header row; every non-title column is kept as
// an attribute, coerced to Int (32-bit range) or Real when the whole cell
// parses as a number, Null when empty, Text otherwise.
std::vector<AlphaRecord> load_alpha_csv(std::string_view text, const std::string& source_id,
                                        const std::string& title_column);

}  // namespace pforge
