#include "integration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>

#include "wkt.hpp"

namespace pforge {

const char* anomaly_kind_name(AnomalyKind kind) {
    switch (kind) {
        case AnomalyKind::TitleParseFailure: return "TitleParseFailure";
        case AnomalyKind::OrphanGeometry: return "OrphanGeometry";
        case AnomalyKind::OrphanAttributes: return "OrphanAttributes";
        case AnomalyKind::DuplicateGeometry: return "DuplicateGeometry";
        case AnomalyKind::DuplicateAttributes: return "DuplicateAttributes";
        case AnomalyKind::ConservationConflict: return "ConservationConflict";
        case AnomalyKind::AreaMismatch: return "AreaMismatch";
    }
    return "?";
}

std::string graphic_ref(const GraphicRecord& g) {
    return "graphic:" + g.source_id + ":" + std::to_string(g.feature_id);
}

std::string alpha_ref(const AlphaRecord& a) {
    return "alpha:" + a.source_id + ":" + std::to_string(a.row_id);
}

namespace {

struct SourceRank {
    const std::vector<std::string>* priority;

    // (listed-index | end, source_id) then record id
    std::pair<std::size_t, std::string> rank(const std::string& source) const {
        const auto it = std::find(priority->begin(), priority->end(), source);
        const std::size_t idx = it == priority->end()
                                    ? std::numeric_limits<std::size_t>::max()
                                    : static_cast<std::size_t>(it - priority->begin());
        return {idx, source};
    }
};

std::optional<double> numeric_value(const AttrValue& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return std::nullopt;
}

struct Bucket {
    std::vector<std::pair<const GraphicRecord*, TitleKey>> graphics;
    std::vector<std::pair<const AlphaRecord*, TitleKey>> alphas;
};

}  // namespace

MergeResult merge_sources(std::span<const GraphicRecord> graphics,
                          std::span<const AlphaRecord> alphas, const MergePolicy& policy) {
    MergeResult result;
    std::map<std::string, Bucket> buckets;

    for (const auto& g : graphics) {
        try {
            auto [key, fmt] = parse_title(g.raw_title);
            (void)fmt;
            buckets[canonical_core(key)].graphics.push_back({&g, std::move(key)});
        } catch (const Error& e) {
            result.anomalies.push_back(
                {AnomalyKind::TitleParseFailure, {graphic_ref(g)}, e.detail(), {g.raw_title}});
        }
    }
    for (const auto& a : alphas) {
        try {
            auto [key, fmt] = parse_title(a.raw_title);
            (void)fmt;
            buckets[canonical_core(key)].alphas.push_back({&a, std::move(key)});
        } catch (const Error& e) {
            result.anomalies.push_back(
                {AnomalyKind::TitleParseFailure, {alpha_ref(a)}, e.detail(), {a.raw_title}});
        }
    }

    const SourceRank ranker{&policy.source_priority};
    auto priority_less = [&](const std::string& src_a, std::int64_t id_a,
                             const std::string& src_b, std::int64_t id_b) {
        const auto ra = ranker.rank(src_a);
        const auto rb = ranker.rank(src_b);
        if (ra != rb) return ra < rb;
        return id_a < id_b;
    };

    for (auto& [core, bucket] : buckets) {
        auto& gs = bucket.graphics;
        auto& as = bucket.alphas;
        std::sort(gs.begin(), gs.end(), [&](const auto& x, const auto& y) {
            return priority_less(x.first->source_id, x.first->feature_id, y.first->source_id,
                                 y.first->feature_id);
        });
        std::sort(as.begin(), as.end(), [&](const auto& x, const auto& y) {
            return priority_less(x.first->source_id, x.first->row_id, y.first->source_id,
                                 y.first->row_id);
        });

        // resolve multi-member sides
        if (gs.size() > 1) {
            Anomaly anomaly;
            anomaly.kind = AnomalyKind::DuplicateGeometry;
            const std::size_t first_loser = policy.duplicates == DuplicatePolicy::FirstWins ? 1 : 0;
            for (std::size_t i = first_loser; i < gs.size(); ++i) {
                anomaly.refs.push_back(graphic_ref(*gs[i].first));
                anomaly.raw_titles.push_back(gs[i].first->raw_title);
            }
            anomaly.detail =
                policy.duplicates == DuplicatePolicy::FirstWins
                    ? "kept " + graphic_ref(*gs[0].first) + ", dropped " +
                          std::to_string(gs.size() - 1) + " duplicate(s) for " + core
                    : "rejected " + std::to_string(gs.size()) + " duplicate graphics for " + core;
            result.anomalies.push_back(std::move(anomaly));
            if (policy.duplicates == DuplicatePolicy::FirstWins)
                gs.resize(1);
            else
                gs.clear();
        }
        if (as.size() > 1) {
            Anomaly anomaly;
            anomaly.kind = AnomalyKind::DuplicateAttributes;
            const std::size_t first_loser = policy.duplicates == DuplicatePolicy::FirstWins ? 1 : 0;
            for (std::size_t i = first_loser; i < as.size(); ++i) {
                anomaly.refs.push_back(alpha_ref(*as[i].first));
                anomaly.raw_titles.push_back(as[i].first->raw_title);
            }
            anomaly.detail =
                policy.duplicates == DuplicatePolicy::FirstWins
                    ? "kept " + alpha_ref(*as[0].first) + ", dropped " +
                          std::to_string(as.size() - 1) + " duplicate(s) for " + core
                    : "rejected " + std::to_string(as.size()) + " duplicate alphas for " + core;
            result.anomalies.push_back(std::move(anomaly));
            if (policy.duplicates == DuplicatePolicy::FirstWins)
                as.resize(1);
            else
                as.clear();
        }

        if (gs.empty() && as.empty()) continue;
        if (as.empty()) {
            for (const auto& [g, key] : gs)
                result.anomalies.push_back({AnomalyKind::OrphanGeometry,
                                            {graphic_ref(*g)},
                                            "no attribute record for " + core,
                                            {g->raw_title}});
            continue;
        }
        if (gs.empty()) {
            for (const auto& [a, key] : as)
                result.anomalies.push_back({AnomalyKind::OrphanAttributes,
                                            {alpha_ref(*a)},
                                            "no geometry for " + core,
                                            {a->raw_title}});
            continue;
        }

        const GraphicRecord& g = *gs[0].first;
        const AlphaRecord& a = *as[0].first;
        const TitleKey& gkey = gs[0].second;
        const TitleKey& akey = as[0].second;

        MergedParcel parcel;
        parcel.geometry = g.geometry;
        parcel.attributes = a.attributes;
        parcel.graphic_source = g.source_id;
        parcel.graphic_feature = g.feature_id;
        parcel.alpha_source = a.source_id;
        parcel.alpha_row = a.row_id;

        switch (same_title(gkey, akey)) {
            case TitleMatch::Same:
                parcel.key = gkey;
                if (!parcel.key.conservation && akey.conservation)
                    parcel.key.conservation = akey.conservation;
                break;
            case TitleMatch::Conflict:
                // graphic side wins; the disagreement is still reported
                parcel.key = gkey;
                result.anomalies.push_back(
                    {AnomalyKind::ConservationConflict,
                     {graphic_ref(g), alpha_ref(a)},
                     "conservation " + *gkey.conservation + " (graphic) vs " +
                         *akey.conservation + " (alpha) for " + core,
                     {g.raw_title, a.raw_title}});
                break;
            case TitleMatch::Different:
                // cannot happen: both keys share the bucket core
                parcel.key = gkey;
                break;
        }

        if (policy.area_attribute && parcel.geometry.kind() == Geometry::Kind::Region) {
            for (const auto& [name, value] : parcel.attributes) {
                if (name != *policy.area_attribute) continue;
                const auto declared = numeric_value(value);
                if (!declared) break;
                const double computed = region_area(parcel.geometry.as_region());
                if (computed > 0.0 &&
                    std::fabs(*declared - computed) > policy.area_tol_rel * computed) {
                    result.anomalies.push_back(
                        {AnomalyKind::AreaMismatch,
                         {graphic_ref(g), alpha_ref(a)},
                         "declared area " + format_double_shortest(*declared) +
                             " vs computed " + format_double_shortest(computed) + " for " + core,
                         {g.raw_title, a.raw_title}});
                }
                break;
            }
        }
        result.parcels.push_back(std::move(parcel));
    }

    std::sort(result.parcels.begin(), result.parcels.end(),
              [](const MergedParcel& x, const MergedParcel& y) {
                  return canonical_key(x.key) < canonical_key(y.key);
              });
    std::sort(result.anomalies.begin(), result.anomalies.end(),
              [](const Anomaly& x, const Anomaly& y) {
                  if (x.kind != y.kind) return x.kind < y.kind;
                  if (x.refs != y.refs) return x.refs < y.refs;
                  return x.detail < y.detail;
              });
    return result;
}

// ------------------------------------------------------------------ csv

namespace {

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool in_quotes = false;
    bool cell_started_quoted = false;
    bool any_content = false;
    std::int64_t line = 1;
    std::int64_t quote_open_line = 0;

    std::size_t i = 0;
    auto end_cell = [&]() {
        row.push_back(std::move(cell));
        cell.clear();
        cell_started_quoted = false;
    };
    auto end_row = [&]() {
        end_cell();
        rows.push_back(std::move(row));
        row.clear();
        any_content = false;
    };
    while (i < text.size()) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell.push_back('"');
                    i += 2;
                    continue;
                }
                in_quotes = false;
                ++i;
                continue;
            }
            if (c == '\n') ++line;
            cell.push_back(c);
            ++i;
            continue;
        }
        switch (c) {
            case '"':
                if (!cell.empty())
                    throw Error(ErrorKind::CsvSyntax, "quote inside an unquoted cell", "csv",
                                line);
                in_quotes = true;
                cell_started_quoted = true;
                quote_open_line = line;
                any_content = true;
                ++i;
                break;
            case ',':
                end_cell();
                any_content = true;
                ++i;
                break;
            case '\r':
                ++i;
                break;
            case '\n':
                end_row();
                ++line;
                ++i;
                break;
            default:
                cell.push_back(c);
                any_content = true;
                ++i;
                break;
        }
    }
    if (in_quotes)
        throw Error(ErrorKind::CsvSyntax, "unterminated quote", "csv", quote_open_line);
    if (any_content || !cell.empty() || !row.empty()) end_row();
    (void)cell_started_quoted;
    return rows;
}

AttrValue coerce_csv_value(const std::string& cell) {
    if (cell.empty()) return std::monostate{};
    std::int64_t i = 0;
    const auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), i);
    if (ec == std::errc() && p == cell.data() + cell.size() && i >= INT32_MIN && i <= INT32_MAX)
        return i;
    char* end = nullptr;
    const double d = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() + cell.size() && std::isfinite(d)) return d;
    return cell;
}

}  // namespace

std::vector<AlphaRecord> load_alpha_csv(std::string_view text, const std::string& source_id,
                                        const std::string& title_column) {
    const auto rows = parse_csv(text);
    if (rows.empty())
        throw Error(ErrorKind::CsvSyntax, "missing header row", source_id, 1);
    const auto& header = rows[0];

    auto fold = [](std::string s) {
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return s;
    };
    std::ptrdiff_t title_idx = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (fold(header[c]) == fold(title_column)) {
            title_idx = static_cast<std::ptrdiff_t>(c);
            break;
        }
    }
    if (title_idx < 0)
        throw Error(ErrorKind::MissingColumn,
                    "csv has no column named '" + title_column + "'", source_id);

    std::vector<AlphaRecord> records;
    records.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size())
            throw Error(ErrorKind::CsvSyntax,
                        "expected " + std::to_string(header.size()) + " cells, got " +
                            std::to_string(row.size()),
                        source_id, static_cast<std::int64_t>(r + 1));
        AlphaRecord record;
        record.source_id = source_id;
        record.row_id = static_cast<std::int64_t>(r);
        record.raw_title = row[static_cast<std::size_t>(title_idx)];
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (static_cast<std::ptrdiff_t>(c) == title_idx) continue;
            record.attributes.emplace_back(header[c], coerce_csv_value(row[c]));
        }
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace pforge
