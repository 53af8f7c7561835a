#include "pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "crs_json.hpp"
#include "mif.hpp"
#include "store.hpp"
#include "wkt.hpp"

namespace pforge {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open file", path.string());
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

std::string resolve(const std::string& p, const fs::path& base) {
    if (p.empty()) return p;
    const fs::path path(p);
    return path.is_absolute() ? path.string() : (base / path).string();
}

[[noreturn]] void bad_config(const std::string& why) {
    throw Error(ErrorKind::BadConfig, why, "config");
}

}  // namespace

MigrationConfig parse_migration_config(const json& doc, const fs::path& base_dir,
                                       const std::map<std::string, Crs>* registry) {
    if (!doc.is_object()) bad_config("config must be a JSON object");
    MigrationConfig config;

    if (!doc.contains("inputs") || !doc["inputs"].is_array() || doc["inputs"].empty())
        bad_config("config needs a non-empty \"inputs\" array");
    std::set<std::string> used_sources;
    auto unique_source = [&](std::string base) {
        std::string candidate = base;
        int n = 1;
        while (!used_sources.insert(candidate).second)
            candidate = base + "#" + std::to_string(++n);
        return candidate;
    };
    for (const auto& ji : doc["inputs"]) {
        GraphicInput in;
        if (!ji.contains("mif_path") || !ji["mif_path"].is_string())
            bad_config("every input needs a \"mif_path\"");
        in.mif_path = resolve(ji["mif_path"], base_dir);
        in.mid_path = resolve(ji.value("mid_path", ""), base_dir);
        if (ji.contains("title_column")) {
            if (ji["title_column"].is_string())
                in.title_column = ji["title_column"].get<std::string>();
            else if (ji["title_column"].is_number_integer())
                in.title_column = ji["title_column"].get<int>();
            else
                bad_config("title_column must be a column name or index");
        }
        in.source_id = unique_source(
            ji.value("source_id", fs::path(in.mif_path).stem().string()));
        config.inputs.push_back(std::move(in));
    }
    if (doc.contains("alpha_inputs")) {
        for (const auto& ja : doc["alpha_inputs"]) {
            AlphaInput in;
            if (!ja.contains("csv_path") || !ja["csv_path"].is_string())
                bad_config("every alpha input needs a \"csv_path\"");
            in.csv_path = resolve(ja["csv_path"], base_dir);
            if (!ja.contains("title_column") || !ja["title_column"].is_string())
                bad_config("every alpha input needs a \"title_column\" name");
            in.title_column = ja["title_column"];
            if (ja.contains("area_column")) in.area_column = ja["area_column"].get<std::string>();
            in.source_id = unique_source(
                ja.value("source_id", fs::path(in.csv_path).stem().string()));
            config.alpha_inputs.push_back(std::move(in));
        }
    }

    if (doc.contains("target_crs")) {
        const auto& jc = doc["target_crs"];
        if (jc.is_object() && jc.contains("named")) {
            if (!registry)
                bad_config("named CRS used but no projection registry is available");
            const std::string name = jc["named"];
            const auto it = registry->find(name);
            if (it == registry->end())
                bad_config("projection registry has no entry '" + name + "'");
            config.target_crs = it->second;
        } else {
            config.target_crs = crs_from_json(jc);
        }
        if (std::holds_alternative<NonEarth>(config.target_crs))
            bad_config("target_crs cannot be nonearth");
    }

    if (doc.contains("policy")) {
        const auto& jp = doc["policy"];
        const std::string dup = jp.value("duplicates", "first_wins");
        if (dup == "first_wins")
            config.policy.duplicates = DuplicatePolicy::FirstWins;
        else if (dup == "reject_both")
            config.policy.duplicates = DuplicatePolicy::RejectBoth;
        else
            bad_config("policy.duplicates must be first_wins or reject_both");
        if (jp.contains("source_priority"))
            config.policy.source_priority =
                jp["source_priority"].get<std::vector<std::string>>();
        if (jp.contains("area_attribute"))
            config.policy.area_attribute = jp["area_attribute"].get<std::string>();
        config.policy.area_tol_rel = jp.value("area_tol_rel", 0.05);
        if (config.policy.area_tol_rel <= 0) bad_config("area_tol_rel must be positive");
    }
    if (config.policy.source_priority.empty()) {
        for (const auto& in : config.inputs) config.policy.source_priority.push_back(in.source_id);
        for (const auto& in : config.alpha_inputs)
            config.policy.source_priority.push_back(in.source_id);
    }

    if (!doc.contains("store_path") || !doc["store_path"].is_string())
        bad_config("config needs a \"store_path\"");
    config.store_path = resolve(doc["store_path"], base_dir);
    config.layer_name = doc.value("layer_name", "parcels");
    config.nature_whitelist = doc.value("nature_whitelist", "");
    return config;
}

// ----------------------------------------------------------------- report

std::string MigrationReport::human_text() const {
    std::ostringstream out;
    out << "migration report" << (dry_run ? " (validation only)" : "") << "\n";
    out << "  features read:     " << features_read << "\n";
    out << "  mid rows read:     " << mid_rows_read << "\n";
    out << "  titles by format:  F1=" << titles_f1 << " F2=" << titles_f2
        << " F3=" << titles_f3 << "\n";
    out << "  reprojected:       " << reprojected << "\n";
    out << "  parcels written:   " << parcels_written << "\n";
    out << "  nature warnings:   " << nature_warnings << "\n";
    out << "  unresolved CRS:    " << crs_unresolved_files << "\n";
    out << "  anomalies:\n";
    for (const auto& [kind, count] : anomalies_by_kind)
        out << "    " << anomaly_kind_name(kind) << ": " << count << "\n";
    out << "  timings:\n";
    for (const auto& t : stage_timings)
        out << "    " << t.name << ": " << format_double(t.seconds, 6) << " s\n";
    out << "    total: " << format_double(duration_seconds, 6) << " s\n";
    return out.str();
}

std::string MigrationReport::json_lines() const {
    std::ostringstream out;
    json summary{{"event", "summary"},
                 {"dry_run", dry_run},
                 {"features_read", features_read},
                 {"mid_rows_read", mid_rows_read},
                 {"titles_by_format",
                  {{"f1", titles_f1}, {"f2", titles_f2}, {"f3", titles_f3}}},
                 {"reprojected", reprojected},
                 {"parcels_written", parcels_written},
                 {"nature_warnings", nature_warnings},
                 {"crs_unresolved_files", crs_unresolved_files}};
    out << summary.dump() << "\n";
    for (const auto& [kind, count] : anomalies_by_kind) {
        out << json{{"event", "anomaly_tally"}, {"kind", anomaly_kind_name(kind)}, {"count", count}}
                   .dump()
            << "\n";
    }
    for (const auto& t : stage_timings)
        out << json{{"event", "timing"}, {"stage", t.name}, {"seconds", t.seconds}}.dump()
            << "\n";
    out << json{{"event", "timing"}, {"stage", "total"}, {"seconds", duration_seconds}}.dump()
        << "\n";
    return out.str();
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        out.push_back(c);
        if (c == '"') out.push_back('"');
    }
    out += "\"";
    return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

}  // namespace

std::string MigrationReport::anomalies_csv() const {
    std::string out = "kind,refs,detail,raw_titles\n";
    for (const auto& a : anomalies) {
        out += csv_field(anomaly_kind_name(a.kind));
        out.push_back(',');
        out += csv_field(join(a.refs, ';'));
        out.push_back(',');
        out += csv_field(a.detail);
        out.push_back(',');
        out += csv_field(join(a.raw_titles, ';'));
        out.push_back('\n');
    }
    return out;
}

// ------------------------------------------------------------------- run

namespace {

struct ParsedInput {
    const GraphicInput* config = nullptr;
    FeatureTable table;
};

int title_column_index(const FeatureTable& table, const GraphicInput& input) {
    if (const int* idx = std::get_if<int>(&input.title_column)) {
        if (*idx < 0 || static_cast<std::size_t>(*idx) >= table.header.columns.size())
            throw Error(ErrorKind::BadConfig,
                        "title column index " + std::to_string(*idx) + " out of range",
                        input.mif_path);
        return *idx;
    }
    const std::string& name = std::get<std::string>(input.title_column);
    auto fold = [](std::string s) {
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return s;
    };
    for (std::size_t i = 0; i < table.header.columns.size(); ++i)
        if (fold(table.header.columns[i].name) == fold(name)) return static_cast<int>(i);
    throw Error(ErrorKind::BadConfig, "mif schema has no column named '" + name + "'",
                input.mif_path);
}

std::string title_cell_text(const AttrValue& v) {
    if (is_null(v)) return "";
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    return "";
}

// layer schema derived from the merged attribute maps; schema columns are
// the title, the attribute columns in first-seen order, then provenance.
// Attribute names colliding with the reserved columns get an "_attr"
// suffix; values are still looked up by their source name.
struct SchemaBuilder {
    std::vector<std::string> order;  // source attribute names
    std::map<std::string, int> state;  // -1 all null, 0 int, 1 real, 2 text
    std::map<std::string, std::size_t> text_width;

    void observe(const NamedAttrs& attrs) {
        for (const auto& [name, value] : attrs) {
            if (!state.count(name)) {
                order.push_back(name);
                state[name] = -1;
            }
            int& s = state[name];
            std::size_t width = 0;
            if (is_null(value)) continue;
            if (std::holds_alternative<std::string>(value)) {
                s = 2;
                width = std::get<std::string>(value).size();
            } else if (std::holds_alternative<double>(value)) {
                if (s < 2) s = std::max(s, 1);
                width = format_double_shortest(std::get<double>(value)).size();
            } else {
                if (s < 2) s = std::max(s, 0);
                width = std::to_string(std::get<std::int64_t>(value)).size();
            }
            text_width[name] = std::max(text_width[name], width);
        }
    }

    std::vector<ColumnDef> build(std::size_t title_width, std::size_t graphic_width,
                                 std::size_t alpha_width) const {
        std::vector<ColumnDef> schema;
        schema.push_back({"title", ColType::Char,
                          static_cast<int>(std::max<std::size_t>(title_width, 1)), 0});
        auto fold = [](std::string s) {
            std::transform(s.begin(), s.end(), s.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            return s;
        };
        for (const auto& name : order) {
            const int s = state.at(name);
            ColumnDef col;
            col.name = name;
            const std::string folded = fold(name);
            if (folded == "title" || folded == "src_graphic" || folded == "src_alpha")
                col.name += "_attr";
            if (s == 2) {
                col.type = ColType::Char;
                col.width = static_cast<int>(std::min<std::size_t>(
                    std::max<std::size_t>(text_width.count(name) ? text_width.at(name) : 1, 1),
                    254));
            } else if (s == 1) {
                col.type = ColType::Float;
            } else if (s == 0) {
                col.type = ColType::Integer;
            } else {
                col.type = ColType::Char;
                col.width = 1;
            }
            schema.push_back(std::move(col));
        }
        schema.push_back({"src_graphic", ColType::Char,
                          static_cast<int>(std::max<std::size_t>(graphic_width, 1)), 0});
        schema.push_back({"src_alpha", ColType::Char,
                          static_cast<int>(std::max<std::size_t>(alpha_width, 1)), 0});
        return schema;
    }
};

AttrValue conform_value(const AttrValue& v, const ColumnDef& col) {
    if (is_null(v)) return v;
    if (col.type == ColType::Char) {
        std::string out;
        if (const auto* s = std::get_if<std::string>(&v))
            out = *s;
        else if (const auto* i = std::get_if<std::int64_t>(&v))
            out = std::to_string(*i);
        else if (const auto* d = std::get_if<double>(&v))
            out = format_double_shortest(*d);
        else
            return v;
        if (static_cast<int>(out.size()) > col.width)
            out.resize(static_cast<std::size_t>(col.width));
        return out;
    }
    if (col.type == ColType::Float) {
        if (const auto* i = std::get_if<std::int64_t>(&v))
            return static_cast<double>(*i);
        return v;
    }
    return v;
}

MigrationReport run_pipeline(const MigrationConfig& config, const StageHook& hook,
                             bool write_store) {
    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();
    MigrationReport report;
    report.dry_run = !write_store;
    for (const AnomalyKind kind :
         {AnomalyKind::TitleParseFailure, AnomalyKind::OrphanGeometry,
          AnomalyKind::OrphanAttributes, AnomalyKind::DuplicateGeometry,
          AnomalyKind::DuplicateAttributes, AnomalyKind::ConservationConflict,
          AnomalyKind::AreaMismatch})
        report.anomalies_by_kind[kind] = 0;

    auto stage = [&](const std::string& name, auto&& fn) {
        const auto t0 = clock::now();
        try {
            fn();
        } catch (Error& e) {
            const std::string ctx =
                e.context().empty() ? ("stage " + name) : ("stage " + name + ", " + e.context());
            throw Error(e.kind(), e.detail(), ctx, e.line(), e.column());
        }
        report.stage_timings.push_back(
            {name, std::chrono::duration<double>(clock::now() - t0).count()});
        if (hook) hook(name);
    };

    // parse
    std::vector<ParsedInput> parsed;
    stage("parse", [&] {
        for (const auto& input : config.inputs) {
            ParsedInput pi;
            pi.config = &input;
            const std::string mif = read_file(input.mif_path);
            std::optional<std::string> mid;
            if (!input.mid_path.empty() && fs::exists(input.mid_path))
                mid = read_file(input.mid_path);
            try {
                pi.table = parse_mif_mid(
                    mif, mid ? std::optional<std::string_view>(*mid) : std::nullopt);
            } catch (Error& e) {
                const std::string file =
                    e.context() == "mid" ? input.mid_path : input.mif_path;
                throw Error(e.kind(), e.detail(), file, e.line(), e.column());
            }
            report.features_read += pi.table.features.size();
            if (!pi.table.header.columns.empty())
                report.mid_rows_read += pi.table.features.size();
            parsed.push_back(std::move(pi));
        }
    });

    // titles
    std::vector<GraphicRecord> graphics;
    std::vector<std::size_t> graphics_per_file;
    std::vector<Anomaly> pipeline_anomalies;
    stage("titles", [&] {
        for (auto& pi : parsed) {
            const int col = title_column_index(pi.table, *pi.config);
            std::int64_t fid = 0;
            std::size_t appended = 0;
            for (auto& feature : pi.table.features) {
                ++fid;
                const std::string raw = title_cell_text(feature.attrs[static_cast<std::size_t>(col)]);
                if (feature.geometry.is_none()) {
                    pipeline_anomalies.push_back(
                        {AnomalyKind::TitleParseFailure,
                         {"graphic:" + pi.config->source_id + ":" + std::to_string(fid)},
                         "feature has no geometry",
                         {raw}});
                    continue;
                }
                GraphicRecord record;
                record.source_id = pi.config->source_id;
                record.feature_id = fid;
                record.raw_title = raw;
                record.geometry = std::move(feature.geometry);
                graphics.push_back(std::move(record));
                ++appended;
            }
            graphics_per_file.push_back(appended);
        }
        for (const auto& g : graphics) {
            try {
                const auto [key, fmt] = parse_title(g.raw_title);
                switch (fmt) {
                    case TitleFormat::F1: ++report.titles_f1; break;
                    case TitleFormat::F2: ++report.titles_f2; break;
                    case TitleFormat::F3: ++report.titles_f3; break;
                }
                if (nature_warning(key, config.nature_whitelist)) ++report.nature_warnings;
            } catch (const Error&) {
                // tallied as TitleParseFailure by the merge stage
            }
        }
    });

    // reproject
    stage("reproject", [&] {
        std::size_t at = 0;
        for (std::size_t f = 0; f < parsed.size(); ++f) {
            const ParsedInput& pi = parsed[f];
            const std::size_t file_features = graphics_per_file[f];
            Crs source = config.target_crs;
            bool known = true;
            if (!pi.table.header.coordsys.empty()) {
                try {
                    source = coordsys_to_projection(pi.table.header.coordsys);
                } catch (const Error&) {
                    known = false;  // flagged for manual CRS assignment
                    ++report.crs_unresolved_files;
                }
            }
            if (known && std::holds_alternative<NonEarth>(source)) {
                known = false;
                ++report.crs_unresolved_files;
            }
            if (!known || crs_equal(source, config.target_crs)) {
                at += file_features;
                continue;
            }
            for (std::size_t i = 0; i < file_features; ++i) {
                GraphicRecord& g = graphics[at + i];
                g.geometry = reproject_geometry(g.geometry, source, config.target_crs);
                ++report.reprojected;
            }
            at += file_features;
        }
    });

    // alpha
    std::vector<AlphaRecord> alphas;
    stage("alpha", [&] {
        for (const auto& input : config.alpha_inputs) {
            const std::string text = read_file(input.csv_path);
            try {
                auto records = load_alpha_csv(text, input.source_id, input.title_column);
                for (auto& r : records) alphas.push_back(std::move(r));
            } catch (Error& e) {
                throw Error(e.kind(), e.detail(), input.csv_path, e.line(), e.column());
            }
        }
    });

    // merge
    MergeResult merged;
    stage("merge", [&] {
        MergePolicy policy = config.policy;
        if (!policy.area_attribute && !config.alpha_inputs.empty() &&
            config.alpha_inputs.front().area_column)
            policy.area_attribute = config.alpha_inputs.front().area_column;
        merged = merge_sources(graphics, alphas, policy);
        merged.anomalies.insert(merged.anomalies.end(), pipeline_anomalies.begin(),
                                pipeline_anomalies.end());
        std::sort(merged.anomalies.begin(), merged.anomalies.end(),
                  [](const Anomaly& x, const Anomaly& y) {
                      if (x.kind != y.kind) return x.kind < y.kind;
                      if (x.refs != y.refs) return x.refs < y.refs;
                      return x.detail < y.detail;
                  });
        for (const auto& a : merged.anomalies) ++report.anomalies_by_kind[a.kind];
        report.parcels_written = merged.parcels.size();
        report.anomalies = merged.anomalies;
    });

    if (write_store) {
        Store store;
        stage("store_load", [&] {
            SchemaBuilder builder;
            std::size_t title_w = 1, graphic_w = 1, alpha_w = 1;
            for (const auto& p : merged.parcels) {
                builder.observe(p.attributes);
                title_w = std::max(title_w, canonical_key(p.key).size());
                graphic_w = std::max(graphic_w,
                                     p.graphic_source.size() +
                                         std::to_string(p.graphic_feature).size() + 1);
                alpha_w = std::max(
                    alpha_w, p.alpha_source.size() + std::to_string(p.alpha_row).size() + 1);
            }
            const std::vector<ColumnDef> schema = builder.build(title_w, graphic_w, alpha_w);
            store.create_layer(config.layer_name, config.target_crs, schema);

            std::vector<std::pair<std::string, LayerFeature>> rows;
            rows.reserve(merged.parcels.size());
            for (const auto& p : merged.parcels) {
                LayerFeature f;
                f.geometry = p.geometry;
                f.attrs.resize(schema.size());
                const std::string key_text = canonical_key(p.key);
                f.attrs[0] = conform_value(key_text, schema[0]);
                std::map<std::string, const AttrValue*> by_name;
                for (const auto& [name, value] : p.attributes) by_name.emplace(name, &value);
                for (std::size_t c = 1; c + 2 < schema.size(); ++c) {
                    const auto it = by_name.find(builder.order[c - 1]);
                    f.attrs[c] = it == by_name.end()
                                     ? AttrValue{std::monostate{}}
                                     : conform_value(*it->second, schema[c]);
                }
                f.attrs[schema.size() - 2] = conform_value(
                    p.graphic_source + ":" + std::to_string(p.graphic_feature),
                    schema[schema.size() - 2]);
                f.attrs[schema.size() - 1] = conform_value(
                    p.alpha_source + ":" + std::to_string(p.alpha_row),
                    schema[schema.size() - 1]);
                rows.push_back({key_text, std::move(f)});
            }
            store.bulk_fill(config.layer_name, std::move(rows));
        });

        stage("save", [&] {
            report.duration_seconds =
                std::chrono::duration<double>(clock::now() - t_start).count();
            store.save(config.store_path, {{"report.txt", report.human_text()},
                                           {"report.jsonl", report.json_lines()},
                                           {"anomalies.csv", report.anomalies_csv()}});
        });
    } else {
        report.duration_seconds = std::chrono::duration<double>(clock::now() - t_start).count();
    }
    report.duration_seconds = std::chrono::duration<double>(clock::now() - t_start).count();
    return report;
}

}  // namespace

MigrationReport run_migration(const MigrationConfig& config, const StageHook& hook) {
    return run_pipeline(config, hook, true);
}

MigrationReport validate_migration(const MigrationConfig& config) {
    return run_pipeline(config, {}, false);
}

}  // namespace pforge
