#include "store.hpp"

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "crs_json.hpp"
#include "wkt.hpp"

namespace pforge {

using nlohmann::json;

namespace {

// persisted coordinates use 17 significant digits so they reparse to the
// exact same doubles
constexpr int kStoreWktDigits = 17;

bool valid_layer_name(const std::string& name) {
    if (name.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_') return false;
    return std::all_of(name.begin(), name.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

void check_feature(const Layer& layer, const std::string& id, const Geometry& geometry,
                   const AttrRow& attrs) {
    if (id.empty())
        throw Error(ErrorKind::SchemaViolation, "feature id must not be empty");
    if (geometry.is_none())
        throw Error(ErrorKind::SchemaViolation, "feature needs a geometry");
    if (attrs.size() != layer.schema.size())
        throw Error(ErrorKind::SchemaViolation,
                    "expected " + std::to_string(layer.schema.size()) + " attributes, got " +
                        std::to_string(attrs.size()));
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (!value_matches(layer.schema[i], attrs[i]))
            throw Error(ErrorKind::SchemaViolation,
                        "value does not match column '" + layer.schema[i].name + "' (" +
                            column_type_text(layer.schema[i]) + ")");
    }
}

json value_to_json(const AttrValue& v) {
    if (is_null(v)) return nullptr;
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    return std::get<DateValue>(v).ymd;
}

AttrValue value_from_json(const json& j, const ColumnDef& col) {
    if (j.is_null()) return std::monostate{};
    switch (col.type) {
        case ColType::Char:
            if (j.is_string()) return j.get<std::string>();
            break;
        case ColType::Integer:
        case ColType::SmallInt:
            if (j.is_number_integer()) return j.get<std::int64_t>();
            break;
        case ColType::Float:
        case ColType::Decimal:
            if (j.is_number()) return j.get<double>();
            break;
        case ColType::Date:
            if (j.is_number_integer())
                return DateValue{static_cast<std::int32_t>(j.get<std::int64_t>())};
            break;
        case ColType::Logical:
            if (j.is_boolean()) return j.get<bool>();
            break;
    }
    throw Error(ErrorKind::CorruptStore,
                "attribute value does not match column '" + col.name + "'");
}

json schema_to_json(const std::vector<ColumnDef>& schema) {
    json arr = json::array();
    for (const auto& col : schema) {
        json c{{"name", col.name}, {"type", col_type_name(col.type)}};
        if (col.type == ColType::Char) c["width"] = col.width;
        if (col.type == ColType::Decimal) {
            c["width"] = col.width;
            c["precision"] = col.precision;
        }
        arr.push_back(std::move(c));
    }
    return arr;
}

std::vector<ColumnDef> schema_from_json(const json& arr) {
    std::vector<ColumnDef> schema;
    for (const auto& c : arr) {
        ColumnDef col;
        col.name = c.at("name").get<std::string>();
        const std::string t = c.at("type").get<std::string>();
        if (t == "Char") {
            col.type = ColType::Char;
            col.width = c.at("width").get<int>();
        } else if (t == "Integer") {
            col.type = ColType::Integer;
        } else if (t == "SmallInt") {
            col.type = ColType::SmallInt;
        } else if (t == "Float") {
            col.type = ColType::Float;
        } else if (t == "Decimal") {
            col.type = ColType::Decimal;
            col.width = c.at("width").get<int>();
            col.precision = c.at("precision").get<int>();
        } else if (t == "Date") {
            col.type = ColType::Date;
        } else if (t == "Logical") {
            col.type = ColType::Logical;
        } else {
            throw Error(ErrorKind::CorruptStore, "unknown column type '" + t + "'");
        }
        schema.push_back(std::move(col));
    }
    return schema;
}

}  // namespace

std::vector<std::string> layer_bbox_query(const Layer& layer, const Envelope& env) {
    std::vector<std::string> ids = layer.index.query(env);
    std::sort(ids.begin(), ids.end());
    return ids;
}

const Layer& catalog_layer(const Catalog& catalog, const std::string& name) {
    const auto it = catalog.layers.find(name);
    if (it == catalog.layers.end())
        throw Error(ErrorKind::UnknownLayer, "no layer named '" + name + "'");
    return *it->second;
}

std::shared_ptr<const Catalog> Store::snapshot() const {
    std::lock_guard lock(ptr_mutex_);
    return current_;
}

void Store::publish(std::shared_ptr<const Catalog> next) {
    std::lock_guard lock(ptr_mutex_);
    current_ = std::move(next);
}

std::shared_ptr<const Layer> Store::require_layer(const Catalog& catalog,
                                                  const std::string& name) const {
    const auto it = catalog.layers.find(name);
    if (it == catalog.layers.end())
        throw Error(ErrorKind::UnknownLayer, "no layer named '" + name + "'");
    return it->second;
}

void Store::create_layer(const std::string& name, const Crs& crs,
                         std::vector<ColumnDef> schema) {
    std::lock_guard writer(writer_mutex_);
    if (!valid_layer_name(name))
        throw Error(ErrorKind::SchemaViolation, "invalid layer name '" + name + "'");
    std::set<std::string> seen;
    for (const auto& col : schema) {
        std::string folded = col.name;
        std::transform(folded.begin(), folded.end(), folded.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (col.name.empty() || !seen.insert(folded).second)
            throw Error(ErrorKind::SchemaViolation,
                        "column names must be non-empty and unique: '" + col.name + "'");
    }
    auto base = snapshot();
    if (base->layers.count(name))
        throw Error(ErrorKind::SchemaViolation, "layer '" + name + "' already exists");
    auto layer = std::make_shared<Layer>();
    layer->name = name;
    layer->crs = crs;
    layer->schema = std::move(schema);
    auto next = std::make_shared<Catalog>(*base);
    next->layers[name] = std::move(layer);
    next->version = base->version + 1;
    publish(std::move(next));
}

std::optional<LayerFeature> Store::put(const std::string& layer_name, const std::string& id,
                                       Geometry geometry, AttrRow attrs) {
    std::lock_guard writer(writer_mutex_);
    auto base = snapshot();
    auto prev_layer = require_layer(*base, layer_name);
    check_feature(*prev_layer, id, geometry, attrs);

    auto layer = std::make_shared<Layer>(*prev_layer);
    std::optional<LayerFeature> previous;
    const auto it = layer->features.find(id);
    if (it != layer->features.end()) {
        previous = it->second;
        layer->index.remove(it->second.geometry.envelope(), id);
    }
    const Envelope env = geometry.envelope();
    layer->features[id] = LayerFeature{std::move(geometry), std::move(attrs)};
    layer->index.insert(env, id);

    auto next = std::make_shared<Catalog>(*base);
    next->layers[layer_name] = std::move(layer);
    next->version = base->version + 1;
    publish(std::move(next));
    return previous;
}

std::optional<LayerFeature> Store::get(const std::string& layer_name,
                                       const std::string& id) const {
    auto snap = snapshot();
    auto layer = require_layer(*snap, layer_name);
    const auto it = layer->features.find(id);
    if (it == layer->features.end()) return std::nullopt;
    return it->second;
}

bool Store::remove(const std::string& layer_name, const std::string& id) {
    std::lock_guard writer(writer_mutex_);
    auto base = snapshot();
    auto prev_layer = require_layer(*base, layer_name);
    if (!prev_layer->features.count(id)) return false;

    auto layer = std::make_shared<Layer>(*prev_layer);
    const auto it = layer->features.find(id);
    layer->index.remove(it->second.geometry.envelope(), id);
    layer->features.erase(it);

    auto next = std::make_shared<Catalog>(*base);
    next->layers[layer_name] = std::move(layer);
    next->version = base->version + 1;
    publish(std::move(next));
    return true;
}

std::vector<std::string> Store::bbox_query(const std::string& layer_name,
                                           const Envelope& env) const {
    auto snap = snapshot();
    return layer_bbox_query(*require_layer(*snap, layer_name), env);
}

void Store::bulk_fill(const std::string& layer_name,
                      std::vector<std::pair<std::string, LayerFeature>> features) {
    std::lock_guard writer(writer_mutex_);
    auto base = snapshot();
    auto prev_layer = require_layer(*base, layer_name);

    auto layer = std::make_shared<Layer>(*prev_layer);
    layer->features.clear();
    std::vector<std::pair<Envelope, std::string>> entries;
    entries.reserve(features.size());
    for (auto& [id, feature] : features) {
        check_feature(*layer, id, feature.geometry, feature.attrs);
        entries.push_back({feature.geometry.envelope(), id});
        layer->features[id] = std::move(feature);
    }
    if (entries.size() != layer->features.size())
        throw Error(ErrorKind::SchemaViolation, "duplicate feature ids in bulk load");
    layer->index.bulk_load(std::move(entries));

    auto next = std::make_shared<Catalog>(*base);
    next->layers[layer_name] = std::move(layer);
    next->version = base->version + 1;
    publish(std::move(next));
}

// ----------------------------------------------------------- persistence

void Store::save(const std::filesystem::path& dir,
                 const std::vector<std::pair<std::string, std::string>>& extras) const {
    namespace fs = std::filesystem;
    auto snap = snapshot();

    const fs::path tmp = dir.string() + ".tmp-" + std::to_string(::getpid());
    std::error_code ec;
    fs::remove_all(tmp, ec);
    if (!fs::create_directories(tmp))
        throw Error(ErrorKind::Io, "cannot create " + tmp.string());

    try {
        json cat;
        cat["version"] = snap->version;
        json layers = json::array();
        for (const auto& [name, layer] : snap->layers) {
            layers.push_back({{"name", name},
                              {"crs", crs_to_json(layer->crs)},
                              {"schema", schema_to_json(layer->schema)},
                              {"feature_count", layer->features.size()}});
        }
        cat["layers"] = std::move(layers);
        {
            std::ofstream out(tmp / "catalog.json", std::ios::binary);
            if (!out) throw Error(ErrorKind::Io, "cannot write catalog.json");
            out << cat.dump(2) << "\n";
        }
        for (const auto& [name, layer] : snap->layers) {
            std::ofstream out(tmp / (name + ".psl"), std::ios::binary);
            if (!out) throw Error(ErrorKind::Io, "cannot write layer " + name);
            for (const auto& [id, feature] : layer->features) {
                json attrs = json::array();
                for (const auto& v : feature.attrs) attrs.push_back(value_to_json(v));
                out << id << '\t' << to_wkt(feature.geometry, kStoreWktDigits) << '\t'
                    << attrs.dump() << '\n';
            }
            if (!out) throw Error(ErrorKind::Io, "short write on layer " + name);
        }
        for (const auto& [filename, content] : extras) {
            std::ofstream out(tmp / filename, std::ios::binary);
            if (!out) throw Error(ErrorKind::Io, "cannot write " + filename);
            out << content;
        }
    } catch (...) {
        fs::remove_all(tmp, ec);
        throw;
    }

    // swap into place; a reader never observes a half-written directory
    const fs::path old = dir.string() + ".old-" + std::to_string(::getpid());
    fs::remove_all(old, ec);
    if (fs::exists(dir)) fs::rename(dir, old);
    fs::rename(tmp, dir);
    fs::remove_all(old, ec);
}

Store::Store(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    const fs::path cat_path = dir / "catalog.json";
    std::ifstream cat_in(cat_path, std::ios::binary);
    if (!cat_in) throw Error(ErrorKind::Io, "cannot open " + cat_path.string());
    json cat;
    try {
        cat = json::parse(cat_in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::CorruptStore, e.what(), cat_path.string());
    }

    auto catalog = std::make_shared<Catalog>();
    try {
        catalog->version = cat.at("version").get<std::uint64_t>();
        for (const auto& jl : cat.at("layers")) {
            auto layer = std::make_shared<Layer>();
            layer->name = jl.at("name").get<std::string>();
            layer->crs = crs_from_json(jl.at("crs"));
            layer->schema = schema_from_json(jl.at("schema"));
            const auto expected = jl.at("feature_count").get<std::size_t>();

            const fs::path psl = dir / (layer->name + ".psl");
            std::ifstream in(psl, std::ios::binary);
            if (!in) throw Error(ErrorKind::CorruptStore, "missing layer file", psl.string());
            std::string line;
            std::int64_t line_no = 0;
            std::vector<std::pair<Envelope, std::string>> entries;
            while (std::getline(in, line)) {
                ++line_no;
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (line.empty()) continue;
                const auto tab1 = line.find('\t');
                const auto tab2 = tab1 == std::string::npos ? std::string::npos
                                                            : line.find('\t', tab1 + 1);
                if (tab2 == std::string::npos)
                    throw Error(ErrorKind::CorruptStore, "malformed record", psl.string(),
                                line_no);
                const std::string id = line.substr(0, tab1);
                const std::string wkt = line.substr(tab1 + 1, tab2 - tab1 - 1);
                const std::string attrs_text = line.substr(tab2 + 1);
                LayerFeature feature;
                try {
                    feature.geometry = from_wkt(wkt);
                } catch (const Error& e) {
                    throw Error(ErrorKind::CorruptStore, "bad geometry: " + e.detail(),
                                psl.string(), line_no);
                }
                json attrs;
                try {
                    attrs = json::parse(attrs_text);
                } catch (const json::exception& e) {
                    throw Error(ErrorKind::CorruptStore, std::string("bad attributes: ") + e.what(),
                                psl.string(), line_no);
                }
                if (!attrs.is_array() || attrs.size() != layer->schema.size())
                    throw Error(ErrorKind::CorruptStore, "attribute arity mismatch",
                                psl.string(), line_no);
                for (std::size_t i = 0; i < layer->schema.size(); ++i)
                    feature.attrs.push_back(value_from_json(attrs[i], layer->schema[i]));
                if (id.empty() || layer->features.count(id))
                    throw Error(ErrorKind::CorruptStore, "bad feature id '" + id + "'",
                                psl.string(), line_no);
                entries.push_back({feature.geometry.envelope(), id});
                layer->features[id] = std::move(feature);
            }
            if (layer->features.size() != expected)
                throw Error(ErrorKind::CorruptStore,
                            "expected " + std::to_string(expected) + " features, found " +
                                std::to_string(layer->features.size()),
                            psl.string());
            layer->index.bulk_load(std::move(entries));
            catalog->layers[layer->name] = std::move(layer);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::CorruptStore, e.what(), cat_path.string());
    }

    current_ = std::move(catalog);
}

// -------------------------------------------------------------- exports

namespace {

std::string sql_quote_ident(const std::string& name) {
    std::string out = "\"";
    for (char c : name) {
        out.push_back(c);
        if (c == '"') out.push_back('"');
    }
    out += "\"";
    return out;
}

std::string sql_quote_text(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        out.push_back(c);
        if (c == '\'') out.push_back('\'');
    }
    out += "'";
    return out;
}

std::string sql_column_type(const ColumnDef& col) {
    switch (col.type) {
        case ColType::Char: return "VARCHAR(" + std::to_string(col.width) + ")";
        case ColType::Integer: return "INTEGER";
        case ColType::SmallInt: return "SMALLINT";
        case ColType::Float: return "DOUBLE PRECISION";
        case ColType::Decimal:
            return "NUMERIC(" + std::to_string(col.width) + ", " +
                   std::to_string(col.precision) + ")";
        case ColType::Date: return "DATE";
        case ColType::Logical: return "BOOLEAN";
    }
    return "TEXT";
}

std::string iso_date(std::int32_t ymd) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", ymd / 10000, (ymd / 100) % 100,
                  ymd % 100);
    return buf;
}

std::string sql_value(const AttrValue& v, const ColumnDef& col) {
    if (is_null(v)) return "NULL";
    switch (col.type) {
        case ColType::Char:
            return sql_quote_text(std::get<std::string>(v));
        case ColType::Integer:
        case ColType::SmallInt:
            return std::to_string(std::get<std::int64_t>(v));
        case ColType::Float:
        case ColType::Decimal:
            return format_double_shortest(std::get<double>(v));
        case ColType::Date:
            return "DATE '" + iso_date(std::get<DateValue>(v).ymd) + "'";
        case ColType::Logical:
            return std::get<bool>(v) ? "TRUE" : "FALSE";
    }
    return "NULL";
}

}  // namespace

std::string export_sql(const Catalog& catalog, const std::string& layer_name, int srid) {
    const Layer& layer = catalog_layer(catalog, layer_name);
    std::ostringstream out;
    const std::string table = sql_quote_ident(layer.name);
    out << "CREATE TABLE " << table << " (\n";
    out << "  \"fid\" VARCHAR NOT NULL";
    for (const auto& col : layer.schema)
        out << ",\n  " << sql_quote_ident(col.name) << " " << sql_column_type(col);
    out << ",\n  \"geom\" geometry\n);\n";
    for (const auto& [id, feature] : layer.features) {
        out << "INSERT INTO " << table << " VALUES (" << sql_quote_text(id);
        for (std::size_t i = 0; i < layer.schema.size(); ++i)
            out << ", " << sql_value(feature.attrs[i], layer.schema[i]);
        out << ", ST_GeomFromText(" << sql_quote_text(to_wkt(feature.geometry)) << ", "
            << srid << "));\n";
    }
    return out.str();
}

json geometry_to_geojson(const Geometry& geom) {
    auto coord = [](const Coord& c) { return json::array({c.x, c.y}); };
    auto line = [&](const std::vector<Coord>& cs) {
        json arr = json::array();
        for (const auto& c : cs) arr.push_back(coord(c));
        return arr;
    };
    auto polygon = [&](const Polygon& p) {
        json arr = json::array();
        arr.push_back(line(p.outer.coords()));
        for (const auto& h : p.holes) arr.push_back(line(h.coords()));
        return arr;
    };
    json g;
    switch (geom.kind()) {
        case Geometry::Kind::None:
            return nullptr;
        case Geometry::Kind::Point:
            g["type"] = "Point";
            g["coordinates"] = coord(geom.as_point());
            break;
        case Geometry::Kind::MultiPoint: {
            g["type"] = "MultiPoint";
            json arr = json::array();
            for (const auto& c : geom.as_multipoint()) arr.push_back(coord(c));
            g["coordinates"] = std::move(arr);
            break;
        }
        case Geometry::Kind::PolyLine: {
            const auto& parts = geom.as_polyline().parts;
            if (parts.size() == 1) {
                g["type"] = "LineString";
                g["coordinates"] = line(parts[0]);
            } else {
                g["type"] = "MultiLineString";
                json arr = json::array();
                for (const auto& part : parts) arr.push_back(line(part));
                g["coordinates"] = std::move(arr);
            }
            break;
        }
        case Geometry::Kind::Region: {
            const auto& polys = geom.as_region();
            if (polys.size() == 1) {
                g["type"] = "Polygon";
                g["coordinates"] = polygon(polys[0]);
            } else {
                g["type"] = "MultiPolygon";
                json arr = json::array();
                for (const auto& p : polys) arr.push_back(polygon(p));
                g["coordinates"] = std::move(arr);
            }
            break;
        }
    }
    return g;
}

json feature_to_geojson(const std::string& id, const LayerFeature& feature,
                        const std::vector<ColumnDef>& schema) {
    json props = json::object();
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const AttrValue& v = feature.attrs[i];
        if (schema[i].type == ColType::Date && !is_null(v))
            props[schema[i].name] = iso_date(std::get<DateValue>(v).ymd);
        else
            props[schema[i].name] = value_to_json(v);
    }
    return json{{"type", "Feature"},
                {"id", id},
                {"geometry", geometry_to_geojson(feature.geometry)},
                {"properties", std::move(props)}};
}

std::string crs_note_text(const Crs& crs) {
    if (std::holds_alternative<Geographic>(crs))
        return "coordinates are geographic degrees (lon, lat); no reprojection applied";
    if (std::holds_alternative<LccParams>(crs))
        return "coordinates are projected Lambert meters in the stored CRS; no reprojection applied";
    return "coordinates are nonearth units; no reprojection applied";
}

json feature_collection_json(const Layer& layer, const std::vector<std::string>& ids,
                             std::size_t offset, std::size_t limit) {
    json features = json::array();
    for (std::size_t i = offset; i < ids.size() && features.size() < limit; ++i) {
        const auto it = layer.features.find(ids[i]);
        if (it == layer.features.end()) continue;
        features.push_back(feature_to_geojson(ids[i], it->second, layer.schema));
    }
    return json{{"type", "FeatureCollection"},
                {"crs_note", crs_note_text(layer.crs)},
                {"features", std::move(features)}};
}

std::string export_geojson(const Catalog& catalog, const std::string& layer_name) {
    const Layer& layer = catalog_layer(catalog, layer_name);
    if (std::holds_alternative<NonEarth>(layer.crs))
        throw Error(ErrorKind::NonEarthExport,
                    "layer '" + layer_name + "' has a NonEarth CRS");
    const bool reproject = std::holds_alternative<LccParams>(layer.crs);
    json features = json::array();
    for (const auto& [id, feature] : layer.features) {
        if (!reproject) {
            features.push_back(feature_to_geojson(id, feature, layer.schema));
            continue;
        }
        LayerFeature geo = feature;
        geo.geometry = reproject_geometry(feature.geometry, layer.crs, Crs{Geographic{}});
        features.push_back(feature_to_geojson(id, geo, layer.schema));
    }
    json fc{{"type", "FeatureCollection"}, {"features", std::move(features)}};
    return fc.dump();
}

}  // namespace pforge
