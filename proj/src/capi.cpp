#include "parcelforge.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "error.hpp"
#include "pipeline.hpp"
#include "crs_json.hpp"
#include "geoprocessing.hpp"
#include "service.hpp"
#include "store.hpp"
#include "title.hpp"
#include "wkt.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

pf_status status_of(pforge::ErrorKind kind) {
    using pforge::ErrorKind;
    switch (kind) {
        case ErrorKind::WktSyntax:
        case ErrorKind::SyntaxError:
        case ErrorKind::RowCountMismatch:
        case ErrorKind::TypeError:
        case ErrorKind::MissingMid:
        case ErrorKind::Unparseable:
        case ErrorKind::Ambiguous:
        case ErrorKind::MissingConservation:
        case ErrorKind::CsvSyntax:
        case ErrorKind::MissingColumn:
        case ErrorKind::BadConfig:
            return PF_E_PARSE;
        case ErrorKind::UnknownLayer:
            return PF_E_NOT_FOUND;
        case ErrorKind::Io:
            return PF_E_IO;
        case ErrorKind::UnsupportedCoordSys:
            return PF_E_UNSUPPORTED;
        default:
            return PF_E_DATA;
    }
}

pf_status fail(pf_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

template <typename Fn>
pf_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const pforge::Error& e) {
        return fail(status_of(e.kind()), e.what());
    } catch (const std::exception& e) {
        return fail(PF_E_INTERNAL, e.what());
    } catch (...) {
        return fail(PF_E_INTERNAL, "unknown failure");
    }
}

pf_status out_string(const std::string& value, char** out) {
    *out = dup_string(value);
    if (!*out) return fail(PF_E_INTERNAL, "allocation failed");
    return PF_OK;
}

pf_status run_migration_impl(const char* config_json, const char* base_dir,
                             const char* projections_json, char** report, bool dry_run) {
    if (!config_json || !report)
        return fail(PF_E_ARGUMENT, "config_json and report must not be null");
    return guarded([&]() -> pf_status {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::exception& e) {
            return fail(PF_E_PARSE, std::string("config is not valid JSON: ") + e.what());
        }
        std::map<std::string, pforge::Crs> registry;
        if (projections_json) registry = pforge::load_projection_registry(projections_json);
        const pforge::MigrationConfig config = pforge::parse_migration_config(
            doc, base_dir ? base_dir : ".", projections_json ? &registry : nullptr);
        const pforge::MigrationReport result =
            dry_run ? pforge::validate_migration(config) : pforge::run_migration(config);
        return out_string(result.human_text(), report);
    });
}

}  // namespace

struct pf_store {
    pforge::Store store;
    explicit pf_store(const char* path) : store(path) {}
};

struct pf_server {
    pforge::QueryService service;
    int port = 0;
    explicit pf_server(std::shared_ptr<const pforge::Catalog> snapshot)
        : service(std::move(snapshot)) {}
};

extern "C" {

const char* pf_version(void) {
    return "0.1.0";
}

const char* pf_last_error(void) {
    return g_last_error.c_str();
}

void pf_string_free(char* s) {
    std::free(s);
}

pf_status pf_title_canonical(const char* raw, char** out) {
    if (!raw || !out) return fail(PF_E_ARGUMENT, "raw and out must not be null");
    return guarded([&] {
        const auto [key, fmt] = pforge::parse_title(raw);
        (void)fmt;
        return out_string(pforge::canonical_key(key), out);
    });
}

pf_status pf_title_format(const char* raw, const char* fmt, char** out) {
    if (!raw || !fmt || !out) return fail(PF_E_ARGUMENT, "raw, fmt and out must not be null");
    pforge::TitleFormat format;
    const std::string f = fmt;
    if (f == "f1" || f == "F1")
        format = pforge::TitleFormat::F1;
    else if (f == "f2" || f == "F2")
        format = pforge::TitleFormat::F2;
    else if (f == "f3" || f == "F3")
        format = pforge::TitleFormat::F3;
    else
        return fail(PF_E_ARGUMENT, "fmt must be f1, f2 or f3");
    return guarded([&] {
        const auto [key, detected] = pforge::parse_title(raw);
        (void)detected;
        return out_string(pforge::format_title(key, format), out);
    });
}

pf_status pf_migrate_run(const char* config_json, const char* base_dir,
                         const char* projections_json, char** report) {
    return run_migration_impl(config_json, base_dir, projections_json, report, false);
}

pf_status pf_migrate_validate(const char* config_json, const char* base_dir,
                              const char* projections_json, char** report) {
    return run_migration_impl(config_json, base_dir, projections_json, report, true);
}

pf_status pf_store_open(const char* path, pf_store** out) {
    if (!path || !out) return fail(PF_E_ARGUMENT, "path and out must not be null");
    return guarded([&]() -> pf_status {
        *out = new pf_store(path);
        return PF_OK;
    });
}

void pf_store_close(pf_store* store) {
    delete store;
}

pf_status pf_store_version(const pf_store* store, uint64_t* out) {
    if (!store || !out) return fail(PF_E_ARGUMENT, "store and out must not be null");
    *out = store->store.version();
    return PF_OK;
}

pf_status pf_store_layers_json(const pf_store* store, char** out) {
    if (!store || !out) return fail(PF_E_ARGUMENT, "store and out must not be null");
    return guarded([&] {
        auto snapshot = store->store.snapshot();
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [name, layer] : snapshot->layers)
            arr.push_back({{"name", name},
                           {"crs", pforge::crs_kind_name(layer->crs)},
                           {"feature_count", layer->features.size()}});
        return out_string(arr.dump(), out);
    });
}

pf_status pf_store_bbox_query(const pf_store* store, const char* layer, double min_x,
                              double min_y, double max_x, double max_y, int limit,
                              int offset, char** out) {
    if (!store || !layer || !out)
        return fail(PF_E_ARGUMENT, "store, layer and out must not be null");
    if (min_x > max_x || min_y > max_y)
        return fail(PF_E_ARGUMENT, "envelope must have min <= max per axis");
    return guarded([&] {
        auto snapshot = store->store.snapshot();
        const pforge::Layer& l = pforge::catalog_layer(*snapshot, layer);
        const auto ids = pforge::layer_bbox_query(l, {min_x, min_y, max_x, max_y});
        const std::size_t lim = limit <= 0 ? 1000 : static_cast<std::size_t>(limit);
        const std::size_t off = offset < 0 ? 0 : static_cast<std::size_t>(offset);
        return out_string(pforge::feature_collection_json(l, ids, off, lim).dump(), out);
    });
}

pf_status pf_store_get_by_title(const pf_store* store, const char* layer, const char* title,
                                char** out) {
    if (!store || !layer || !title || !out)
        return fail(PF_E_ARGUMENT, "store, layer, title and out must not be null");
    return guarded([&]() -> pf_status {
        auto snapshot = store->store.snapshot();
        const pforge::Layer& l = pforge::catalog_layer(*snapshot, layer);
        const auto key = pforge::parse_title(title).first;
        const auto id = pforge::find_feature_id_by_title(l, key);
        if (!id) return fail(PF_E_NOT_FOUND, "no parcel with title '" + std::string(title) + "'");
        nlohmann::json feature =
            pforge::feature_to_geojson(*id, l.features.at(*id), l.schema);
        feature["crs_note"] = pforge::crs_note_text(l.crs);
        return out_string(feature.dump(), out);
    });
}

pf_status pf_store_query_wkt(const pf_store* store, const char* layer, const char* predicate,
                             const char* wkt, char** out) {
    if (!store || !layer || !predicate || !wkt || !out)
        return fail(PF_E_ARGUMENT, "store, layer, predicate, wkt and out must not be null");
    const auto pred = pforge::spatial_predicate_from_name(predicate);
    if (!pred) return fail(PF_E_ARGUMENT, "predicate must be intersects, contains or within");
    return guarded([&] {
        auto snapshot = store->store.snapshot();
        const pforge::Layer& l = pforge::catalog_layer(*snapshot, layer);
        const pforge::Geometry probe = pforge::from_wkt(wkt);
        const auto ids =
            pforge::select_features(l, std::nullopt, std::make_pair(*pred, probe));
        return out_string(pforge::feature_collection_json(l, ids, 0, ids.size()).dump(), out);
    });
}

pf_status pf_store_export_sql(const pf_store* store, const char* layer, int srid, char** out) {
    if (!store || !layer || !out)
        return fail(PF_E_ARGUMENT, "store, layer and out must not be null");
    return guarded([&] {
        auto snapshot = store->store.snapshot();
        return out_string(pforge::export_sql(*snapshot, layer, srid), out);
    });
}

pf_status pf_store_export_geojson(const pf_store* store, const char* layer, char** out) {
    if (!store || !layer || !out)
        return fail(PF_E_ARGUMENT, "store, layer and out must not be null");
    return guarded([&] {
        auto snapshot = store->store.snapshot();
        return out_string(pforge::export_geojson(*snapshot, layer), out);
    });
}

pf_status pf_server_start(const char* store_path, const char* host, int port,
                          pf_server** out) {
    if (!store_path || !host || !out)
        return fail(PF_E_ARGUMENT, "store_path, host and out must not be null");
    if (port < 0 || port > 65535) return fail(PF_E_ARGUMENT, "port out of range");
    return guarded([&]() -> pf_status {
        pforge::Store store{std::filesystem::path(store_path)};
        auto server = std::make_unique<pf_server>(store.snapshot());
        server->port = server->service.start(host, port);
        *out = server.release();
        return PF_OK;
    });
}

int pf_server_port(const pf_server* server) {
    return server ? server->port : -1;
}

pf_status pf_server_wait(pf_server* server) {
    if (!server) return fail(PF_E_ARGUMENT, "server must not be null");
    server->service.wait();
    return PF_OK;
}

void pf_server_stop(pf_server* server) {
    if (server) server->service.stop();
}

void pf_server_free(pf_server* server) {
    delete server;
}

}  // extern "C"
