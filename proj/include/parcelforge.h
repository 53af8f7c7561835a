/* parcelforge — cadastral migration and parcel-store toolkit, C API.
 *
 * Every function returns a pf_status; PF_OK means success. On failure,
 * pf_last_error() returns a thread-local description of what went wrong.
 * Strings returned through char** out parameters are heap-allocated and
 * must be released with pf_string_free().
 */
#ifndef PARCELFORGE_H
#define PARCELFORGE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pf_status {
    PF_OK = 0,
    PF_E_ARGUMENT = 1,    /* null or out-of-range argument */
    PF_E_PARSE = 2,       /* malformed text input (title, wkt, mif, csv, config) */
    PF_E_NOT_FOUND = 3,   /* unknown layer or absent feature */
    PF_E_IO = 4,          /* filesystem or network failure */
    PF_E_DATA = 5,        /* invalid data: corrupt store, schema or crs violation */
    PF_E_UNSUPPORTED = 6, /* recognized but unsupported input */
    PF_E_INTERNAL = 7
} pf_status;

const char* pf_version(void);

/* Description of the most recent failure on this thread; empty string when
 * no failure has been recorded. */
const char* pf_last_error(void);

void pf_string_free(char* s);

/* ---- land-title identity -------------------------------------------- */

/* Canonical key "NN/X/num/idx" ("??" when no conservation code is known);
 * accepts any of the three published title formats. */
pf_status pf_title_canonical(const char* raw, char** out);

/* Reformats a title; fmt is "f1", "f2" or "f3". Converting to f3 requires
 * the conservation code to be present in the input. */
pf_status pf_title_format(const char* raw, const char* fmt, char** out);

/* ---- migration ------------------------------------------------------- */

/* Runs the migration described by the JSON config text. Relative paths in
 * the config resolve against base_dir (NULL = current directory).
 * projections_json may carry the named-CRS registry text or be NULL.
 * On success *report receives the human-readable run report. */
pf_status pf_migrate_run(const char* config_json, const char* base_dir,
                         const char* projections_json, char** report);

/* Same pipeline without writing the store; the filesystem is untouched. */
pf_status pf_migrate_validate(const char* config_json, const char* base_dir,
                              const char* projections_json, char** report);

/* ---- parcel store ----------------------------------------------------- */

typedef struct pf_store pf_store;

pf_status pf_store_open(const char* path, pf_store** out);
void pf_store_close(pf_store* store);

pf_status pf_store_version(const pf_store* store, uint64_t* out);

/* JSON array of {name, crs, feature_count}, sorted by name. */
pf_status pf_store_layers_json(const pf_store* store, char** out);

/* GeoJSON FeatureCollection of features whose envelope intersects the box
 * (closed boundaries), sorted by id; limit<=0 means the default of 1000. */
pf_status pf_store_bbox_query(const pf_store* store, const char* layer, double min_x,
                              double min_y, double max_x, double max_y, int limit,
                              int offset, char** out);

/* GeoJSON Feature looked up by land title (any format); PF_E_NOT_FOUND
 * when no parcel carries that title. */
pf_status pf_store_get_by_title(const pf_store* store, const char* layer,
                                const char* title, char** out);

/* GeoJSON FeatureCollection of features satisfying the predicate
 * ("intersects" | "contains" | "within") against the WKT geometry. */
pf_status pf_store_query_wkt(const pf_store* store, const char* layer,
                             const char* predicate, const char* wkt, char** out);

/* Spatial-SQL script: one CREATE TABLE plus one INSERT per feature. */
pf_status pf_store_export_sql(const pf_store* store, const char* layer, int srid,
                              char** out);

/* GeoJSON FeatureCollection in geographic coordinates (projected layers
 * are reprojected; NonEarth layers are rejected). */
pf_status pf_store_export_geojson(const pf_store* store, const char* layer, char** out);

/* ---- query service ---------------------------------------------------- */

typedef struct pf_server pf_server;

/* Loads the store at store_path and serves it read-only on host:port
 * (port 0 picks an ephemeral port). */
pf_status pf_server_start(const char* store_path, const char* host, int port,
                          pf_server** out);
int pf_server_port(const pf_server* server);
/* Blocks until pf_server_stop() is called from another thread. */
pf_status pf_server_wait(pf_server* server);
void pf_server_stop(pf_server* server);
void pf_server_free(pf_server* server);

#ifdef __cplusplus
}
#endif

#endif /* PARCELFORGE_H */
