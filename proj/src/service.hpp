#pragma once

#include <memory>
#include <optional>
#include <string>

#include "store.hpp"
#include "title.hpp"

namespace pforge {

// feature ids written by the migration are canonical title keys; this
// recovers the identity of such an id (nullopt for synthetic ids)
std::optional<TitleKey> parse_stored_key(const std::string& id);

// linear title lookup against a layer's feature ids, matching the
// normalized identity of the requested title
std::optional<std::string> find_feature_id_by_title(const Layer& layer, const TitleKey& key);

// Read-only consultation service over one immutable store snapshot.
// Endpoints:
//   GET  /health                          -> {"status":"ok","version":N}
//   GET  /layers                          -> [{name, crs, feature_count}]
//   GET  /parcels?layer=L&title=T         -> GeoJSON Feature | 404
//   GET  /parcels?layer=L&bbox=a,b,c,d    -> GeoJSON FeatureCollection
//   POST /query {layer, predicate, wkt}   -> GeoJSON FeatureCollection
// Titles are accepted in any of the three published formats and matched
// by their normalized identity. Every non-2xx reply carries a JSON body
// with an "error" field.
class QueryService {
public:
    explicit QueryService(std::shared_ptr<const Catalog> snapshot);
    ~QueryService();
    QueryService(const QueryService&) = delete;
    QueryService& operator=(const QueryService&) = delete;

    // binds and serves on a background thread; port 0 picks an ephemeral
    // port; returns the bound port
    int start(const std::string& host, int port);
    // blocks until stop() is called from elsewhere
    void wait();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace pforge
