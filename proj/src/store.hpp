#pragma once

#include <filesystem>
#include <json.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "attr.hpp"
#include "geometry.hpp"
#include "projection.hpp"
#include "rtree.hpp"

namespace pforge {

struct LayerFeature {
    Geometry geometry;
    AttrRow attrs;
};

struct Layer {
    std::string name;
    Crs crs = Geographic{};
    std::vector<ColumnDef> schema;
    std::map<std::string, LayerFeature> features;
    RTree index;
};

// immutable snapshot value shared between readers
struct Catalog {
    std::map<std::string, std::shared_ptr<const Layer>> layers;
    std::uint64_t version = 0;
};

// ids sorted ascending whose feature envelope intersects env
std::vector<std::string> layer_bbox_query(const Layer& layer, const Envelope& env);

const Layer& catalog_layer(const Catalog& catalog, const std::string& name);

// Durable multi-reader layer catalog: many concurrent readers over
// immutable snapshots, one writer at a time; every mutation publishes a
// fresh catalog version.
class Store {
public:
    Store() : current_(std::make_shared<const Catalog>()) {}

    // opens a directory produced by save()
    explicit Store(const std::filesystem::path& dir);

    std::shared_ptr<const Catalog> snapshot() const;
    std::uint64_t version() const { return snapshot()->version; }

    void create_layer(const std::string& name, const Crs& crs,
                      std::vector<ColumnDef> schema);
    // returns the previous value when the id already existed
    std::optional<LayerFeature> put(const std::string& layer, const std::string& id,
                                    Geometry geometry, AttrRow attrs);
    std::optional<LayerFeature> get(const std::string& layer, const std::string& id) const;
    bool remove(const std::string& layer, const std::string& id);
    std::vector<std::string> bbox_query(const std::string& layer, const Envelope& env) const;

    // replaces the layer content wholesale and bulk-builds its index (STR)
    void bulk_fill(const std::string& layer,
                   std::vector<std::pair<std::string, LayerFeature>> features);

    // writes catalog.json + one .psl per layer into a temp directory, then
    // swaps it into place; a crash never leaves a partial store. `extras`
    // are additional (filename, content) pairs staged with the same swap.
    void save(const std::filesystem::path& dir,
              const std::vector<std::pair<std::string, std::string>>& extras = {}) const;

private:
    std::shared_ptr<const Layer> require_layer(const Catalog& catalog,
                                               const std::string& name) const;
    void publish(std::shared_ptr<const Catalog> next);

    mutable std::mutex ptr_mutex_;
    std::mutex writer_mutex_;
    std::shared_ptr<const Catalog> current_;
};

// export file formats
std::string export_sql(const Catalog& catalog, const std::string& layer, int srid);
std::string export_geojson(const Catalog& catalog, const std::string& layer);

// GeoJSON building blocks shared with the query service
nlohmann::json geometry_to_geojson(const Geometry& geom);
nlohmann::json feature_to_geojson(const std::string& id, const LayerFeature& feature,
                                  const std::vector<ColumnDef>& schema);
std::string crs_note_text(const Crs& crs);
nlohmann::json feature_collection_json(const Layer& layer,
                                       const std::vector<std::string>& ids,
                                       std::size_t offset, std::size_t limit);

}  // namespace pforge
