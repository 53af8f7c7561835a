#include "service.hpp"

// enough accept backlog for bursts of concurrent clients
#define CPPHTTPLIB_LISTEN_BACKLOG 128
#include <httplib.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <thread>

#include "geoprocessing.hpp"
#include "title.hpp"
#include "wkt.hpp"

namespace pforge {

using nlohmann::json;

namespace {

constexpr std::size_t kDefaultLimit = 1000;
constexpr std::size_t kMaxLimit = 10000;

void reply_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& code,
                 const std::string& message) {
    reply_json(res, status, json{{"error", code}, {"message", message}});
}

struct TitleIndex {
    // layer -> canonical core -> sorted feature ids
    std::map<std::string, std::map<std::string, std::vector<std::string>>> by_layer;

    explicit TitleIndex(const Catalog& catalog) {
        for (const auto& [layer_name, layer] : catalog.layers) {
            auto& index = by_layer[layer_name];
            for (const auto& [id, feature] : layer->features) {
                const auto key = parse_stored_key(id);
                if (key) index[canonical_core(*key)].push_back(id);
            }
        }
    }
};

std::optional<std::size_t> parse_size(const std::string& text) {
    if (text.empty()) return std::nullopt;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (*end != '\0' || v < 0) return std::nullopt;
    return static_cast<std::size_t>(v);
}

}  // namespace

// stored feature ids are canonical title keys ("NN/X/num/idx" or
// "??/X/num/idx") or synthetic "fid:<n>" ids
std::optional<TitleKey> parse_stored_key(const std::string& id) {
    try {
        if (id.rfind("?\?/", 0) == 0) return parse_title(id.substr(3)).first;
        return parse_title(id).first;
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::optional<std::string> find_feature_id_by_title(const Layer& layer, const TitleKey& key) {
    const std::string core = canonical_core(key);
    for (const auto& [id, feature] : layer.features) {
        const auto stored = parse_stored_key(id);
        if (!stored || canonical_core(*stored) != core) continue;
        if (same_title(key, *stored) == TitleMatch::Same) return id;
    }
    return std::nullopt;
}

struct QueryService::Impl {
    std::shared_ptr<const Catalog> snapshot;
    TitleIndex titles;
    httplib::Server server;
    std::thread runner;
    std::mutex join_mutex;
    std::atomic<bool> running{false};

    explicit Impl(std::shared_ptr<const Catalog> snap)
        : snapshot(std::move(snap)), titles(*snapshot) {
        register_routes();
    }

    const Layer* find_layer(const std::string& name) const {
        const auto it = snapshot->layers.find(name);
        return it == snapshot->layers.end() ? nullptr : it->second.get();
    }

    void handle_parcels(const httplib::Request& req, httplib::Response& res) const {
        if (!req.has_param("layer"))
            return reply_error(res, 400, "missing_param", "layer parameter is required");
        const std::string layer_name = req.get_param_value("layer");
        const Layer* layer = find_layer(layer_name);
        if (!layer)
            return reply_error(res, 400, "unknown_layer", "no layer named '" + layer_name + "'");

        const bool has_title = req.has_param("title");
        const bool has_bbox = req.has_param("bbox");
        if (has_title == has_bbox)
            return reply_error(res, 400, "missing_param",
                               "exactly one of title= or bbox= is required");

        if (has_title) {
            TitleKey key;
            try {
                key = parse_title(req.get_param_value("title")).first;
            } catch (const Error& e) {
                return reply_error(res, 400, "unparseable_title", e.detail());
            }
            const auto layer_index = titles.by_layer.find(layer_name);
            if (layer_index != titles.by_layer.end()) {
                const auto bucket = layer_index->second.find(canonical_core(key));
                if (bucket != layer_index->second.end()) {
                    for (const auto& id : bucket->second) {
                        const auto stored = parse_stored_key(id);
                        if (!stored || same_title(key, *stored) != TitleMatch::Same) continue;
                        const auto it = layer->features.find(id);
                        if (it == layer->features.end()) continue;
                        json feature = feature_to_geojson(id, it->second, layer->schema);
                        feature["crs_note"] = crs_note_text(layer->crs);
                        return reply_json(res, 200, feature);
                    }
                }
            }
            return reply_json(res, 404, json{{"error", "not_found"}});
        }

        // bbox
        const std::string bbox_text = req.get_param_value("bbox");
        std::vector<double> nums;
        std::size_t start = 0;
        while (start <= bbox_text.size() && nums.size() <= 4) {
            const std::size_t comma = bbox_text.find(',', start);
            const std::string part = bbox_text.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            char* end = nullptr;
            const double v = std::strtod(part.c_str(), &end);
            if (part.empty() || *end != '\0' || !std::isfinite(v)) {
                nums.clear();
                break;
            }
            nums.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (nums.size() != 4 || nums[0] > nums[2] || nums[1] > nums[3])
            return reply_error(res, 400, "bad_bbox",
                               "bbox must be minx,miny,maxx,maxy with min <= max");
        std::size_t limit = kDefaultLimit;
        std::size_t offset = 0;
        if (req.has_param("limit")) {
            const auto v = parse_size(req.get_param_value("limit"));
            if (!v) return reply_error(res, 400, "bad_param", "limit must be a non-negative integer");
            limit = std::min(*v, kMaxLimit);
        }
        if (req.has_param("offset")) {
            const auto v = parse_size(req.get_param_value("offset"));
            if (!v) return reply_error(res, 400, "bad_param", "offset must be a non-negative integer");
            offset = *v;
        }
        const Envelope env{nums[0], nums[1], nums[2], nums[3]};
        const auto ids = layer_bbox_query(*layer, env);
        reply_json(res, 200, feature_collection_json(*layer, ids, offset, limit));
    }

    void handle_query(const httplib::Request& req, httplib::Response& res) const {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception& e) {
            return reply_error(res, 400, "bad_json", e.what());
        }
        if (!body.is_object() || !body.contains("layer") || !body["layer"].is_string())
            return reply_error(res, 400, "missing_param", "body needs a \"layer\" string");
        const std::string layer_name = body["layer"];
        const Layer* layer = find_layer(layer_name);
        if (!layer)
            return reply_error(res, 400, "unknown_layer", "no layer named '" + layer_name + "'");
        if (!body.contains("predicate") || !body["predicate"].is_string())
            return reply_error(res, 400, "missing_param", "body needs a \"predicate\" string");
        const auto pred = spatial_predicate_from_name(body["predicate"].get<std::string>());
        if (!pred)
            return reply_error(res, 400, "unknown_predicate",
                               "predicate must be intersects, contains or within");
        if (!body.contains("wkt") || !body["wkt"].is_string())
            return reply_error(res, 400, "missing_param", "body needs a \"wkt\" string");
        Geometry probe;
        try {
            probe = from_wkt(body["wkt"].get<std::string>());
        } catch (const Error& e) {
            return reply_json(res, 400,
                              json{{"error", "wkt_syntax"},
                                   {"message", e.detail()},
                                   {"position", e.position()}});
        }
        const auto ids = select_features(*layer, std::nullopt, std::make_pair(*pred, probe));
        reply_json(res, 200, feature_collection_json(*layer, ids, 0, kDefaultLimit));
    }

    void register_routes() {
        server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
            reply_json(res, 200, json{{"status", "ok"}, {"version", snapshot->version}});
        });
        server.Get("/layers", [this](const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            for (const auto& [name, layer] : snapshot->layers)
                out.push_back(json{{"name", name},
                                   {"crs", crs_kind_name(layer->crs)},
                                   {"feature_count", layer->features.size()}});
            reply_json(res, 200, out);
        });
        server.Get("/parcels", [this](const httplib::Request& req, httplib::Response& res) {
            handle_parcels(req, res);
        });
        server.Post("/query", [this](const httplib::Request& req, httplib::Response& res) {
            handle_query(req, res);
        });
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty())
                res.set_content(json{{"error", res.status == 404 ? "not_found" : "request_failed"}}.dump(),
                                "application/json");
        });
        server.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                                        std::exception_ptr ep) {
            std::string message = "unhandled error";
            try {
                if (ep) std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                message = e.what();
            } catch (...) {
            }
            reply_json(res, 500, json{{"error", "internal"}, {"message", message}});
        });
    }
};

QueryService::QueryService(std::shared_ptr<const Catalog> snapshot)
    : impl_(std::make_unique<Impl>(std::move(snapshot))) {}

QueryService::~QueryService() {
    stop();
}

int QueryService::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
        if (bound <= 0) throw Error(ErrorKind::Io, "cannot bind to " + host);
    } else {
        if (!impl_->server.bind_to_port(host, port))
            throw Error(ErrorKind::Io,
                        "cannot bind to " + host + ":" + std::to_string(port));
    }
    impl_->running = true;
    impl_->runner = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void QueryService::wait() {
    std::lock_guard lock(impl_->join_mutex);
    if (impl_->runner.joinable()) impl_->runner.join();
}

void QueryService::stop() {
    if (impl_->running.exchange(false)) impl_->server.stop();
    wait();
}

}  // namespace pforge
