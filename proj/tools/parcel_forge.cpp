// parcel-forge: command-line front end over the parcelforge C API.
#include <CLI11.hpp>
#include <parcelforge.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

int fail_with_last_error(const std::string& what) {
    std::cerr << "parcel-forge: " << what << ": " << pf_last_error() << "\n";
    return kExitError;
}

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// registry lookup order: explicit option, $PARCELFORGE_PROJECTIONS,
// next to the config, ./data/projections.json
std::optional<std::string> find_projections(const std::string& explicit_path,
                                            const fs::path& config_dir) {
    std::vector<fs::path> candidates;
    if (!explicit_path.empty()) candidates.push_back(explicit_path);
    if (const char* env = std::getenv("PARCELFORGE_PROJECTIONS")) candidates.push_back(env);
    candidates.push_back(config_dir / "projections.json");
    candidates.push_back(fs::path("data") / "projections.json");
    for (const auto& p : candidates) {
        if (auto text = read_file(p)) return text;
        if (!explicit_path.empty() && p == fs::path(explicit_path)) {
            std::cerr << "parcel-forge: cannot read projections file " << p << "\n";
            std::exit(kExitError);
        }
    }
    return std::nullopt;
}

struct OwnedString {
    char* value = nullptr;
    ~OwnedString() { pf_string_free(value); }
};

int run_migration_command(const std::string& config_path, const std::string& projections,
                          bool dry_run) {
    const auto config = read_file(config_path);
    if (!config) {
        std::cerr << "parcel-forge: cannot read config " << config_path << "\n";
        return kExitError;
    }
    const fs::path base_dir = fs::path(config_path).parent_path();
    const auto registry = find_projections(projections, base_dir);
    OwnedString report;
    const pf_status rc =
        (dry_run ? pf_migrate_validate : pf_migrate_run)(
            config->c_str(), base_dir.empty() ? "." : base_dir.string().c_str(),
            registry ? registry->c_str() : nullptr, &report.value);
    if (rc != PF_OK) return fail_with_last_error(dry_run ? "validate failed" : "migrate failed");
    std::cout << report.value;
    return kExitOk;
}

bool parse_bbox(const std::string& text, double out[4]) {
    std::istringstream in(text);
    for (int i = 0; i < 4; ++i) {
        std::string part;
        if (!std::getline(in, part, ',')) return false;
        try {
            std::size_t used = 0;
            out[i] = std::stod(part, &used);
            if (used != part.size()) return false;
        } catch (...) {
            return false;
        }
    }
    std::string extra;
    return !std::getline(in, extra, ',');
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cadastral migration toolkit and parcel store"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(pf_version()));

    // migrate / validate
    std::string config_path, projections_path;
    auto* migrate = app.add_subcommand("migrate", "run a migration into a parcel store");
    migrate->add_option("-c,--config", config_path, "migration config (JSON)")->required();
    migrate->add_option("--projections", projections_path, "named CRS registry (JSON)");
    auto* validate = app.add_subcommand("validate", "dry-run a migration without writing");
    validate->add_option("-c,--config", config_path, "migration config (JSON)")->required();
    validate->add_option("--projections", projections_path, "named CRS registry (JSON)");

    // normalize-title
    std::string raw_title, to_format;
    auto* normalize = app.add_subcommand("normalize-title", "normalize a land-title number");
    normalize->add_option("title", raw_title, "title in any supported format")->required();
    normalize->add_option("--to", to_format, "reformat as f1, f2 or f3")
        ->check(CLI::IsMember({"f1", "f2", "f3"}));

    // query
    std::string store_path, layer, bbox_text, title;
    int limit = 0, offset = 0;
    auto* query = app.add_subcommand("query", "query a parcel store");
    query->add_option("--store", store_path, "store directory")->required();
    query->add_option("--layer", layer, "layer name")->required();
    auto* bbox_opt = query->add_option("--bbox", bbox_text, "minx,miny,maxx,maxy");
    auto* title_opt = query->add_option("--title", title, "land-title number");
    bbox_opt->excludes(title_opt);
    query->add_option("--limit", limit, "maximum features returned");
    query->add_option("--offset", offset, "features to skip");

    // export
    std::string format, out_path = "-";
    int srid = 4326;
    auto* exp = app.add_subcommand("export", "export a layer as spatial SQL or GeoJSON");
    exp->add_option("--store", store_path, "store directory")->required();
    exp->add_option("--layer", layer, "layer name")->required();
    exp->add_option("--format", format, "sql or geojson")
        ->required()
        ->check(CLI::IsMember({"sql", "geojson"}));
    exp->add_option("-o,--output", out_path, "output file, '-' for stdout");
    exp->add_option("--srid", srid, "SRID for ST_GeomFromText (sql only)");

    // serve
    std::string listen = "127.0.0.1:8080";
    auto* serve = app.add_subcommand("serve", "serve a store over HTTP (read-only)");
    serve->add_option("--store", store_path, "store directory")->required();
    serve->add_option("--listen", listen, "host:port to listen on");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (migrate->parsed()) return run_migration_command(config_path, projections_path, false);
    if (validate->parsed()) return run_migration_command(config_path, projections_path, true);

    if (normalize->parsed()) {
        OwnedString out;
        pf_status rc;
        if (to_format.empty())
            rc = pf_title_canonical(raw_title.c_str(), &out.value);
        else
            rc = pf_title_format(raw_title.c_str(), to_format.c_str(), &out.value);
        if (rc != PF_OK) return fail_with_last_error("cannot normalize title");
        std::cout << out.value << "\n";
        return kExitOk;
    }

    if (query->parsed()) {
        if (bbox_text.empty() == title.empty()) {
            std::cerr << "parcel-forge: query needs exactly one of --bbox or --title\n";
            return kExitUsage;
        }
        pf_store* store = nullptr;
        if (pf_store_open(store_path.c_str(), &store) != PF_OK)
            return fail_with_last_error("cannot open store");
        OwnedString out;
        pf_status rc;
        if (!title.empty()) {
            rc = pf_store_get_by_title(store, layer.c_str(), title.c_str(), &out.value);
        } else {
            double box[4];
            if (!parse_bbox(bbox_text, box)) {
                pf_store_close(store);
                std::cerr << "parcel-forge: --bbox must be minx,miny,maxx,maxy\n";
                return kExitUsage;
            }
            rc = pf_store_bbox_query(store, layer.c_str(), box[0], box[1], box[2], box[3],
                                     limit, offset, &out.value);
        }
        pf_store_close(store);
        if (rc != PF_OK) return fail_with_last_error("query failed");
        std::cout << out.value << "\n";
        return kExitOk;
    }

    if (exp->parsed()) {
        pf_store* store = nullptr;
        if (pf_store_open(store_path.c_str(), &store) != PF_OK)
            return fail_with_last_error("cannot open store");
        OwnedString out;
        const pf_status rc = format == "sql"
                                 ? pf_store_export_sql(store, layer.c_str(), srid, &out.value)
                                 : pf_store_export_geojson(store, layer.c_str(), &out.value);
        pf_store_close(store);
        if (rc != PF_OK) return fail_with_last_error("export failed");
        if (out_path == "-") {
            std::cout << out.value;
        } else {
            std::ofstream file(out_path, std::ios::binary);
            if (!file) {
                std::cerr << "parcel-forge: cannot write " << out_path << "\n";
                return kExitError;
            }
            file << out.value;
        }
        return kExitOk;
    }

    if (serve->parsed()) {
        const auto colon = listen.rfind(':');
        if (colon == std::string::npos) {
            std::cerr << "parcel-forge: --listen must be host:port\n";
            return kExitUsage;
        }
        const std::string host = listen.substr(0, colon);
        int port = 0;
        try {
            port = std::stoi(listen.substr(colon + 1));
        } catch (...) {
            std::cerr << "parcel-forge: bad port in --listen\n";
            return kExitUsage;
        }
        pf_server* server = nullptr;
        if (pf_server_start(store_path.c_str(), host.c_str(), port, &server) != PF_OK)
            return fail_with_last_error("cannot start server");
        std::cout << "serving " << store_path << " on http://" << host << ":"
                  << pf_server_port(server) << "\n";
        pf_server_wait(server);
        pf_server_free(server);
        return kExitOk;
    }

    return kExitUsage;
}
