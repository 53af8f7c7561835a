#pragma once

#include <filesystem>
#include <functional>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "integration.hpp"
#include "projection.hpp"

namespace pforge {

struct GraphicInput {
    std::string mif_path;
    std::string mid_path;
    // MID column carrying the raw land-title text, by name or 0-based index
    std::variant<std::string, int> title_column = std::string("titre");
    std::string source_id;  // defaults to the mif file stem
};

struct AlphaInput {
    std::string csv_path;
    std::string title_column;
    std::optional<std::string> area_column;
    std::string source_id;  // defaults to the csv file stem
};

struct MigrationConfig {
    std::vector<GraphicInput> inputs;
    std::vector<AlphaInput> alpha_inputs;
    Crs target_crs = Geographic{};
    MergePolicy policy;
    std::string store_path;
    std::string layer_name = "parcels";
    std::string nature_whitelist;  // empty accepts any A-Z letter
};

// Reads the CLI config document. Relative paths resolve against base_dir;
// target_crs accepts inline parameters or {"named": "..."} resolved
// against the projection registry.
MigrationConfig parse_migration_config(const nlohmann::json& doc,
                                       const std::filesystem::path& base_dir,
                                       const std::map<std::string, Crs>* registry);

struct StageTiming {
    std::string name;
    double seconds = 0.0;
};

struct MigrationReport {
    std::size_t features_read = 0;
    std::size_t mid_rows_read = 0;
    std::size_t titles_f1 = 0;
    std::size_t titles_f2 = 0;
    std::size_t titles_f3 = 0;
    std::size_t reprojected = 0;
    std::size_t parcels_written = 0;
    std::map<AnomalyKind, std::size_t> anomalies_by_kind;  // all seven kinds present
    std::size_t nature_warnings = 0;
    std::size_t crs_unresolved_files = 0;
    bool dry_run = false;
    double duration_seconds = 0.0;
    std::vector<StageTiming> stage_timings;
    std::vector<Anomaly> anomalies;

    std::string human_text() const;
    // line-oriented JSON: one event object per line; timing events carry
    // the only nondeterministic fields
    std::string json_lines() const;
    std::string anomalies_csv() const;
};

// called after each completed stage; tests inject faults here
using StageHook = std::function<void(const std::string& stage)>;

// Fig-style end-to-end run: parse -> titles -> reproject -> alpha ->
// merge -> store_load -> save. The store appears atomically; any stage
// error aborts with the stage name attached and leaves no partial store.
MigrationReport run_migration(const MigrationConfig& config, const StageHook& hook = {});

// identical pipeline without the store stages; filesystem untouched
MigrationReport validate_migration(const MigrationConfig& config);

}  // namespace pforge
