#pragma once

// Seeded migration-corpus generator. Writes MIF/MID/CSV inputs by hand
// (independently of the production writers) and records ground-truth
// counts at generation time.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "projection.hpp"
#include "title.hpp"

namespace testutil {

using namespace pforge;

struct FixturePlan {
    int merged = 935;             // cores with exactly one graphic and one alpha
    int orphan_graphics = 60;
    int orphan_alphas = 10;
    int dup_graphic_titles = 5;   // merged cores with one extra graphic
    int dup_alpha_titles = 5;     // merged cores with one extra alpha
    int conservation_conflicts = 3;
    int area_mismatches = 4;
    int titles_f1 = 400;          // spelling mix over all graphic records
    int titles_f2 = 350;
    int titles_f3 = 250;
    int graphic_files = 3;
    int alpha_files = 2;
    unsigned seed = 20240501;

    int total_graphics() const { return merged + dup_graphic_titles + orphan_graphics; }
    int total_alphas() const { return merged + dup_alpha_titles + orphan_alphas; }
};

struct FixtureTruth {
    std::size_t features_read = 0;
    std::size_t mid_rows_read = 0;
    std::size_t titles_f1 = 0, titles_f2 = 0, titles_f3 = 0;
    std::size_t reprojected = 0;
    std::size_t parcels_written = 0;
    std::size_t orphan_geometry = 0;
    std::size_t orphan_attributes = 0;
    std::size_t duplicate_geometry = 0;
    std::size_t duplicate_attributes = 0;
    std::size_t conservation_conflicts = 0;
    std::size_t area_mismatches = 0;
    std::string config_json;  // ready-to-run config with absolute paths
};

namespace fixture_detail {

struct CoreInfo {
    TitleKey key;           // with conservation always assigned
    bool conflict = false;  // alpha cites a different conservation
    bool mismatch = false;  // alpha declares a wrong area
    int grid = 0;           // parcel position
};

inline std::string spell(const TitleKey& key, TitleFormat fmt, bool wrong_conservation) {
    TitleKey k = key;
    if (wrong_conservation) {
        const int code = std::stoi(*k.conservation);
        char buf[8];
        std::snprintf(buf, sizeof(buf), "%02d", code % 99 + 1);
        k.conservation = buf;
    }
    return format_title(k, fmt);
}

inline double projected_square_area(const LccParams& lcc, double lon, double lat,
                                    double side_deg) {
    const Coord a = lcc_forward({lon, lat}, lcc);
    const Coord b = lcc_forward({lon + side_deg, lat}, lcc);
    const Coord c = lcc_forward({lon + side_deg, lat + side_deg}, lcc);
    const Coord d = lcc_forward({lon, lat + side_deg}, lcc);
    return 0.5 * std::fabs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)) +
           0.5 * std::fabs((c.x - a.x) * (d.y - a.y) - (d.x - a.x) * (c.y - a.y));
}

}  // namespace fixture_detail

// Lays out MIF/MID graphic inputs and CSV alpha inputs under dir and
// returns the recorded truth. Source CRS is geographic; the config targets
// the northern Lambert zone so every feature is reprojected.
inline FixtureTruth write_migration_fixture(const std::filesystem::path& dir,
                                            const FixturePlan& plan) {
    namespace fs = std::filesystem;
    using fixture_detail::CoreInfo;
    fs::create_directories(dir);
    std::mt19937 rng(plan.seed);

    LccParams lcc;
    lcc.ellipsoid = kClarke1880Ign;
    lcc.lat_0 = 33.3;
    lcc.lon_0 = -5.4;
    lcc.k_0 = 0.999625769;
    lcc.false_easting = 500000;
    lcc.false_northing = 300000;

    const int total_cores = plan.merged + plan.orphan_graphics + plan.orphan_alphas;
    std::vector<CoreInfo> cores;
    cores.reserve(static_cast<std::size_t>(total_cores));
    for (int i = 0; i < total_cores; ++i) {
        CoreInfo core;
        core.key.nature = "TRB"[i % 3];
        core.key.number = std::to_string(1000 + i);
        core.key.index = std::to_string(1 + (i % 40));
        char buf[8];
        std::snprintf(buf, sizeof(buf), "%02u", 1 + rng() % 80);
        core.key.conservation = buf;
        core.grid = i;
        cores.push_back(std::move(core));
    }
    // merged cores first, then graphic orphans, then alpha orphans
    const int merged_end = plan.merged;
    const int graphic_orphan_end = plan.merged + plan.orphan_graphics;

    // graphic records: (core index, is-extra-duplicate)
    std::vector<std::pair<int, bool>> graphic_records;
    for (int i = 0; i < graphic_orphan_end; ++i) graphic_records.push_back({i, false});
    for (int d = 0; d < plan.dup_graphic_titles; ++d) graphic_records.push_back({d, true});
    std::shuffle(graphic_records.begin(), graphic_records.end(), rng);

    // spelling formats over graphic records: exact F1/F2/F3 mix
    std::vector<TitleFormat> formats;
    formats.insert(formats.end(), plan.titles_f1, TitleFormat::F1);
    formats.insert(formats.end(), plan.titles_f2, TitleFormat::F2);
    formats.insert(formats.end(), plan.titles_f3, TitleFormat::F3);
    if (formats.size() != graphic_records.size())
        throw std::logic_error("format mix must cover every graphic record");
    std::shuffle(formats.begin(), formats.end(), rng);

    // conflicts need an F3 graphic spelling on a merged, non-duplicated core
    std::vector<int> conflict_cores;
    for (std::size_t r = 0; r < graphic_records.size() &&
                            static_cast<int>(conflict_cores.size()) < plan.conservation_conflicts;
         ++r) {
        const auto [core, extra] = graphic_records[r];
        if (extra || core >= merged_end || core < plan.dup_graphic_titles) continue;
        if (formats[r] != TitleFormat::F3) continue;
        if (std::find(conflict_cores.begin(), conflict_cores.end(), core) !=
            conflict_cores.end())
            continue;
        conflict_cores.push_back(core);
        cores[static_cast<std::size_t>(core)].conflict = true;
    }
    if (static_cast<int>(conflict_cores.size()) < plan.conservation_conflicts)
        throw std::logic_error("not enough F3 spellings to plant conflicts");

    // area mismatches on merged cores without other roles
    int planted_mismatch = 0;
    for (int i = plan.dup_graphic_titles; i < merged_end && planted_mismatch < plan.area_mismatches;
         ++i) {
        if (cores[static_cast<std::size_t>(i)].conflict) continue;
        cores[static_cast<std::size_t>(i)].mismatch = true;
        ++planted_mismatch;
    }

    const double side_deg = 0.004;
    auto parcel_lon = [&](const CoreInfo& c) { return -6.5 + 0.01 * (c.grid % 120); };
    auto parcel_lat = [&](const CoreInfo& c) { return 32.5 + 0.01 * (c.grid / 120); };

    // ---- graphic MIF/MID files
    FixtureTruth truth;
    std::vector<std::string> mif_names, csv_names;
    const std::size_t per_file =
        (graphic_records.size() + plan.graphic_files - 1) / plan.graphic_files;
    for (int f = 0; f < plan.graphic_files; ++f) {
        const std::string stem = "graphics_" + std::to_string(f + 1);
        std::ofstream mif(dir / (stem + ".mif"), std::ios::binary);
        std::ofstream mid(dir / (stem + ".mid"), std::ios::binary);
        mif << std::setprecision(12);
        mif << "VERSION 300\nCHARSET \"Neutral\"\nDELIMITER \",\"\n";
        mif << "CoordSys Earth Projection 1, 104\n";
        mif << "COLUMNS 1\n  titre Char (32)\nDATA\n";
        const std::size_t begin = static_cast<std::size_t>(f) * per_file;
        const std::size_t end = std::min(graphic_records.size(), begin + per_file);
        for (std::size_t r = begin; r < end; ++r) {
            const auto [core_idx, extra] = graphic_records[r];
            const CoreInfo& core = cores[static_cast<std::size_t>(core_idx)];
            const double lon = parcel_lon(core), lat = parcel_lat(core);
            mif << "REGION 1\n4\n";
            mif << lon << " " << lat << "\n";
            mif << lon + side_deg << " " << lat << "\n";
            mif << lon + side_deg << " " << lat + side_deg << "\n";
            mif << lon << " " << lat + side_deg << "\n";
            const TitleFormat fmt = formats[r];
            const bool f3 = fmt == TitleFormat::F3;
            mid << '"' << fixture_detail::spell(core.key, f3 ? TitleFormat::F3 : fmt, false)
                << '"' << "\n";
            switch (fmt) {
                case TitleFormat::F1: ++truth.titles_f1; break;
                case TitleFormat::F2: ++truth.titles_f2; break;
                case TitleFormat::F3: ++truth.titles_f3; break;
            }
        }
        mif_names.push_back(stem);
        truth.features_read = graphic_records.size();
        truth.mid_rows_read = graphic_records.size();
    }

    // ---- alpha CSV files
    std::vector<std::pair<int, bool>> alpha_records;
    for (int i = 0; i < merged_end; ++i) alpha_records.push_back({i, false});
    for (int i = graphic_orphan_end; i < total_cores; ++i) alpha_records.push_back({i, false});
    for (int d = 0; d < plan.dup_alpha_titles; ++d)
        alpha_records.push_back({plan.dup_graphic_titles + d, true});
    std::shuffle(alpha_records.begin(), alpha_records.end(), rng);

    const std::size_t alpha_per_file =
        (alpha_records.size() + plan.alpha_files - 1) / plan.alpha_files;
    std::uniform_int_distribution<int> fmt_pick(0, 2);
    for (int f = 0; f < plan.alpha_files; ++f) {
        const std::string stem = "ledger_" + std::to_string(f + 1);
        std::ofstream csv(dir / (stem + ".csv"), std::ios::binary);
        csv << "titre,surface,owner\n";
        const std::size_t begin = static_cast<std::size_t>(f) * alpha_per_file;
        const std::size_t end = std::min(alpha_records.size(), begin + alpha_per_file);
        for (std::size_t r = begin; r < end; ++r) {
            const auto [core_idx, extra] = alpha_records[r];
            const CoreInfo& core = cores[static_cast<std::size_t>(core_idx)];
            TitleFormat fmt = static_cast<TitleFormat>(fmt_pick(rng));
            if (core.conflict) fmt = TitleFormat::F3;
            const double area =
                fixture_detail::projected_square_area(lcc, parcel_lon(core), parcel_lat(core),
                                                      side_deg) *
                (core.mismatch ? 1.5 : 1.0);
            csv << '"' << fixture_detail::spell(core.key, fmt, core.conflict) << "\",";
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.3f", area);
            csv << buf << ",\"owner " << core_idx << "\"\n";
        }
        csv_names.push_back(stem);
    }

    truth.reprojected = graphic_records.size();
    truth.parcels_written = static_cast<std::size_t>(plan.merged);
    truth.orphan_geometry = static_cast<std::size_t>(plan.orphan_graphics);
    truth.orphan_attributes = static_cast<std::size_t>(plan.orphan_alphas);
    truth.duplicate_geometry = static_cast<std::size_t>(plan.dup_graphic_titles);
    truth.duplicate_attributes = static_cast<std::size_t>(plan.dup_alpha_titles);
    truth.conservation_conflicts = static_cast<std::size_t>(plan.conservation_conflicts);
    truth.area_mismatches = static_cast<std::size_t>(plan.area_mismatches);

    std::string config = "{\n  \"inputs\": [";
    for (std::size_t i = 0; i < mif_names.size(); ++i) {
        if (i) config += ",";
        config += "\n    {\"mif_path\": \"" + mif_names[i] + ".mif\", \"mid_path\": \"" +
                  mif_names[i] + ".mid\", \"title_column\": \"titre\"}";
    }
    config += "\n  ],\n  \"alpha_inputs\": [";
    for (std::size_t i = 0; i < csv_names.size(); ++i) {
        if (i) config += ",";
        config += "\n    {\"csv_path\": \"" + csv_names[i] +
                  ".csv\", \"title_column\": \"titre\", \"area_column\": \"surface\"}";
    }
    config +=
        "\n  ],\n"
        "  \"target_crs\": {\"kind\": \"lcc\", \"ellipsoid\": {\"a\": 6378249.2, "
        "\"inv_f\": 293.4660212936294}, \"lat_0\": 33.3, \"lon_0\": -5.4, "
        "\"k_0\": 0.999625769, \"false_easting\": 500000.0, \"false_northing\": 300000.0},\n"
        "  \"policy\": {\"duplicates\": \"first_wins\", \"area_tol_rel\": 0.05},\n"
        "  \"store_path\": \"store\",\n  \"layer_name\": \"parcels\"\n}\n";
    truth.config_json = config;
    std::ofstream(dir / "config.json", std::ios::binary) << config;
    return truth;
}

}  // namespace testutil
