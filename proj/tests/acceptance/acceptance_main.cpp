// Acceptance suite: runs every criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code 0 only when all pass.
#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "clip.hpp"
#include "fixture.hpp"
#include "geoprocessing.hpp"
#include "helpers.hpp"
#include "mif.hpp"
#include "pipeline.hpp"
#include "projection.hpp"
#include "service.hpp"
#include "store.hpp"
#include "table_gen.hpp"
#include "title.hpp"
#include "wkt.hpp"

using namespace pforge;
using namespace testutil;
namespace fs = std::filesystem;

namespace {

struct CriterionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw CriterionFailure(what);
}

template <typename T>
void require_eq(const T& got, const T& want, const std::string& what) {
    if (!(got == want)) {
        std::ostringstream msg;
        msg << what << ": got " << got << ", want " << want;
        throw CriterionFailure(msg.str());
    }
}

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() /
                     ("pforge_acceptance_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot read " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

LccParams merchich_nord() {
    LccParams p;
    p.ellipsoid = kClarke1880Ign;
    p.lat_0 = 33.3;
    p.lon_0 = -5.4;
    p.k_0 = 0.999625769;
    p.false_easting = 500000.0;
    p.false_northing = 300000.0;
    return p;
}

// ---------------------------------------------------------- criterion 1

void criterion_titles() {
    const auto [k1, f1] = parse_title("T1111/20");
    const auto [k2, f2] = parse_title("T/1111/20");
    const auto [k3, f3] = parse_title("03/T/1111/20");
    require(f1 == TitleFormat::F1 && f2 == TitleFormat::F2 && f3 == TitleFormat::F3,
            "published strings must detect their formats");
    require(same_title(k1, k2) == TitleMatch::Same && same_title(k1, k3) == TitleMatch::Same &&
                same_title(k2, k3) == TitleMatch::Same,
            "published strings must be pairwise Same");

    std::mt19937 rng(11);
    for (int i = 0; i < 10000; ++i) {
        TitleKey key;
        if (rng() % 2) key = TitleKey{std::to_string(1 + rng() % 99), 'A', "", ""};
        key.nature = static_cast<char>('A' + rng() % 26);
        key.number = std::to_string(1 + rng() % 9999999);
        key.index = std::to_string(rng() % 10000);
        for (const TitleFormat fmt : {TitleFormat::F1, TitleFormat::F2, TitleFormat::F3}) {
            if (fmt == TitleFormat::F3 && !key.conservation) continue;
            const std::string text = format_title(key, fmt);
            const auto [back, detected] = parse_title(text);
            require(detected == fmt, "format detection must round-trip for " + text);
            require(same_title(back, key) == TitleMatch::Same,
                    "identity must round-trip for " + text);
            require(back.number == key.number && back.index == key.index,
                    "digits must round-trip verbatim for " + text);
        }
    }
}

// ---------------------------------------------------------- criterion 2

void criterion_mif_roundtrip() {
    const fs::path corpus = fs::path(PF_FIXTURE_DIR);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(corpus)) {
        if (entry.path().extension() != ".mif") continue;
        ++files;
        const std::string mif = slurp(entry.path());
        fs::path mid_path = entry.path();
        mid_path.replace_extension(".mid");
        std::optional<std::string> mid;
        if (fs::exists(mid_path)) mid = slurp(mid_path);

        const FeatureTable table = parse_mif_mid(
            mif, mid ? std::optional<std::string_view>(*mid) : std::nullopt);
        const auto [out_mif, out_mid] = write_mif_mid(table);
        const FeatureTable back = parse_mif_mid(
            out_mif, table.header.columns.empty() ? std::nullopt
                                                  : std::optional<std::string_view>(out_mid));
        require(tables_equal(table, back),
                "corpus fixpoint failed for " + entry.path().filename().string());
    }
    require_eq(files, std::size_t{25}, "corpus file count");

    std::mt19937 rng(22);
    for (int i = 0; i < 500; ++i) {
        const FeatureTable table = random_table(rng, 40);
        const auto [mif, mid] = write_mif_mid(table);
        const FeatureTable back = parse_mif_mid(
            mif, table.header.columns.empty() ? std::nullopt
                                              : std::optional<std::string_view>(mid));
        require(tables_equal(table, back),
                "randomized fixpoint failed at table " + std::to_string(i));
    }
}

// ---------------------------------------------------------- criterion 3

void criterion_boolean_oracle() {
    std::mt19937 rng(33);
    std::uniform_real_distribution<double> offset(-1.5, 1.5);
    int band_skipped = 0;
    for (int pair = 0; pair < 200; ++pair) {
        PolygonSet a = star_region(rng, {offset(rng), offset(rng)}, 0.8, 3.0,
                                   5 + static_cast<int>(rng() % 12));
        PolygonSet b = star_region(rng, {offset(rng), offset(rng)}, 0.8, 3.0,
                                   5 + static_cast<int>(rng() % 12));
        if (pair % 7 == 0) {
            // sprinkle holes to cover multi-ring operands
            Ring hole = star_ring(rng, {offset(rng) / 4, offset(rng) / 4}, 0.1, 0.3, 5);
            try {
                a = {Polygon::normalized(a[0].outer, {std::move(hole)})};
            } catch (const std::invalid_argument&) {
                // hole fell outside this star; keep the plain polygon
            }
        }
        const PolygonSet inter = region_intersect(a, b);
        const PolygonSet uni = region_union(a, b);

        const double sum = region_area(a) + region_area(b);
        const double lhs = region_area(uni) + region_area(inter);
        require(std::fabs(lhs - sum) <= 1e-6 * sum,
                "inclusion-exclusion violated at pair " + std::to_string(pair) + ": " +
                    std::to_string(lhs) + " vs " + std::to_string(sum));

        Envelope env = region_envelope(a);
        env.expand(region_envelope(b));
        std::uniform_real_distribution<double> ux(env.min_x, env.max_x);
        std::uniform_real_distribution<double> uy(env.min_y, env.max_y);
        int total = 0;
        int agree = 0;
        for (int s = 0; s < 100000; ++s) {
            const Coord p{ux(rng), uy(rng)};
            constexpr double band = 1e-6;
            if (boundary_distance(p, a) < band || boundary_distance(p, b) < band) {
                ++band_skipped;
                continue;
            }
            const bool in_a = oracle_even_odd(p, a);
            const bool in_b = oracle_even_odd(p, b);
            const bool in_i = !inter.empty() && oracle_even_odd(p, inter);
            const bool in_u = !uni.empty() && oracle_even_odd(p, uni);
            ++total;
            if ((in_i == (in_a && in_b)) && (in_u == (in_a || in_b))) ++agree;
        }
        require(agree >= 0.999 * total,
                "monte-carlo agreement " + std::to_string(agree) + "/" + std::to_string(total) +
                    " below 99.9% at pair " + std::to_string(pair));
    }
    (void)band_skipped;
}

// ---------------------------------------------------------- criterion 4

void criterion_buffer() {
    const int q = 8;
    const double arc_area = 2.0 * q * std::sin(std::numbers::pi / (2 * q));

    const Geometry point_buffer = buffer(Geometry::point({2, 3}), 1.0, q);
    const double point_area = region_area(point_buffer.as_region());
    require(std::fabs(point_area - arc_area) <= 1e-9 * arc_area,
            "point buffer area " + format_double(point_area, 17) + " != " +
                format_double(arc_area, 17));

    const Geometry square_buffer = buffer(square_geometry(0, 0, 1), 1.0, q);
    const double square_expected = 1.0 + 4.0 + arc_area;
    const double square_area = region_area(square_buffer.as_region());
    require(std::fabs(square_area - square_expected) <= 1e-9 * square_expected,
            "square buffer area " + format_double(square_area, 17) + " != " +
                format_double(square_expected, 17));

    const double r = 0.5, len = 2.0;
    const Geometry capsule = buffer(Geometry::polyline({{{0, 0}, {len, 0}}}), r, q);
    const double capsule_expected =
        2.0 * len * r + 2.0 * q * r * r * std::sin(std::numbers::pi / (2 * q));
    const double capsule_area = region_area(capsule.as_region());
    require(std::fabs(capsule_area - capsule_expected) <= 1e-9 * capsule_expected,
            "capsule buffer area " + format_double(capsule_area, 17) + " != " +
                format_double(capsule_expected, 17));
}

// ---------------------------------------------------------- criterion 5

void criterion_projection() {
    const LccParams p = merchich_nord();
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> lon(-10.0, 0.0);
    std::uniform_real_distribution<double> lat(28.0, 37.0);
    for (int i = 0; i < 1000; ++i) {
        const GeoCoord g{lon(rng), lat(rng)};
        const GeoCoord back = lcc_inverse(lcc_forward(g, p), p);
        require(std::fabs(back.lon - g.lon) < 1e-9 && std::fabs(back.lat - g.lat) < 1e-9,
                "geographic round trip drift at point " + std::to_string(i));
    }
    std::uniform_real_distribution<double> easting(200000.0, 800000.0);
    std::uniform_real_distribution<double> northing(0.0, 600000.0);
    for (int i = 0; i < 1000; ++i) {
        const Coord c{easting(rng), northing(rng)};
        const Coord back = lcc_forward(lcc_inverse(c, p), p);
        require(std::fabs(back.x - c.x) < 1e-6 && std::fabs(back.y - c.y) < 1e-6,
                "projected round trip drift at point " + std::to_string(i));
    }

    // frozen high-precision reference (tests/oracle/lcc_reference.py)
    const Coord ref = lcc_forward({-6.25, 34.1}, p);
    require(std::fabs(ref.x - 421584.9325640067) < 1e-3 &&
                std::fabs(ref.y - 389018.8964050356) < 1e-3,
            "reference point off by more than 1 mm: " + format_double(ref.x, 17) + ", " +
                format_double(ref.y, 17));

    // exact recovery of synthetic affine transforms
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    for (int round = 0; round < 50; ++round) {
        AffineTransform t{coef(rng), coef(rng), coef(rng) * 100,
                          coef(rng), coef(rng), coef(rng) * 100};
        if (!t.invertible()) continue;
        std::vector<ControlPoint> pts;
        for (int i = 0; i < 6; ++i) {
            const double col = coef(rng) * 50, row = coef(rng) * 50;
            const Coord w = apply_affine(t, col, row);
            pts.push_back({col, row, w.x, w.y});
        }
        AffineFit fit;
        try {
            fit = fit_affine(pts);
        } catch (const Error&) {
            continue;  // collinear draw
        }
        const double err = std::max({std::fabs(fit.transform.a - t.a), std::fabs(fit.transform.b - t.b),
                                     std::fabs(fit.transform.c - t.c), std::fabs(fit.transform.d - t.d),
                                     std::fabs(fit.transform.e - t.e), std::fabs(fit.transform.f - t.f)});
        require(err < 1e-9 && fit.rms < 1e-9,
                "synthetic transform not recovered exactly, err " + format_double(err, 6));
    }

    // frozen normal-equations oracle (tests/oracle/affine_reference.py)
    const std::vector<ControlPoint> noisy{
        {0, 0, 100.31, -50.42},     {100, 0, 349.83, -74.74}, {0, 100, 150.05, 250.44},
        {100, 100, 399.62, 224.91}, {50, 25, 237.71, 12.63},  {25, 75, 199.56, 169.12},
    };
    const AffineFit fit = fit_affine(noisy);
    const double oracle[6] = {2.496332450331126,   0.4962629139072848, 100.28495033112583,
                              -0.24972582781456953, 3.0028152317880794, -50.038327814569534};
    const double got[6] = {fit.transform.a, fit.transform.b, fit.transform.c,
                           fit.transform.d, fit.transform.e, fit.transform.f};
    for (int i = 0; i < 6; ++i)
        require(std::fabs(got[i] - oracle[i]) < 1e-9,
                "noisy fixture coefficient " + std::to_string(i) + " off oracle");
    require(std::fabs(fit.rms - 0.3240020337602755) < 1e-9, "noisy fixture rms off oracle");
}

// ---------------------------------------------------------- criterion 6

void criterion_index() {
    Store store;
    store.create_layer("l", Geographic{}, {});
    std::mt19937 rng(66);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::uniform_real_distribution<double> sz(0.05, 8.0);
    std::vector<std::pair<std::string, Envelope>> live;
    int next = 0;
    for (int step = 0; step < 1000; ++step) {
        if (live.empty() || rng() % 3 != 0) {
            const double x = u(rng), y = u(rng), w = sz(rng), h = sz(rng);
            const std::string id = "f" + std::to_string(next++);
            const Geometry geom = Geometry::region({Polygon::normalized(
                Ring::from_coords({{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}}), {})});
            live.push_back({id, geom.envelope()});
            store.put("l", id, geom, {});
        } else {
            const std::size_t pick = rng() % live.size();
            require(store.remove("l", live[pick].first), "remove must find a live id");
            live.erase(live.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        store.snapshot()->layers.at("l")->index.validate_structure();
    }
    for (int q = 0; q < 10000; ++q) {
        const double x = u(rng), y = u(rng), w = sz(rng), h = sz(rng);
        const Envelope probe{x, y, x + w, y + h};
        const auto got = store.bbox_query("l", probe);
        std::vector<std::string> want;
        for (const auto& [id, env] : live)
            if (env.intersects(probe)) want.push_back(id);
        std::sort(want.begin(), want.end());
        require(got == want, "bbox query diverged from linear scan at probe " +
                                 std::to_string(q));
    }
}

// ---------------------------------------------------------- criterion 7

const fs::path& migration_store_dir() {
    static const fs::path dir = work_dir() / "migration" / "store";
    return dir;
}

void criterion_migration() {
    const fs::path dir = work_dir() / "migration";
    fs::remove_all(dir);
    const FixturePlan plan;  // defaults: 1000 graphics / 950 alphas
    require_eq(plan.total_graphics(), 1000, "fixture graphic count");
    require_eq(plan.total_alphas(), 950, "fixture alpha count");
    const FixtureTruth truth = write_migration_fixture(dir, plan);

    const auto config_doc = nlohmann::json::parse(truth.config_json);
    const MigrationConfig config = parse_migration_config(config_doc, dir, nullptr);
    const auto run_start = std::chrono::steady_clock::now();
    const MigrationReport report = run_migration(config);
    const double run_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();
    require(run_seconds < 10.0,
            "single migration run took " + std::to_string(run_seconds) + "s, limit 10s");

    require_eq(report.features_read, truth.features_read, "features_read");
    require_eq(report.mid_rows_read, truth.mid_rows_read, "mid_rows_read");
    require_eq(report.titles_f1, truth.titles_f1, "titles F1");
    require_eq(report.titles_f2, truth.titles_f2, "titles F2");
    require_eq(report.titles_f3, truth.titles_f3, "titles F3");
    require_eq(report.reprojected, truth.reprojected, "reprojected");
    require_eq(report.parcels_written, truth.parcels_written, "parcels_written");
    require_eq(report.anomalies_by_kind.at(AnomalyKind::TitleParseFailure), std::size_t{0},
               "TitleParseFailure");
    require_eq(report.anomalies_by_kind.at(AnomalyKind::OrphanGeometry),
               truth.orphan_geometry, "OrphanGeometry");
    require_eq(report.anomalies_by_kind.at(AnomalyKind::OrphanAttributes),
               truth.orphan_attributes, "OrphanAttributes");
    require_eq(report.anomalies_by_kind.at(AnomalyKind::DuplicateGeometry),
               truth.duplicate_geometry, "DuplicateGeometry");
    require_eq(report.anomalies_by_kind.at(AnomalyKind::DuplicateAttributes),
               truth.duplicate_attributes, "DuplicateAttributes");
    require_eq(report.anomalies_by_kind.at(AnomalyKind::ConservationConflict),
               truth.conservation_conflicts, "ConservationConflict");
    require_eq(report.anomalies_by_kind.at(AnomalyKind::AreaMismatch), truth.area_mismatches,
               "AreaMismatch");

    // conservation of records: parcels + terminal anomaly refs account for
    // every input record exactly
    std::size_t terminal_refs = 0;
    for (const auto& a : report.anomalies) {
        if (a.kind == AnomalyKind::ConservationConflict || a.kind == AnomalyKind::AreaMismatch)
            continue;
        terminal_refs += a.refs.size();
    }
    require_eq(2 * report.parcels_written + terminal_refs,
               truth.features_read + static_cast<std::size_t>(plan.total_alphas()),
               "conservation of records");

    // byte determinism across runs
    auto doc2 = config_doc;
    doc2["store_path"] = "store_second";
    const MigrationReport second = run_migration(parse_migration_config(doc2, dir, nullptr));
    auto strip_timings = [](const std::string& jsonl) {
        std::string out;
        std::istringstream in(jsonl);
        std::string line;
        while (std::getline(in, line))
            if (line.find("\"event\":\"timing\"") == std::string::npos) out += line + "\n";
        return out;
    };
    require(strip_timings(report.json_lines()) == strip_timings(second.json_lines()),
            "reports must be byte-identical excluding timing fields");
    for (const char* file : {"catalog.json", "parcels.psl", "anomalies.csv"}) {
        require(slurp(dir / "store" / file) == slurp(dir / "store_second" / file),
                std::string("stores must be byte-identical: ") + file);
    }

    // fault injection between stages never leaves a partial store
    auto doc3 = config_doc;
    doc3["store_path"] = "store_faulted";
    const MigrationConfig faulted = parse_migration_config(doc3, dir, nullptr);
    for (const char* stage :
         {"parse", "titles", "reproject", "alpha", "merge", "store_load"}) {
        bool threw = false;
        try {
            run_migration(faulted, [&](const std::string& done) {
                if (done == stage) throw Error(ErrorKind::PipelineError, "injected fault");
            });
        } catch (const Error&) {
            threw = true;
        }
        require(threw, std::string("fault after ") + stage + " must abort");
        require(!fs::exists(dir / "store_faulted"),
                std::string("no store may exist after a fault at ") + stage);
    }
}

// ---------------------------------------------------------- criterion 8

void criterion_service() {
    // serve the store produced by the migration criterion, plus the
    // published Table-1 parcel
    Store store(migration_store_dir());
    store.create_layer("demo", Geographic{},
                       {ColumnDef{"title", ColType::Char, 24, 0}});
    store.put("demo", "03/T/1111/20", square_geometry(-6.0, 33.0, 0.01),
              {std::string("03/T/1111/20")});
    auto snapshot = store.snapshot();
    const Layer& parcels = *snapshot->layers.at("parcels");

    QueryService service(snapshot);
    const int port = service.start("127.0.0.1", 0);
    require(port > 0, "service must bind an ephemeral port");

    const Envelope extent = [&] {
        Envelope e{1e18, 1e18, -1e18, -1e18};
        for (const auto& [id, f] : parcels.features) e.expand(f.geometry.envelope());
        return e;
    }();

    std::mt19937 rng(88);
    std::uniform_real_distribution<double> ux(extent.min_x - 1000, extent.max_x + 1000);
    std::uniform_real_distribution<double> uy(extent.min_y - 1000, extent.max_y + 1000);

    // probe URLs + expected id sets from the in-process library
    std::vector<std::string> urls;
    std::vector<std::vector<std::string>> expected;
    char buf[256];
    for (int i = 0; i < 100; ++i) {
        double x1 = ux(rng), x2 = ux(rng), y1 = uy(rng), y2 = uy(rng);
        if (x1 > x2) std::swap(x1, x2);
        if (y1 > y2) std::swap(y1, y2);
        std::snprintf(buf, sizeof(buf), "/parcels?layer=parcels&bbox=%.6f,%.6f,%.6f,%.6f&limit=10000",
                      x1, y1, x2, y2);
        urls.push_back(buf);
        expected.push_back(layer_bbox_query(parcels, {x1, y1, x2, y2}));
    }

    std::vector<std::pair<std::string, std::vector<std::string>>> posts;
    for (int i = 0; i < 50; ++i) {
        const double cx = ux(rng), cy = uy(rng);
        std::uniform_real_distribution<double> radius(200.0, 4000.0);
        std::mt19937 star_rng(1000 + i);
        const PolygonSet probe = star_region(star_rng, {cx, cy}, radius(rng) / 2,
                                             radius(rng), 6 + static_cast<int>(rng() % 6));
        const std::string wkt = to_wkt(Geometry::region(probe), 17);
        const char* pred_name = i % 3 == 0 ? "intersects" : (i % 3 == 1 ? "within" : "contains");
        const SpatialPredicate pred = *spatial_predicate_from_name(pred_name);
        posts.push_back({nlohmann::json{{"layer", "parcels"},
                                        {"predicate", pred_name},
                                        {"wkt", wkt}}
                             .dump(),
                         select_features(parcels, std::nullopt,
                                         std::make_pair(pred, Geometry::region(probe)))});
    }

    auto ids_of = [](const std::string& body) {
        std::vector<std::string> ids;
        const auto j = nlohmann::json::parse(body);
        for (const auto& f : j["features"]) ids.push_back(f["id"].get<std::string>());
        return ids;
    };

    auto run_probes = [&](int& mismatches) {
        httplib::Client client("127.0.0.1", port);
        client.set_read_timeout(30, 0);
        client.set_connection_timeout(30, 0);
        client.set_keep_alive(true);
        for (std::size_t i = 0; i < urls.size(); ++i) {
            auto res = client.Get(urls[i].c_str());
            if (!res || res->status != 200 || ids_of(res->body) != expected[i]) ++mismatches;
        }
        for (std::size_t i = 0; i < posts.size(); ++i) {
            auto res = client.Post("/query", posts[i].first, "application/json");
            if (!res || res->status != 200 || ids_of(res->body) != posts[i].second)
                ++mismatches;
        }
        for (const char* spelling : {"T1111/20", "T/1111/20", "03/T/1111/20"}) {
            auto res = client.Get(
                ("/parcels?layer=demo&title=" + httplib::detail::encode_url(spelling)).c_str());
            if (!res || res->status != 200 ||
                nlohmann::json::parse(res->body)["id"] != "03/T/1111/20")
                ++mismatches;
        }
    };

    int sequential_mismatches = 0;
    run_probes(sequential_mismatches);
    require(sequential_mismatches == 0, "sequential HTTP results must equal library results");

    std::vector<std::thread> clients;
    std::vector<int> mismatch_counts(32, 0);
    for (int t = 0; t < 32; ++t)
        clients.emplace_back([&, t] { run_probes(mismatch_counts[static_cast<std::size_t>(t)]); });
    for (auto& th : clients) th.join();
    service.stop();
    for (int m : mismatch_counts)
        require(m == 0, "concurrent HTTP results must equal library results");
}

struct Criterion {
    int number;
    const char* name;
    double limit_seconds;
    std::function<void()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "land-title conversion suite", 1.0, criterion_titles},
        {2, "MIF/MID round trip", 5.0, criterion_mif_roundtrip},
        {3, "boolean operation oracle", 60.0, criterion_boolean_oracle},
        {4, "buffer analytics", 1.0, criterion_buffer},
        {5, "projection and affine fitting", 2.0, criterion_projection},
        {6, "spatial index correctness", 30.0, criterion_index},
        {7, "end-to-end migration", 30.0, criterion_migration},
        {8, "service equivalence", 30.0, criterion_service},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string failure;
        try {
            criterion.run();
        } catch (const std::exception& e) {
            failure = e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (failure.empty() && seconds > criterion.limit_seconds)
            failure = "runtime " + std::to_string(seconds) + "s exceeds " +
                      std::to_string(criterion.limit_seconds) + "s";
        if (failure.empty()) {
            std::printf("[PASS] criterion %d: %s (%.2fs)\n", criterion.number, criterion.name,
                        seconds);
        } else {
            ++failed;
            std::printf("[FAIL] criterion %d: %s (%.2fs) - %s\n", criterion.number,
                        criterion.name, seconds, failure.c_str());
        }
        std::fflush(stdout);
    }
    if (failed) std::printf("%d criterion(s) failed\n", failed);
    return failed == 0 ? 0 : 1;
}
