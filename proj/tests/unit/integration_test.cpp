#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "helpers.hpp"
#include "integration.hpp"

using namespace pforge;
using namespace testutil;

TEST_SUITE_BEGIN("integration");

namespace {

GraphicRecord graphic(const std::string& source, std::int64_t fid, const std::string& title,
                      double x = 0.0) {
    return {source, fid, title, square_geometry(x, 0, 1)};
}

AlphaRecord alpha(const std::string& source, std::int64_t rid, const std::string& title,
                  NamedAttrs attrs = {}) {
    return {source, rid, title, std::move(attrs)};
}

std::size_t count_kind(const MergeResult& r, AnomalyKind kind) {
    return static_cast<std::size_t>(
        std::count_if(r.anomalies.begin(), r.anomalies.end(),
                      [kind](const Anomaly& a) { return a.kind == kind; }));
}

}  // namespace

TEST_CASE("the published cross-format pair joins into one parcel") {
    const std::vector<GraphicRecord> gs{graphic("plan", 1, "T1111/20")};
    const std::vector<AlphaRecord> as{alpha("ledger", 1, "03/T/1111/20",
                                            {{"owner", AttrValue{std::string("x")}}})};
    const MergeResult r = merge_sources(gs, as, {});
    REQUIRE(r.parcels.size() == 1);
    CHECK(r.anomalies.empty());
    REQUIRE(r.parcels[0].key.conservation);
    CHECK(*r.parcels[0].key.conservation == "03");
    CHECK(canonical_key(r.parcels[0].key) == "03/T/1111/20");
    CHECK(r.parcels[0].graphic_source == "plan");
    CHECK(r.parcels[0].alpha_source == "ledger");
}

TEST_CASE("a graphic without attributes is an orphan") {
    const std::vector<GraphicRecord> gs{graphic("plan", 1, "T5/1")};
    const MergeResult r = merge_sources(gs, {}, {});
    CHECK(r.parcels.empty());
    REQUIRE(r.anomalies.size() == 1);
    CHECK(r.anomalies[0].kind == AnomalyKind::OrphanGeometry);
    CHECK(r.anomalies[0].refs == std::vector<std::string>{"graphic:plan:1"});
}

TEST_CASE("duplicate graphics under RejectBoth drop the bucket") {
    // derived by enumerating the bucket state machine: both graphics are
    // rejected, so the alpha side has nothing left to join
    const std::vector<GraphicRecord> gs{graphic("a", 1, "T7/1"), graphic("b", 2, "T7/1")};
    const std::vector<AlphaRecord> as{alpha("l", 1, "T7/1")};
    MergePolicy policy;
    policy.duplicates = DuplicatePolicy::RejectBoth;
    const MergeResult r = merge_sources(gs, as, policy);
    CHECK(r.parcels.empty());
    CHECK(count_kind(r, AnomalyKind::DuplicateGeometry) == 1);
    CHECK(count_kind(r, AnomalyKind::OrphanAttributes) == 1);
    // both rejected records are cited
    for (const auto& a : r.anomalies) {
        if (a.kind == AnomalyKind::DuplicateGeometry) {
            CHECK(a.refs.size() == 2);
        }
    }
}

TEST_CASE("duplicate graphics under FirstWins keep the priority winner") {
    const std::vector<GraphicRecord> gs{graphic("b", 7, "T7/1", 5.0),
                                        graphic("a", 2, "T7/1", 1.0)};
    const std::vector<AlphaRecord> as{alpha("l", 1, "T/7/1")};
    MergePolicy policy;
    policy.source_priority = {"a", "b", "l"};
    const MergeResult r = merge_sources(gs, as, policy);
    REQUIRE(r.parcels.size() == 1);
    CHECK(r.parcels[0].graphic_source == "a");  // priority order, not input order
    CHECK(count_kind(r, AnomalyKind::DuplicateGeometry) == 1);
    const auto& dup = *std::find_if(r.anomalies.begin(), r.anomalies.end(),
                                    [](const Anomaly& a) {
                                        return a.kind == AnomalyKind::DuplicateGeometry;
                                    });
    CHECK(dup.refs == std::vector<std::string>{"graphic:b:7"});
}

TEST_CASE("conservation conflict is reported but the merge proceeds") {
    const std::vector<GraphicRecord> gs{graphic("plan", 1, "03/T/9/1")};
    const std::vector<AlphaRecord> as{alpha("ledger", 1, "05/T/9/1")};
    const MergeResult r = merge_sources(gs, as, {});
    REQUIRE(r.parcels.size() == 1);
    CHECK(*r.parcels[0].key.conservation == "03");  // graphic side wins
    CHECK(count_kind(r, AnomalyKind::ConservationConflict) == 1);
}

TEST_CASE("area mismatch flags but still emits the parcel") {
    MergePolicy policy;
    policy.area_attribute = "surface";
    const std::vector<GraphicRecord> gs{graphic("plan", 1, "T9/1")};  // unit square, area 1

    SUBCASE("declared far off") {
        const std::vector<AlphaRecord> as{
            alpha("l", 1, "T9/1", {{"surface", AttrValue{2.0}}})};
        const MergeResult r = merge_sources(gs, as, policy);
        CHECK(r.parcels.size() == 1);
        CHECK(count_kind(r, AnomalyKind::AreaMismatch) == 1);
    }
    SUBCASE("declared within tolerance") {
        const std::vector<AlphaRecord> as{
            alpha("l", 1, "T9/1", {{"surface", AttrValue{1.03}}})};
        const MergeResult r = merge_sources(gs, as, policy);
        CHECK(r.parcels.size() == 1);
        CHECK(count_kind(r, AnomalyKind::AreaMismatch) == 0);
    }
}

TEST_CASE("unparseable titles become anomalies, not failures") {
    const std::vector<GraphicRecord> gs{graphic("plan", 1, "not a title")};
    const std::vector<AlphaRecord> as{alpha("l", 1, "")};
    const MergeResult r = merge_sources(gs, as, {});
    CHECK(r.parcels.empty());
    CHECK(count_kind(r, AnomalyKind::TitleParseFailure) == 2);
}

namespace {

struct RandomInputs {
    std::vector<GraphicRecord> graphics;
    std::vector<AlphaRecord> alphas;
};

RandomInputs random_inputs(std::mt19937& rng, int cores) {
    RandomInputs out;
    std::int64_t gid = 0, aid = 0;
    for (int i = 0; i < cores; ++i) {
        const std::string title = "T" + std::to_string(100 + i) + "/1";
        const int n_graphics = static_cast<int>(rng() % 3);  // 0..2
        const int n_alphas = static_cast<int>(rng() % 3);
        for (int g = 0; g < n_graphics; ++g)
            out.graphics.push_back(graphic(g % 2 ? "g2" : "g1", ++gid, title));
        for (int a = 0; a < n_alphas; ++a)
            out.alphas.push_back(alpha(a % 2 ? "a2" : "a1", ++aid, title));
    }
    // sprinkle unparseable titles
    out.graphics.push_back(graphic("g1", ++gid, "///"));
    out.alphas.push_back(alpha("a1", ++aid, "junk"));
    return out;
}

}  // namespace

TEST_CASE("every record lands in exactly one parcel or terminal anomaly") {
    std::mt19937 rng(93);
    for (int round = 0; round < 20; ++round) {
        const RandomInputs in = random_inputs(rng, 40);
        for (const auto policy_kind : {DuplicatePolicy::FirstWins, DuplicatePolicy::RejectBoth}) {
            MergePolicy policy;
            policy.duplicates = policy_kind;
            const MergeResult r = merge_sources(in.graphics, in.alphas, policy);

            std::multiset<std::string> seen;
            for (const auto& p : r.parcels) {
                seen.insert("graphic:" + p.graphic_source + ":" +
                            std::to_string(p.graphic_feature));
                seen.insert("alpha:" + p.alpha_source + ":" + std::to_string(p.alpha_row));
            }
            for (const auto& a : r.anomalies) {
                if (a.kind == AnomalyKind::ConservationConflict ||
                    a.kind == AnomalyKind::AreaMismatch)
                    continue;  // advisory: they cite records already in parcels
                for (const auto& ref : a.refs) seen.insert(ref);
            }
            std::multiset<std::string> expected;
            for (const auto& g : in.graphics) expected.insert(graphic_ref(g));
            for (const auto& a : in.alphas) expected.insert(alpha_ref(a));
            CHECK(seen == expected);
        }
    }
}

TEST_CASE("output is deterministic and independent of input order") {
    std::mt19937 rng(171);
    const RandomInputs in = random_inputs(rng, 60);
    MergePolicy policy;
    policy.source_priority = {"g1", "g2", "a1", "a2"};
    const MergeResult base = merge_sources(in.graphics, in.alphas, policy);

    for (int round = 0; round < 5; ++round) {
        RandomInputs shuffled = in;
        std::shuffle(shuffled.graphics.begin(), shuffled.graphics.end(), rng);
        std::shuffle(shuffled.alphas.begin(), shuffled.alphas.end(), rng);
        const MergeResult again = merge_sources(shuffled.graphics, shuffled.alphas, policy);
        REQUIRE(again.parcels.size() == base.parcels.size());
        for (std::size_t i = 0; i < base.parcels.size(); ++i) {
            CHECK(canonical_key(again.parcels[i].key) == canonical_key(base.parcels[i].key));
            CHECK(again.parcels[i].graphic_source == base.parcels[i].graphic_source);
            CHECK(again.parcels[i].graphic_feature == base.parcels[i].graphic_feature);
            CHECK(again.parcels[i].alpha_row == base.parcels[i].alpha_row);
        }
        REQUIRE(again.anomalies.size() == base.anomalies.size());
        for (std::size_t i = 0; i < base.anomalies.size(); ++i) {
            CHECK(again.anomalies[i].kind == base.anomalies[i].kind);
            CHECK(again.anomalies[i].refs == base.anomalies[i].refs);
        }
    }
}

TEST_CASE("merge equals a brute-force join on small inputs") {
    std::mt19937 rng(404);
    const RandomInputs in = random_inputs(rng, 50);
    MergePolicy policy;  // FirstWins, priority = unlisted (source then id)
    const MergeResult r = merge_sources(in.graphics, in.alphas, policy);

    // independent reference: nested loops over parseable records
    std::map<std::string, std::vector<const GraphicRecord*>> by_core_g;
    std::map<std::string, std::vector<const AlphaRecord*>> by_core_a;
    for (const auto& g : in.graphics) {
        try {
            by_core_g[canonical_core(parse_title(g.raw_title).first)].push_back(&g);
        } catch (const Error&) {
        }
    }
    for (const auto& a : in.alphas) {
        try {
            by_core_a[canonical_core(parse_title(a.raw_title).first)].push_back(&a);
        } catch (const Error&) {
        }
    }
    std::set<std::pair<std::string, std::string>> expected_pairs;
    for (const auto& [core, gs] : by_core_g) {
        const auto it = by_core_a.find(core);
        if (it == by_core_a.end()) continue;
        // FirstWins winner: smallest (source, id) since no priority list
        const GraphicRecord* gw = *std::min_element(
            gs.begin(), gs.end(), [](const GraphicRecord* x, const GraphicRecord* y) {
                if (x->source_id != y->source_id) return x->source_id < y->source_id;
                return x->feature_id < y->feature_id;
            });
        const AlphaRecord* aw = *std::min_element(
            it->second.begin(), it->second.end(),
            [](const AlphaRecord* x, const AlphaRecord* y) {
                if (x->source_id != y->source_id) return x->source_id < y->source_id;
                return x->row_id < y->row_id;
            });
        expected_pairs.insert({graphic_ref(*gw), alpha_ref(*aw)});
    }
    std::set<std::pair<std::string, std::string>> got_pairs;
    for (const auto& p : r.parcels)
        got_pairs.insert({"graphic:" + p.graphic_source + ":" + std::to_string(p.graphic_feature),
                          "alpha:" + p.alpha_source + ":" + std::to_string(p.alpha_row)});
    CHECK(got_pairs == expected_pairs);
}

TEST_CASE("csv loading") {
    SUBCASE("two plain rows") {
        const auto records =
            load_alpha_csv("titre,owner\nT1/1,alice\nT2/1,bob\n", "src", "titre");
        REQUIRE(records.size() == 2);
        CHECK(records[0].raw_title == "T1/1");
        CHECK(records[1].raw_title == "T2/1");
        CHECK(records[0].row_id == 1);
        CHECK(std::get<std::string>(records[0].attributes[0].second) == "alice");
    }
    SUBCASE("quoted field with embedded comma and newline") {
        const auto records = load_alpha_csv(
            "titre,address\nT1/1,\"Rabat, quartier\nadministratif\"\n", "src", "titre");
        REQUIRE(records.size() == 1);
        CHECK(std::get<std::string>(records[0].attributes[0].second) ==
              "Rabat, quartier\nadministratif");
    }
    SUBCASE("header only is empty") {
        CHECK(load_alpha_csv("titre,owner\n", "src", "titre").empty());
    }
    SUBCASE("numeric coercion") {
        const auto records =
            load_alpha_csv("titre,n,x,s,e\nT1/1,42,3.5,text,\n", "src", "titre");
        REQUIRE(records.size() == 1);
        CHECK(std::get<std::int64_t>(records[0].attributes[0].second) == 42);
        CHECK(std::get<double>(records[0].attributes[1].second) == 3.5);
        CHECK(std::get<std::string>(records[0].attributes[2].second) == "text");
        CHECK(is_null(records[0].attributes[3].second));
    }
    SUBCASE("missing title column") {
        try {
            load_alpha_csv("a,b\n1,2\n", "src", "titre");
            FAIL("expected MissingColumn");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::MissingColumn);
        }
    }
    SUBCASE("ragged rows are syntax errors") {
        try {
            load_alpha_csv("a,b\n1\n", "src", "a");
            FAIL("expected CsvSyntax");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::CsvSyntax);
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("unterminated quote") {
        CHECK_THROWS_AS(load_alpha_csv("a\n\"oops\n", "src", "a"), Error);
    }
}

TEST_SUITE_END();
