#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gspcd/eval.hpp"
#include "gspcd/synth.hpp"
#include "support/oracles.hpp"

using namespace gspcd;

namespace {

Detection at(double row, double col) {
    Detection d;
    d.centroid_row = row;
    d.centroid_col = col;
    d.pixel_count = 1;
    d.min_row = static_cast<int>(row);
    d.min_col = static_cast<int>(col);
    d.max_row = static_cast<int>(row) + 1;
    d.max_col = static_cast<int>(col) + 1;
    return d;
}

// Exhaustive assignment maximizing matches, then minimizing total distance;
// feasible for the tiny instances used here.
int optimal_match_count(const std::vector<Detection>& dets,
                        const std::vector<Target>& targets, double radius) {
    std::vector<std::size_t> det_order(dets.size());
    for (std::size_t i = 0; i < det_order.size(); ++i) det_order[i] = i;
    int best = 0;
    std::vector<bool> used(targets.size(), false);
    const auto recurse = [&](auto&& self, std::size_t di, int matched) -> void {
        best = std::max(best, matched);
        if (di == dets.size()) return;
        self(self, di + 1, matched);  // leave detection di unmatched
        for (std::size_t ti = 0; ti < targets.size(); ++ti) {
            if (used[ti]) continue;
            const double dr = dets[di].centroid_row - targets[ti].row;
            const double dc = dets[di].centroid_col - targets[ti].col;
            if (std::sqrt(dr * dr + dc * dc) > radius) continue;
            used[ti] = true;
            self(self, di + 1, matched + 1);
            used[ti] = false;
        }
    };
    recurse(recurse, 0, 0);
    return best;
}

}  // namespace

TEST_CASE("match pairs detections with targets greedily", "[eval]") {
    SECTION("single pair within radius") {
        const std::vector<Detection> dets{at(10, 10)};
        const std::vector<Target> targets{{"t1", 12.0, 12.0}};
        const MatchResult mr = match(dets, targets, 10.0);
        REQUIRE(mr.matched_pairs.size() == 1);
        CHECK(mr.matched_pairs[0].target_id == "t1");
        CHECK(mr.matched_pairs[0].detection_index == 0);
        CHECK(mr.matched_pairs[0].distance_px ==
              Catch::Approx(std::sqrt(8.0)).margin(1e-12));
        CHECK(mr.missed_targets.empty());
        CHECK(mr.false_alarms.empty());
    }

    SECTION("no detections leaves every target missed") {
        std::vector<Target> targets;
        for (int i = 0; i < 25; ++i)
            targets.push_back({"t" + std::to_string(i), i * 10.0, 5.0});
        const MatchResult mr = match({}, targets, 10.0);
        CHECK(mr.matched_pairs.empty());
        CHECK(mr.missed_targets.size() == 25);
    }

    SECTION("nearest detection wins, the other is a false alarm") {
        const std::vector<Detection> dets{at(10, 10), at(13, 13)};
        const std::vector<Target> targets{{"t1", 12.0, 12.0}};
        const MatchResult mr = match(dets, targets, 10.0);
        REQUIRE(mr.matched_pairs.size() == 1);
        CHECK(mr.matched_pairs[0].detection_index == 1);  // distance sqrt(2) < sqrt(8)
        REQUIRE(mr.false_alarms.size() == 1);
        CHECK(mr.false_alarms[0] == 0);
        CHECK(static_cast<int>(mr.matched_pairs.size()) ==
              optimal_match_count(dets, targets, 10.0));
    }

    SECTION("beyond-radius pairs are rejected") {
        const MatchResult mr =
            match(std::vector<Detection>{at(0, 0)},
                  std::vector<Target>{{"t1", 50.0, 50.0}}, 10.0);
        CHECK(mr.matched_pairs.empty());
        CHECK(mr.missed_targets == std::vector<std::string>{"t1"});
        CHECK(mr.false_alarms == std::vector<std::size_t>{0});
    }

    SECTION("equal distances break toward the lower target id") {
        const std::vector<Detection> dets{at(10, 10)};
        const std::vector<Target> targets{{"b", 10.0, 14.0}, {"a", 10.0, 6.0}};
        const MatchResult mr = match(dets, targets, 10.0);
        REQUIRE(mr.matched_pairs.size() == 1);
        CHECK(mr.matched_pairs[0].target_id == "a");
    }

    SECTION("radius must be positive") {
        CHECK_THROWS_AS(match({}, {}, 0.0), ArgumentError);
    }

    SECTION("one-to-one on random instances, greedy equals optimal when sparse") {
        std::mt19937 rng(139);
        std::uniform_real_distribution<double> pos(0.0, 100.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Target> targets;
            for (int i = 0; i < 5; ++i)
                targets.push_back({"t" + std::to_string(i), pos(rng), pos(rng)});
            std::vector<Detection> dets;
            for (int i = 0; i < 6; ++i) dets.push_back(at(pos(rng), pos(rng)));
            const MatchResult mr = match(dets, targets, 15.0);
            CHECK(mr.matched_pairs.size() <= std::min(dets.size(), targets.size()));
            CHECK(mr.matched_pairs.size() + mr.missed_targets.size() ==
                  targets.size());
            CHECK(mr.matched_pairs.size() + mr.false_alarms.size() == dets.size());
            for (const auto& p : mr.matched_pairs)
                CHECK(p.distance_px <= 15.0);
        }
    }
}

TEST_CASE("score computes Pd and FAR", "[eval]") {
    SECTION("full-scale totals") {
        MatchResult mr;
        for (int i = 0; i < 579; ++i)
            mr.matched_pairs.push_back({"t" + std::to_string(i),
                                        static_cast<std::size_t>(i), 1.0});
        for (int i = 0; i < 22; ++i)
            mr.false_alarms.push_back(static_cast<std::size_t>(579 + i));
        const Score s = score(mr, 600, 144.0);
        CHECK(s.pd == Catch::Approx(0.965).margin(1e-12));
        CHECK(s.far == Catch::Approx(22.0 / 144.0).margin(1e-12));
        CHECK(s.far == Catch::Approx(0.1528).margin(1e-4));
    }

    SECTION("zero matches") {
        CHECK(score(MatchResult{}, 25, 6.0).pd == 0.0);
    }

    SECTION("perfect case") {
        MatchResult mr;
        for (int i = 0; i < 25; ++i)
            mr.matched_pairs.push_back({"t" + std::to_string(i),
                                        static_cast<std::size_t>(i), 0.5});
        const Score s = score(mr, 25, 6.0);
        CHECK(s.pd == 1.0);
        CHECK(s.far == 0.0);
    }

    SECTION("scale consistency") {
        MatchResult mr;
        mr.false_alarms = {0, 1, 2};
        const Score a = score(mr, 10, 6.0);
        MatchResult doubled;
        doubled.false_alarms = {0, 1, 2, 3, 4, 5};
        const Score b = score(doubled, 10, 12.0);
        CHECK(a.far == b.far);
    }

    SECTION("preconditions") {
        CHECK_THROWS_AS(score(MatchResult{}, 0, 6.0), ArgumentError);
        CHECK_THROWS_AS(score(MatchResult{}, 10, 0.0), ArgumentError);
    }
}

TEST_CASE("roc_sweep aggregates a C sweep over cases", "[eval]") {
    // small synthetic case: clutter stack plus boosted targets in image 0
    SynthConfig config;
    config.rows = 80;
    config.cols = 60;
    config.n_images = 6;
    config.seed = 5;
    for (int i = 0; i < 3; ++i)
        config.targets.push_back({0, 15.0 + 22.0 * i, 30.0, 5, 0.5});
    const SynthScene scene = generate(config);

    std::vector<EvalCase> cases;
    cases.push_back(EvalCase{scene.stack[0], scene.clutter,
                             scene.targets_per_image[0]});

    const std::vector<double> cs{2, 3, 4, 5, 6};
    CdaParams params;

    SECTION("five rows with non-increasing false alarms") {
        const RocTable table = roc_sweep(cases, cs, params, 10.0, 0.03);
        REQUIRE(table.rows.size() == 5);
        for (std::size_t i = 0; i < 5; ++i) {
            const RocRow& row = table.rows[i];
            CHECK(row.c_constant == cs[i]);
            CHECK(row.known == 3);
            CHECK(row.pd ==
                  Catch::Approx(static_cast<double>(row.detected) / row.known)
                      .margin(1e-15));
            CHECK(row.far ==
                  Catch::Approx(static_cast<double>(row.false_alarms) /
                                row.area_km2)
                      .margin(1e-15));
            CHECK(row.pd >= 0.0);
            CHECK(row.pd <= 1.0);
            if (i > 0)
                CHECK(row.false_alarms <= table.rows[i - 1].false_alarms);
        }
    }

    SECTION("empty inputs rejected") {
        CHECK_THROWS_AS(roc_sweep({}, cs, params, 10.0, 1.0), ArgumentError);
        CHECK_THROWS_AS(roc_sweep(cases, {}, params, 10.0, 1.0), ArgumentError);
        CHECK_THROWS_AS(roc_sweep(cases, cs, params, 10.0, 0.0), ArgumentError);
    }

    SECTION("aggregation across identical cases scales the counts") {
        std::vector<EvalCase> two(2, cases[0]);
        const RocTable one = roc_sweep(cases, cs, params, 10.0, 0.03);
        const RocTable both = roc_sweep(two, cs, params, 10.0, 0.03);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(both.rows[i].known == 2 * one.rows[i].known);
            CHECK(both.rows[i].detected == 2 * one.rows[i].detected);
            CHECK(both.rows[i].false_alarms == 2 * one.rows[i].false_alarms);
            CHECK(both.rows[i].pd == Catch::Approx(one.rows[i].pd).margin(1e-15));
            CHECK(both.rows[i].far == Catch::Approx(one.rows[i].far).margin(1e-12));
        }
    }
}
