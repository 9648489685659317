#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gspcd/cda.hpp"
#include "gspcd/eval.hpp"
#include "gspcd/gsp.hpp"
#include "gspcd/synth.hpp"
#include "support/oracles.hpp"

using namespace gspcd;

TEST_CASE("generate is deterministic for a fixed seed", "[synth]") {
    const SynthConfig config = SynthConfig::default_scenario(9);
    const SynthScene a = generate(config);
    const SynthScene b = generate(config);
    REQUIRE(a.stack.size() == b.stack.size());
    for (std::size_t i = 0; i < a.stack.size(); ++i) {
        const auto pa = a.stack[i].pixels();
        const auto pb = b.stack[i].pixels();
        bool identical = true;
        for (std::size_t j = 0; j < pa.size(); ++j)
            if (pa[j] != pb[j]) {
                identical = false;
                break;
            }
        CHECK(identical);
    }
    // different seeds give a different scene
    const SynthScene c = generate(SynthConfig::default_scenario(10));
    bool any_differs = false;
    for (std::size_t j = 0; j < c.stack[0].pixels().size(); ++j)
        if (c.stack[0].pixels()[j] != a.stack[0].pixels()[j]) {
            any_differs = true;
            break;
        }
    CHECK(any_differs);
}

TEST_CASE("jitter-free, target-free stacks collapse to the clutter field",
          "[synth]") {
    SynthConfig config;
    config.rows = 40;
    config.cols = 30;
    config.n_images = 4;
    config.seed = 3;
    config.temporal_jitter_std = 0.0;
    const SynthScene scene = generate(config);
    for (std::size_t i = 0; i < scene.stack.size(); ++i) {
        const auto px = scene.stack[i].pixels();
        const auto cl = scene.clutter.pixels();
        for (std::size_t j = 0; j < px.size(); ++j) CHECK(px[j] == cl[j]);
    }
    // median GSP of identical images reproduces the image exactly
    const Image gsp = predict_scene(scene.stack, EstimatorKind::median());
    const auto gp = gsp.pixels();
    const auto cp = scene.clutter.pixels();
    for (std::size_t j = 0; j < gp.size(); ++j) CHECK(gp[j] == cp[j]);
}

TEST_CASE("scene amplitudes are non-negative and clutter-calibrated", "[synth]") {
    const SynthScene scene = generate(SynthConfig::default_scenario(21));
    for (std::size_t i = 0; i < scene.stack.size(); ++i)
        for (float v : scene.stack[i].pixels()) CHECK(v >= 0.0f);

    const auto ms = oracles::direct_mean_std(scene.clutter.pixels());
    CHECK(ms.mean == Catch::Approx(0.14).margin(0.01));
    CHECK(ms.std_dev == Catch::Approx(0.07).margin(0.01));
}

TEST_CASE("jitter magnitude stays near the configured deviation", "[synth]") {
    SynthConfig config;
    config.rows = 60;
    config.cols = 50;
    config.n_images = 8;
    config.seed = 17;
    const SynthScene scene = generate(config);
    // average per-pixel sample std across clutter-only pixels
    double acc = 0.0;
    std::size_t n = 0;
    for (int r = 0; r < config.rows; r += 3) {
        for (int c = 0; c < config.cols; c += 3) {
            const PixelSeries series = extract_series(scene.stack, r, c);
            const double mean = mean_estimate(series);
            double ss = 0.0;
            for (double v : series) ss += (v - mean) * (v - mean);
            acc += std::sqrt(ss / (series.size() - 1));
            ++n;
        }
    }
    const double avg_std = acc / static_cast<double>(n);
    CHECK(avg_std <= config.temporal_jitter_std * 1.05);
    CHECK(avg_std >= config.temporal_jitter_std * 0.5);
}

TEST_CASE("targets appear only in their designated images", "[synth]") {
    SynthConfig config;
    config.rows = 50;
    config.cols = 50;
    config.n_images = 8;
    config.seed = 11;
    config.targets.push_back({2, 25.0, 25.0, 6, 0.5});
    config.targets.push_back({5, 25.0, 25.0, 6, 0.5});
    const SynthScene scene = generate(config);

    CHECK(scene.targets_per_image[2].size() == 1);
    CHECK(scene.targets_per_image[5].size() == 1);
    CHECK(scene.targets_per_image[0].empty());

    const PixelSeries series = extract_series(scene.stack, 25, 25);
    int boosted = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double base = scene.clutter.at(25, 25);
        if (series[i] > base + 0.25) ++boosted;
    }
    CHECK(boosted == 2);
    CHECK(series[2] > series[0] + 0.4);
    CHECK(series[5] > series[0] + 0.4);
}

TEST_CASE("config validation", "[synth]") {
    SynthConfig config;
    config.rows = 0;
    config.cols = 10;
    CHECK_THROWS_AS(generate(config), ArgumentError);

    config.rows = 10;
    config.n_images = 1;
    CHECK_THROWS_AS(generate(config), ArgumentError);

    config.n_images = 4;
    config.targets.push_back({4, 5.0, 5.0, 6, 0.5});  // image index out of range
    CHECK_THROWS_AS(generate(config), ArgumentError);

    config.targets[0] = {0, 50.0, 5.0, 6, 0.5};  // row out of bounds
    CHECK_THROWS_AS(generate(config), ArgumentError);

    config.targets[0] = {0, 5.0, 5.0, 0, 0.5};  // bad size
    CHECK_THROWS_AS(generate(config), ArgumentError);

    config.targets[0] = {0, 5.0, 5.0, 6, 0.0};  // bad boost
    CHECK_THROWS_AS(generate(config), ArgumentError);
}

TEST_CASE("five-target scene detects end to end", "[synth]") {
    SynthConfig config;
    config.rows = 300;
    config.cols = 200;
    config.n_images = 8;
    config.seed = 1;
    for (int i = 0; i < 5; ++i)
        config.targets.push_back({0, 40.0 + 50.0 * i, 100.0, 10, 0.5});
    const SynthScene scene = generate(config);

    const Image reference = predict_scene(scene.stack, EstimatorKind::median());
    CdaParams params;
    params.c_constant = 5.0;
    const auto dets = detect(scene.stack[0], reference, params);
    const MatchResult mr = match(dets, scene.targets_per_image[0], 10.0);
    CHECK(mr.matched_pairs.size() >= 4);
    CHECK(mr.false_alarms.empty());
}
