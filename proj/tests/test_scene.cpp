// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "mvprune/scene.hpp"
#include "mvprune/tfps.hpp"

using namespace mvprune;
using mvprune::testing::rows;

namespace {

SceneConfig small_config(std::vector<Index> clusters, Index tokens = 64) {
    SceneConfig cfg;
    cfg.labels.resize(clusters.size(), ViewLabel::Kind::Front);
    for (std::size_t v = 0; v < clusters.size(); ++v) cfg.labels[v] = standard_labels()[v];
    cfg.clusters_per_view = std::move(clusters);
    cfg.view_weights.assign(cfg.labels.size(), 1.0 / static_cast<double>(cfg.labels.size()));
    cfg.tokens_per_view = tokens;
    cfg.dim = 16;
    return cfg;
}

ViewSelection keep(const View& view, std::vector<Index> kept) {
    ViewSelection s{view.label, static_cast<Index>(view.tokens.rows()), kept, kept};
    return s;
}

}  // namespace

TEST_CASE("scene generation is deterministic in config and seed") {
    const SceneConfig cfg;
    const Scene a = generate_scene(cfg, 7);
    const Scene b = generate_scene(cfg, 7);
    const Scene c = generate_scene(cfg, 8);
    REQUIRE(a.views.size() == 6);
    for (std::size_t v = 0; v < 6; ++v) {
        CHECK(a.views.views[v].tokens == b.views.views[v].tokens);
        CHECK(a.truth.members[v] == b.truth.members[v]);
        CHECK(a.views.views[v].tokens.rows() == 256);
        CHECK(a.views.views[v].tokens.cols() == 32);
        CHECK(a.truth.centers[v].rows() == static_cast<Eigen::Index>(cfg.clusters_per_view[v]));
    }
    CHECK_FALSE(a.views.views[0].tokens == c.views.views[0].tokens);
    CHECK_NOTHROW(validate_viewset(a.views));
}

TEST_CASE("cluster membership counts") {
    // ceil(4 / (4 * 1)) = 1 member; ceil(256 / 48) = 6 members per cluster for 12 clusters.
    const Scene tiny = generate_scene(small_config({1}, 4), 3);
    REQUIRE(tiny.truth.members[0].size() == 1);
    CHECK(tiny.truth.members[0][0].size() == 1);

    const Scene full = generate_scene(SceneConfig{}, 3);
    for (const auto& m : full.truth.members[0]) CHECK(m.size() == 6);
    // Members are distinct tokens.
    std::vector<Index> all;
    for (const auto& m : full.truth.members[0]) all.insert(all.end(), m.begin(), m.end());
    std::sort(all.begin(), all.end());
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
    CHECK(all.size() == 72);
}

TEST_CASE("invalid scene configurations are rejected") {
    SceneConfig cfg;
    cfg.view_weights.pop_back();
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = SceneConfig{};
    cfg.clusters_per_view[0] = 300;
    CHECK_THROWS_AS(generate_scene(cfg, 1), Error);
    cfg = SceneConfig{};
    cfg.cover_radius = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("coverage reward on a hand-built scene") {
    ViewTokenSet vs;
    vs.views.push_back({ViewLabel::Kind::Front, rows({{1.f, 0.f}, {0.f, 1.f}, {-1.f, 0.f}})});
    vs.views.push_back({ViewLabel::Kind::Back, rows({{1.f, 0.f}, {0.f, -1.f}})});
    SceneTruth truth;
    truth.centers = {Eigen::MatrixXd(2, 2), Eigen::MatrixXd(1, 2)};
    truth.centers[0] << 1, 0, 0, 1;
    truth.centers[1] << 0, -1;
    truth.view_weights = {0.5, 0.5};
    truth.cover_radius = 0.15;

    Selection sel;
    sel.views = {keep(vs.views[0], {0, 2}), keep(vs.views[1], {1})};
    // View 0 sees one of two clusters, view 1 sees its only cluster: 0.5 * 0.5 + 0.5 * 1.
    CHECK(coverage_reward(sel, truth, vs) == doctest::Approx(0.75));

    sel.views = {keep(vs.views[0], {0, 1, 2}), keep(vs.views[1], {0, 1})};
    CHECK(coverage_reward(sel, truth, vs) == doctest::Approx(1.0));

    sel.views = {keep(vs.views[0], {2}), keep(vs.views[1], {0})};
    CHECK(coverage_reward(sel, truth, vs) == 0.0);

    // A view without clusters contributes its full weight.
    truth.centers[1].resize(0, 2);
    CHECK(coverage_reward(sel, truth, vs) == doctest::Approx(0.5));

    truth.view_weights = {1.0};
    CHECK_THROWS_AS(coverage_reward(sel, truth, vs), Error);
}

TEST_CASE("coverage on generated scenes: full, background-only, monotone, bounded") {
    const Scene scene = generate_scene(SceneConfig{}, 11);
    const auto& vs = scene.views;
    Selection all;
    Selection background;
    for (std::size_t v = 0; v < vs.size(); ++v) {
        const auto n = static_cast<Index>(vs.views[v].tokens.rows());
        std::vector<Index> idx(n);
        std::iota(idx.begin(), idx.end(), Index{0});
        all.views.push_back(keep(vs.views[v], idx));
        std::vector<bool> member(n, false);
        for (const auto& m : scene.truth.members[v]) {
            for (const Index t : m) member[t] = true;
        }
        std::vector<Index> bg;
        for (Index t = 0; t < n; ++t) {
            if (!member[t]) bg.push_back(t);
        }
        background.views.push_back(keep(vs.views[v], bg));
    }
    CHECK(coverage_reward(all, scene.truth, vs) == doctest::Approx(1.0));
    CHECK(coverage_reward(background, scene.truth, vs) == 0.0);

    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        RatioVector ratios(6);
        for (Eigen::Index v = 0; v < 6; ++v) ratios[v] = rng.uniform(0.01, 0.6);
        const Selection small = select_multiview(vs, ratios, DistanceMeasure::Cosine, SelectionStrategy::Tfps, 3);
        const Selection big = select_multiview(vs, (ratios.array() + 0.3).matrix(), DistanceMeasure::Cosine,
                                               SelectionStrategy::Tfps, 3);
        const double r_small = coverage_reward(small, scene.truth, vs);
        const double r_big = coverage_reward(big, scene.truth, vs);
        CHECK(r_small >= 0.0);
        CHECK(r_big <= 1.0 + 1e-12);
        // Same seed, nested prefixes: the larger selection is a superset.
        CHECK(r_big >= r_small);
    }
}

TEST_CASE("coverage table agrees with direct selection") {
    const Scene scene = generate_scene(SceneConfig{}, 21);
    for (const auto strategy : {SelectionStrategy::Tfps, SelectionStrategy::Nearest, SelectionStrategy::Random}) {
        const CoverageTable table(scene, DistanceMeasure::Cosine, strategy);
        Rng rng(8);
        for (int trial = 0; trial < 8; ++trial) {
            RatioVector ratios(6);
            for (Eigen::Index v = 0; v < 6; ++v) ratios[v] = rng.uniform(0.01, 1.0);
            double direct = 0.0;
            for (const auto seed : default_selection_seeds()) {
                direct += coverage_reward(select_multiview(scene.views, ratios, DistanceMeasure::Cosine, strategy, seed),
                                          scene.truth, scene.views);
            }
            direct /= static_cast<double>(default_selection_seeds().size());
            CHECK(table.reward(ratios) == doctest::Approx(direct).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(CoverageTable(scene, DistanceMeasure::Cosine, SelectionStrategy::Stride), Error);
}

TEST_CASE("allocation oracle matches brute force over a small grid") {
    const SceneConfig cfg = small_config({8, 1});
    const Scene scene = generate_scene(cfg, 4);
    const CoverageTable table(scene, DistanceMeasure::Cosine, SelectionStrategy::Tfps);
    const std::vector<double> grid = {0.02, 0.05, 0.1, 0.25, 0.5, 1.0};
    for (const Index budget : {Index{4}, Index{10}, Index{20}, Index{40}, Index{128}}) {
        double best = -1.0;
        RatioVector best_r(2);
        for (const double a : grid) {
            for (const double b : grid) {
                if (retained_count(a, 64) + retained_count(b, 64) > budget) continue;
                RatioVector r(2);
                r << a, b;
                const double rew = table.reward(r);
                if (rew > best) {
                    best = rew;
                    best_r = r;
                }
            }
        }
        const Allocation alloc = optimal_allocation(table, grid, budget);
        CHECK(alloc.reward == best);
        CHECK(alloc.ratios == best_r);
        CHECK(alloc.tokens <= budget);
        const Allocation again = optimal_allocation_oracle(cfg, 4, grid, budget);
        CHECK(again.ratios == alloc.ratios);
    }
    // A generous budget reaches the best coverage any allocation can give.
    RatioVector ones = RatioVector::Ones(2);
    CHECK(optimal_allocation(table, grid, 128).reward == table.reward(ones));
    // Two tokens is the floor: one per view.
    CHECK_NOTHROW(optimal_allocation(table, grid, 2));
    CHECK_THROWS_AS(optimal_allocation(table, grid, 1), Error);
    CHECK_THROWS_AS(optimal_allocation_oracle(cfg, 4, grid, 10, DistanceMeasure::Cosine, {1, 2}), Error);
}
