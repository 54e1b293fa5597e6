// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvprune/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "mvprune/parallel.hpp"
#include "mvprune/rng.hpp"
#include "mvprune/tfps.hpp"

namespace mvprune {

namespace {

constexpr std::uint64_t kSceneSalt = 0x5CE7E5A1D0C0FFEEULL;

Eigen::VectorXd unit_gaussian(Index dim, Rng& rng) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x[i] = rng.normal();
    }
    const double n = x.norm();
    return n > 0.0 ? Eigen::VectorXd(x / n) : Eigen::VectorXd::Unit(x.size(), 0);
}

bool covers(const TokenMatrix& tokens, Index token, const Eigen::MatrixXd& centers, Eigen::Index cluster,
            double radius) {
    return pairwise_distance(tokens.row(static_cast<Eigen::Index>(token)), centers.row(cluster),
                             DistanceMeasure::Cosine) <= radius;
}

}  // namespace

void SceneConfig::validate() const {
    const auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); };
    if (labels.empty()) fail("scene needs at least one view");
    if (clusters_per_view.size() != labels.size()) fail("clusters_per_view must have one entry per view");
    if (view_weights.size() != labels.size()) fail("view_weights must have one entry per view");
    if (dim < 1) fail("dim must be at least 1");
    std::unordered_set<std::string> names;
    for (const auto& l : labels) {
        if (!names.insert(l.name()).second) fail("duplicate view label '" + l.name() + "'");
    }
    double total = 0.0;
    for (const double w : view_weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) fail("view weights must be finite and non-negative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) fail("view weights must sum to 1");
    for (const Index c : clusters_per_view) {
        if (c > tokens_per_view) fail("clusters_per_view exceeds tokens_per_view");
    }
    if (!(cluster_std >= 0.0) || !(background_std >= 0.0) || !std::isfinite(cluster_std) ||
        !std::isfinite(background_std) || !std::isfinite(background_offset)) {
        fail("scene noise parameters must be finite and non-negative");
    }
    if (!(cover_radius > 0.0 && cover_radius <= 2.0)) fail("cover_radius must lie in (0, 2]");
}

Scene generate_scene(const SceneConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const Index n = cfg.tokens_per_view;
    const auto dim = static_cast<Eigen::Index>(cfg.dim);

    Scene scene;
    scene.truth.view_weights = cfg.view_weights;
    scene.truth.cover_radius = cfg.cover_radius;

    for (Index v = 0; v < cfg.n_views(); ++v) {
        Rng rng(seed ^ stable_hash(cfg.labels[v]) ^ kSceneSalt);
        const Index c = cfg.clusters_per_view[v];

        Eigen::MatrixXd centers(static_cast<Eigen::Index>(c), dim);
        for (Index j = 0; j < c; ++j) {
            centers.row(static_cast<Eigen::Index>(j)) = unit_gaussian(cfg.dim, rng).transpose();
        }
        const Eigen::VectorXd background_dir = unit_gaussian(cfg.dim, rng);

        std::vector<Index> slots(n);
        std::iota(slots.begin(), slots.end(), Index{0});
        for (Index i = n; i > 1; --i) {
            std::swap(slots[i - 1], slots[rng.uniform_below(i)]);
        }

        const Index per_cluster = c == 0 ? 0 : (n + 4 * c - 1) / (4 * c);
        TokenMatrix tokens(static_cast<Eigen::Index>(n), dim);
        std::vector<std::vector<Index>> members(c);
        Index next = 0;
        for (Index j = 0; j < c; ++j) {
            for (Index m = 0; m < per_cluster; ++m, ++next) {
                Eigen::VectorXd x = centers.row(static_cast<Eigen::Index>(j)).transpose();
                for (Eigen::Index i = 0; i < dim; ++i) {
                    x[i] += cfg.cluster_std * rng.normal();
                }
                const double norm = x.norm();
                if (norm > 0.0) {
                    x /= norm;
                }
                tokens.row(static_cast<Eigen::Index>(slots[next])) = x.transpose().cast<float>();
                members[j].push_back(slots[next]);
            }
            std::sort(members[j].begin(), members[j].end());
        }
        for (; next < n; ++next) {
            Eigen::VectorXd x = cfg.background_offset * background_dir;
            for (Eigen::Index i = 0; i < dim; ++i) {
                x[i] += cfg.background_std * rng.normal();
            }
            tokens.row(static_cast<Eigen::Index>(slots[next])) = x.transpose().cast<float>();
        }

        scene.views.views.push_back(View{cfg.labels[v], std::move(tokens)});
        scene.truth.centers.push_back(std::move(centers));
        scene.truth.members.push_back(std::move(members));
    }
    return scene;
}

double coverage_reward(const Selection& sel, const SceneTruth& truth, const ViewTokenSet& vs) {
    validate_selection(sel, vs);
    if (truth.centers.size() != vs.size() || truth.view_weights.size() != vs.size()) {
        throw Error(ErrorCode::SelectionMismatch, "scene truth does not match the view set");
    }
    double reward = 0.0;
    for (std::size_t v = 0; v < vs.size(); ++v) {
        const auto& centers = truth.centers[v];
        if (centers.rows() == 0) {
            reward += truth.view_weights[v];
            continue;
        }
        if (centers.cols() != vs.views[v].tokens.cols()) {
            throw Error(ErrorCode::SelectionMismatch, "scene truth dim does not match the view set");
        }
        Index covered = 0;
        for (Eigen::Index j = 0; j < centers.rows(); ++j) {
            const bool hit = std::any_of(sel.views[v].kept.begin(), sel.views[v].kept.end(), [&](Index t) {
                return covers(vs.views[v].tokens, t, centers, j, truth.cover_radius);
            });
            covered += hit ? 1 : 0;
        }
        reward += truth.view_weights[v] * static_cast<double>(covered) / static_cast<double>(centers.rows());
    }
    return reward;
}

std::vector<std::uint64_t> default_selection_seeds() { return {1, 2, 3, 4, 5}; }

CoverageTable::CoverageTable(const Scene& scene, DistanceMeasure metric, SelectionStrategy strategy,
                             std::vector<std::uint64_t> seeds) {
    if (strategy == SelectionStrategy::Stride) {
        throw Error(ErrorCode::InvalidArgument, "STRIDE selections are not nested; no coverage table");
    }
    if (seeds.empty()) {
        throw Error(ErrorCode::InvalidArgument, "coverage table needs at least one selection seed");
    }
    const auto& vs = scene.views;
    const auto& truth = scene.truth;
    if (truth.centers.size() != vs.size() || truth.view_weights.size() != vs.size()) {
        throw Error(ErrorCode::SelectionMismatch, "scene truth does not match the view set");
    }
    m_weights = truth.view_weights;
    m_tokens.resize(vs.size());
    m_coverage.resize(vs.size());

    parallel_for(vs.size(), [&](std::size_t v) {
        const auto& tokens = vs.views[v].tokens;
        const auto n = static_cast<Index>(tokens.rows());
        const auto& centers = truth.centers[v];
        const auto c = static_cast<Index>(centers.rows());
        m_tokens[v] = n;
        std::vector<double> table(n + 1, 0.0);
        if (c == 0) {
            std::fill(table.begin(), table.end(), 1.0);
            m_coverage[v] = std::move(table);
            return;
        }
        for (const std::uint64_t seed : seeds) {
            Rng rng(seed ^ stable_hash(vs.views[v].label));
            std::vector<Index> order;
            if (n > 0) {
                switch (strategy) {
                    case SelectionStrategy::Tfps: order = tfps_select(tokens, n, metric, rng).order; break;
                    case SelectionStrategy::Nearest: order = nearest_select(tokens, n, metric, rng).order; break;
                    default: order = baseline_select(tokens, n, strategy, rng); break;
                }
            }
            std::vector<char> seen(c, 0);
            Index covered = 0;
            for (Index k = 1; k <= n; ++k) {
                for (Index j = 0; j < c; ++j) {
                    if (!seen[j] && covers(tokens, order[k - 1], centers, static_cast<Eigen::Index>(j),
                                           truth.cover_radius)) {
                        seen[j] = 1;
                        ++covered;
                    }
                }
                table[k] += static_cast<double>(covered) / static_cast<double>(c);
            }
        }
        for (double& x : table) {
            x /= static_cast<double>(seeds.size());
        }
        m_coverage[v] = std::move(table);
    });
}

double CoverageTable::view_coverage(Index v, Index k) const { return m_coverage.at(v).at(k); }

double CoverageTable::reward(const RatioVector& ratios) const {
    if (ratios.size() != static_cast<Eigen::Index>(n_views())) {
        throw Error(ErrorCode::InvalidArgument, "ratio vector does not match the number of views");
    }
    double r = 0.0;
    for (Index v = 0; v < n_views(); ++v) {
        r += m_weights[v] * view_coverage(v, retained_count(ratios[static_cast<Eigen::Index>(v)], m_tokens[v]));
    }
    return r;
}

Allocation optimal_allocation(const CoverageTable& table, const std::vector<double>& grid, Index total_budget) {
    std::vector<double> axis = grid;
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    if (axis.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty ratio grid");
    }
    const Index views = table.n_views();
    double combos = 1.0;
    for (Index v = 0; v < views; ++v) {
        combos *= static_cast<double>(axis.size());
    }
    if (combos > 5e8) {
        throw Error(ErrorCode::ConfigInvalid, "allocation grid too large to enumerate");
    }

    // Per-view token counts and weighted coverage for every grid value.
    std::vector<std::vector<Index>> counts(views, std::vector<Index>(axis.size()));
    std::vector<std::vector<double>> gain(views, std::vector<double>(axis.size()));
    for (Index v = 0; v < views; ++v) {
        for (std::size_t g = 0; g < axis.size(); ++g) {
            counts[v][g] = retained_count(axis[g], table.tokens_in_view(v));
            gain[v][g] = table.weight(v) * table.view_coverage(v, counts[v][g]);
        }
    }

    std::vector<std::size_t> digit(views, 0);
    std::vector<std::size_t> best_digit;
    double best_reward = -1.0;
    Index best_tokens = 0;
    for (bool done = false; !done;) {
        Index tokens = 0;
        double reward = 0.0;
        for (Index v = 0; v < views; ++v) {
            tokens += counts[v][digit[v]];
            reward += gain[v][digit[v]];
        }
        if (tokens <= total_budget && reward > best_reward) {
            best_reward = reward;
            best_digit = digit;
            best_tokens = tokens;
        }
        // Odometer increment, last view fastest: lexicographic order.
        for (Index pos = views;;) {
            if (pos == 0) {
                done = true;
                break;
            }
            --pos;
            if (++digit[pos] < axis.size()) {
                break;
            }
            digit[pos] = 0;
        }
    }
    if (best_digit.empty()) {
        throw Error(ErrorCode::InfeasibleBudget,
                    "no grid allocation fits within " + std::to_string(total_budget) + " tokens");
    }
    Allocation out;
    out.ratios.resize(static_cast<Eigen::Index>(views));
    for (Index v = 0; v < views; ++v) {
        out.ratios[static_cast<Eigen::Index>(v)] = axis[best_digit[v]];
    }
    out.reward = best_reward;
    out.tokens = best_tokens;
    return out;
}

Allocation optimal_allocation_oracle(const SceneConfig& cfg, std::uint64_t seed, const std::vector<double>& grid,
                                     Index total_budget, DistanceMeasure metric,
                                     const std::vector<std::uint64_t>& selection_seeds) {
    if (selection_seeds.size() < 5) {
        throw Error(ErrorCode::InvalidArgument, "allocation oracle averages over at least 5 selection seeds");
    }
    for (const double g : grid) {
        if (!(g >= 0.0 && g <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "grid ratios must lie in [0, 1]");
        }
    }
    const Scene scene = generate_scene(cfg, seed);
    const CoverageTable table(scene, metric, SelectionStrategy::Tfps, selection_seeds);
    return optimal_allocation(table, grid, total_budget);
}

}  // namespace mvprune
