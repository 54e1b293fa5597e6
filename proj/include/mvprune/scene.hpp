// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mvprune/core.hpp"

namespace mvprune {

/// Synthetic multi-view scene: per view, a few tight clusters of "object" tokens on the unit
/// sphere plus a redundant background blob. A cluster counts as seen when a retained token lies
/// within cover_radius (cosine distance) of its center.
struct SceneConfig {
    std::vector<ViewLabel> labels = standard_labels();
    Index tokens_per_view = 256;
    Index dim = 32;
    std::vector<Index> clusters_per_view = {12, 6, 6, 8, 3, 3};
    double cluster_std = 0.05;
    double background_std = 0.05;
    /// Background tokens are background_offset * b_v + N(0, background_std^2 I) with b_v a random
    /// unit direction per view. 0 gives zero-mean background.
    double background_offset = 1.0;
    std::vector<double> view_weights = {0.35, 0.15, 0.15, 0.20, 0.075, 0.075};
    double cover_radius = 0.15;

    Index n_views() const { return labels.size(); }
    /// Throws Error(ConfigInvalid).
    void validate() const;
};

struct SceneTruth {
    std::vector<Eigen::MatrixXd> centers;                     // per view: c_v x dim, unit rows
    std::vector<std::vector<std::vector<Index>>> members;     // per view, per cluster: sorted token indices
    std::vector<double> view_weights;
    double cover_radius = 0.15;
};

struct Scene {
    ViewTokenSet views;
    SceneTruth truth;
};

/// Deterministic in (cfg, seed). Each cluster receives ceil(tokens_per_view / (4 c_v)) members;
/// member and background positions are shuffled within the view.
Scene generate_scene(const SceneConfig& cfg, std::uint64_t seed);

/// sum_v w_v * covered_v / c_v, with views without clusters contributing w_v.
/// Throws Error(SelectionMismatch) when sel, truth and vs disagree.
double coverage_reward(const Selection& sel, const SceneTruth& truth, const ViewTokenSet& vs);

/// Seeds used when averaging over first-token randomness.
std::vector<std::uint64_t> default_selection_seeds();

/// Mean coverage of a nested selector, tabulated for every prefix length.
///
/// TFPS, NEAREST and RANDOM produce nested selections (the k-token result is a prefix of the
/// (k+1)-token result under the same seed), so one full-length run per (view, seed) answers every
/// ratio. reward(ratios) equals the mean of coverage_reward(select_multiview(...)) over the seeds.
class CoverageTable {
public:
    CoverageTable(const Scene& scene, DistanceMeasure metric, SelectionStrategy strategy,
                  std::vector<std::uint64_t> seeds = default_selection_seeds());

    /// Mean covered fraction of view v's clusters when k tokens are kept (1 when c_v = 0).
    double view_coverage(Index v, Index k) const;
    double reward(const RatioVector& ratios) const;

    Index n_views() const { return m_coverage.size(); }
    Index tokens_in_view(Index v) const { return m_tokens[v]; }
    double weight(Index v) const { return m_weights[v]; }

private:
    std::vector<std::vector<double>> m_coverage;  // [view][k], k in [0, n_v]
    std::vector<Index> m_tokens;
    std::vector<double> m_weights;
};

struct Allocation {
    RatioVector ratios;
    double reward = 0.0;
    Index tokens = 0;
};

/// Exhaustive search over grid^n_views for the allocation of highest mean TFPS coverage with
/// sum_v retained_count(alpha_v, n_v) <= total_budget. Ties go to the lexicographically smallest
/// allocation (grid sorted ascending). Throws Error(InfeasibleBudget) if nothing fits.
Allocation optimal_allocation_oracle(const SceneConfig& cfg, std::uint64_t seed, const std::vector<double>& grid,
                                     Index total_budget, DistanceMeasure metric = DistanceMeasure::Cosine,
                                     const std::vector<std::uint64_t>& selection_seeds = default_selection_seeds());

/// Same search over a prebuilt table.
Allocation optimal_allocation(const CoverageTable& table, const std::vector<double>& grid, Index total_budget);

}  // namespace mvprune
