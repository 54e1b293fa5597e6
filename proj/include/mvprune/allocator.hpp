// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "mvprune/core.hpp"

namespace mvprune {

/// Box of per-view retention ratios searched by the optimizers.
struct SearchSpace {
    Index n_views = 0;
    double lower = 0.01;
    double upper = 1.0;
    RatioVector initial;  // empty means all 0.9

    static SearchSpace with_defaults(Index n_views);

    RatioVector initial_point() const;
    void validate() const;
};

/// Reward model: maps a ratio vector to R in [0, 1]. Throwing or returning a non-finite value
/// marks the trial as failed.
using RewardOracle = std::function<double(const RatioVector&)>;

/// score = reward_scale * R + penalty_scale * sum(ratios).
struct ObjectiveConfig {
    double reward_scale = 0.5;
    double penalty_scale = -0.05;
    RewardOracle oracle;

    /// The trade-off weight of the single-lambda form R - lambda * P that ranks identically.
    double implied_lambda() const { return -penalty_scale / reward_scale; }
    void validate() const;
};

struct Trial {
    Index index = 0;
    RatioVector ratios;
    double reward = 0.0;
    double penalty = 0.0;
    double score = 0.0;
    bool failed = false;
    std::chrono::nanoseconds wall_time{0};
};

enum class OptimizerMethod { Tpe, Evolutionary, Grid };

std::string_view to_string(OptimizerMethod m);
OptimizerMethod parse_optimizer_method(std::string_view text);

struct OptimizerRun {
    OptimizerMethod method = OptimizerMethod::Tpe;
    std::uint64_t seed = 0;
    Index budget = 0;
    double reward_scale = 0.5;
    double penalty_scale = -0.05;
    std::vector<Trial> trials;
    Index best_index = 0;

    const Trial& best() const { return trials.at(best_index); }
};

double penalty_of(const RatioVector& ratios);
double composite_score(double reward, double penalty, double reward_scale, double penalty_scale);

/// Evaluates the oracle once. Throws Error(OracleFailure) on oracle exceptions or non-finite reward.
Trial evaluate_objective(const RatioVector& ratios, const ObjectiveConfig& cfg);

struct TpeConfig {
    double gamma = 0.25;
    Index n_startup = 10;
    Index n_candidates = 24;
    /// Include the uniform-width prior component in both Parzen mixtures.
    bool prior_component = true;
};

struct EvolutionConfig {
    Index population = 16;
    double sigma_fraction = 0.1;
};

/// The per-view grid {0.05, 0.1, 0.25, 0.5, 0.75, 1.0}.
std::vector<double> default_ratio_grid();

OptimizerRun tpe_optimize(const SearchSpace& space, const ObjectiveConfig& cfg, Index budget, std::uint64_t seed,
                          const TpeConfig& tpe = {});
OptimizerRun evolutionary_optimize(const SearchSpace& space, const ObjectiveConfig& cfg, Index budget,
                                   std::uint64_t seed, const EvolutionConfig& evo = {});
OptimizerRun grid_search(const SearchSpace& space, const ObjectiveConfig& cfg, Index budget, std::uint64_t seed,
                         const std::vector<double>& grid = default_ratio_grid());

OptimizerRun optimize(OptimizerMethod method, const SearchSpace& space, const ObjectiveConfig& cfg, Index budget,
                      std::uint64_t seed);

}  // namespace mvprune
