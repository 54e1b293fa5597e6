// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvprune/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "mvprune/rng.hpp"

namespace mvprune {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Evaluates one trial, converting oracle failures into a failed trial with score -inf.
Trial run_trial(const RatioVector& ratios, const ObjectiveConfig& cfg, Index index) {
    const auto start = Clock::now();
    Trial t;
    try {
        t = evaluate_objective(ratios, cfg);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::OracleFailure) {
            throw;
        }
        t.ratios = ratios;
        t.penalty = penalty_of(ratios);
        t.reward = std::numeric_limits<double>::quiet_NaN();
        t.score = kNegInf;
        t.failed = true;
    }
    t.index = index;
    t.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
    return t;
}

OptimizerRun start_run(OptimizerMethod method, const SearchSpace& space, const ObjectiveConfig& cfg, Index budget,
                       std::uint64_t seed) {
    space.validate();
    cfg.validate();
    if (budget < 1) {
        throw Error(ErrorCode::InvalidArgument, "budget must be at least 1");
    }
    OptimizerRun run;
    run.method = method;
    run.seed = seed;
    run.budget = budget;
    run.reward_scale = cfg.reward_scale;
    run.penalty_scale = cfg.penalty_scale;
    run.trials.reserve(budget);
    return run;
}

void record(OptimizerRun& run, Trial trial) {
    const bool improves = run.trials.empty() || trial.score > run.trials[run.best_index].score;
    run.trials.push_back(std::move(trial));
    if (improves) {
        run.best_index = run.trials.size() - 1;
    }
}

RatioVector uniform_point(const SearchSpace& space, Rng& rng) {
    RatioVector x(static_cast<Eigen::Index>(space.n_views));
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        x[j] = rng.uniform(space.lower, space.upper);
    }
    return x;
}

// Trials ranked by score, best first; earlier trials win ties.
std::vector<Index> rank_trials(const std::vector<Trial>& trials, const std::vector<Index>& ids) {
    std::vector<Index> ranked = ids;
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&](Index a, Index b) { return trials[a].score > trials[b].score; });
    return ranked;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// One-dimensional Parzen mixture of Gaussians truncated to [lo, hi].
class ParzenDensity {
public:
    ParzenDensity(std::vector<double> points, double lo, double hi, bool prior) : m_lo(lo), m_hi(hi) {
        const double range = hi - lo;
        std::sort(points.begin(), points.end());
        const auto m = points.size();
        const double min_sigma = range / std::min(100.0, static_cast<double>(m) + 1.0);
        for (std::size_t i = 0; i < m; ++i) {
            const double left = i > 0 ? points[i - 1] : lo;
            const double right = i + 1 < m ? points[i + 1] : hi;
            const double sigma = std::clamp(std::max(points[i] - left, right - points[i]), min_sigma, range);
            add(points[i], sigma);
        }
        if (prior || m == 0) {
            add(0.5 * (lo + hi), range);
        }
    }

    double log_pdf(double x) const {
        double p = 0.0;
        for (const auto& c : m_components) {
            const double z = (x - c.mu) / c.sigma;
            p += std::exp(-0.5 * z * z) / (c.sigma * c.mass);
        }
        p /= static_cast<double>(m_components.size()) * std::sqrt(2.0 * std::numbers::pi);
        return std::log(std::max(p, std::numeric_limits<double>::min()));
    }

    double sample(Rng& rng) const {
        const auto& c = m_components[rng.uniform_below(m_components.size())];
        for (int attempt = 0; attempt < 64; ++attempt) {
            const double x = c.mu + c.sigma * rng.normal();
            if (x >= m_lo && x <= m_hi) {
                return x;
            }
        }
        return std::clamp(c.mu, m_lo, m_hi);
    }

private:
    struct Component {
        double mu;
        double sigma;
        double mass;  // probability mass of the untruncated Gaussian inside [lo, hi]
    };

    void add(double mu, double sigma) {
        const double mass = normal_cdf((m_hi - mu) / sigma) - normal_cdf((m_lo - mu) / sigma);
        m_components.push_back({mu, sigma, std::max(mass, 1e-300)});
    }

    double m_lo;
    double m_hi;
    std::vector<Component> m_components;
};

RatioVector tpe_suggest(const SearchSpace& space, const std::vector<Trial>& trials, const TpeConfig& tpe, Rng& rng) {
    std::vector<Index> ids(trials.size());
    std::iota(ids.begin(), ids.end(), Index{0});
    const auto ranked = rank_trials(trials, ids);
    const auto n_good = std::clamp<Index>(
        static_cast<Index>(std::ceil(tpe.gamma * static_cast<double>(trials.size()))), 1, trials.size());

    const auto dims = static_cast<Eigen::Index>(space.n_views);
    std::vector<ParzenDensity> good;
    std::vector<ParzenDensity> bad;
    good.reserve(space.n_views);
    bad.reserve(space.n_views);
    for (Eigen::Index j = 0; j < dims; ++j) {
        std::vector<double> good_x;
        std::vector<double> bad_x;
        for (Index r = 0; r < ranked.size(); ++r) {
            (r < n_good ? good_x : bad_x).push_back(trials[ranked[r]].ratios[j]);
        }
        good.emplace_back(std::move(good_x), space.lower, space.upper, tpe.prior_component);
        bad.emplace_back(std::move(bad_x), space.lower, space.upper, tpe.prior_component);
    }

    RatioVector best;
    double best_ratio = kNegInf;
    for (Index c = 0; c < std::max<Index>(tpe.n_candidates, 1); ++c) {
        RatioVector x(dims);
        double log_ratio = 0.0;
        for (Eigen::Index j = 0; j < dims; ++j) {
            x[j] = good[static_cast<std::size_t>(j)].sample(rng);
            log_ratio += good[static_cast<std::size_t>(j)].log_pdf(x[j]) - bad[static_cast<std::size_t>(j)].log_pdf(x[j]);
        }
        if (best.size() == 0 || log_ratio > best_ratio) {
            best = std::move(x);
            best_ratio = log_ratio;
        }
    }
    return best;
}

}  // namespace

SearchSpace SearchSpace::with_defaults(Index n_views) {
    SearchSpace s;
    s.n_views = n_views;
    return s;
}

RatioVector SearchSpace::initial_point() const {
    if (initial.size() == 0) {
        return RatioVector::Constant(static_cast<Eigen::Index>(n_views), 0.9);
    }
    return initial;
}

void SearchSpace::validate() const {
    if (n_views < 1) {
        throw Error(ErrorCode::ConfigInvalid, "search space needs at least one view");
    }
    if (!(lower > 0.0 && lower <= upper && upper <= 1.0)) {
        throw Error(ErrorCode::ConfigInvalid, "bounds must satisfy 0 < lower <= upper <= 1");
    }
    const RatioVector x0 = initial_point();
    if (x0.size() != static_cast<Eigen::Index>(n_views)) {
        throw Error(ErrorCode::ConfigInvalid, "initial point has the wrong number of views");
    }
    for (Eigen::Index j = 0; j < x0.size(); ++j) {
        if (!(x0[j] >= lower && x0[j] <= upper)) {
            throw Error(ErrorCode::ConfigInvalid, "initial point outside the search box");
        }
    }
}

void ObjectiveConfig::validate() const {
    if (!(reward_scale > 0.0) || !std::isfinite(reward_scale)) {
        throw Error(ErrorCode::ConfigInvalid, "reward_scale must be positive");
    }
    if (!(penalty_scale <= 0.0) || !std::isfinite(penalty_scale)) {
        throw Error(ErrorCode::ConfigInvalid, "penalty_scale must be <= 0");
    }
    if (!oracle) {
        throw Error(ErrorCode::ConfigInvalid, "objective has no reward oracle");
    }
}

std::string_view to_string(OptimizerMethod m) {
    switch (m) {
        case OptimizerMethod::Tpe: return "tpe";
        case OptimizerMethod::Evolutionary: return "evolutionary";
        case OptimizerMethod::Grid: return "grid";
    }
    return "tpe";
}

OptimizerMethod parse_optimizer_method(std::string_view text) {
    if (text == "tpe") return OptimizerMethod::Tpe;
    if (text == "evolutionary" || text == "evo") return OptimizerMethod::Evolutionary;
    if (text == "grid") return OptimizerMethod::Grid;
    throw Error(ErrorCode::InvalidArgument, "unknown optimizer '" + std::string(text) + "'");
}

double penalty_of(const RatioVector& ratios) {
    double p = 0.0;
    for (Eigen::Index j = 0; j < ratios.size(); ++j) {
        p += ratios[j];
    }
    return p;
}

double composite_score(double reward, double penalty, double reward_scale, double penalty_scale) {
    return reward_scale * reward + penalty_scale * penalty;
}

Trial evaluate_objective(const RatioVector& ratios, const ObjectiveConfig& cfg) {
    double reward = 0.0;
    try {
        reward = cfg.oracle(ratios);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::OracleFailure, e.what());
    } catch (...) {
        throw Error(ErrorCode::OracleFailure, "reward oracle threw a non-standard exception");
    }
    if (!std::isfinite(reward)) {
        throw Error(ErrorCode::OracleFailure, "reward oracle returned a non-finite value");
    }
    Trial t;
    t.ratios = ratios;
    t.reward = reward;
    t.penalty = penalty_of(ratios);
    t.score = composite_score(t.reward, t.penalty, cfg.reward_scale, cfg.penalty_scale);
    return t;
}

std::vector<double> default_ratio_grid() { return {0.05, 0.1, 0.25, 0.5, 0.75, 1.0}; }

OptimizerRun tpe_optimize(const SearchSpace& space, const ObjectiveConfig& cfg, Index budget, std::uint64_t seed,
                          const TpeConfig& tpe) {
    if (!(tpe.gamma > 0.0 && tpe.gamma <= 1.0)) {
        throw Error(ErrorCode::ConfigInvalid, "TPE gamma must lie in (0, 1]");
    }
    OptimizerRun run = start_run(OptimizerMethod::Tpe, space, cfg, budget, seed);
    Rng rng(seed);
    const Index n_startup = std::max<Index>(tpe.n_startup, 1);
    for (Index i = 0; i < budget; ++i) {
        RatioVector x;
        if (i == 0) {
            x = space.initial_point();
        } else if (i < n_startup) {
            x = uniform_point(space, rng);
        } else {
            x = tpe_suggest(space, run.trials, tpe, rng);
        }
        record(run, run_trial(x, cfg, i));
    }
    return run;
}

OptimizerRun evolutionary_optimize(const SearchSpace& space, const ObjectiveConfig& cfg, Index budget,
                                   std::uint64_t seed, const EvolutionConfig& evo) {
    OptimizerRun run = start_run(OptimizerMethod::Evolutionary, space, cfg, budget, seed);
    Rng rng(seed);
    const Index pop = std::clamp<Index>(evo.population, 1, budget);
    const Index n_survivors = (pop + 3) / 4;
    const double sigma = evo.sigma_fraction * (space.upper - space.lower);

    std::vector<Index> population;
    for (Index i = 0; i < pop; ++i) {
        RatioVector x = i == 0 ? space.initial_point() : uniform_point(space, rng);
        record(run, run_trial(x, cfg, run.trials.size()));
        population.push_back(run.trials.size() - 1);
    }

    while (run.trials.size() < budget) {
        auto ranked = rank_trials(run.trials, population);
        ranked.resize(n_survivors);
        population = ranked;
        while (population.size() < pop && run.trials.size() < budget) {
            const Index parent = ranked[rng.uniform_below(n_survivors)];
            RatioVector child = run.trials[parent].ratios;
            for (Eigen::Index j = 0; j < child.size(); ++j) {
                child[j] = std::clamp(child[j] + sigma * rng.normal(), space.lower, space.upper);
            }
            record(run, run_trial(child, cfg, run.trials.size()));
            population.push_back(run.trials.size() - 1);
        }
    }
    return run;
}

OptimizerRun grid_search(const SearchSpace& space, const ObjectiveConfig& cfg, Index budget, std::uint64_t seed,
                         const std::vector<double>& grid) {
    OptimizerRun run = start_run(OptimizerMethod::Grid, space, cfg, budget, seed);

    std::vector<double> axis;
    for (const double g : grid) {
        if (g >= space.lower && g <= space.upper) {
            axis.push_back(g);
        }
    }
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    if (axis.empty()) {
        throw Error(ErrorCode::ConfigInvalid, "no grid value lies inside the search bounds");
    }

    // Grid size, saturating once it exceeds any feasible budget.
    const auto base = static_cast<std::uint64_t>(axis.size());
    std::uint64_t total = 1;
    bool saturated = false;
    for (Index v = 0; v < space.n_views && !saturated; ++v) {
        if (total > (std::uint64_t{1} << 62) / base) {
            saturated = true;
        } else {
            total *= base;
        }
    }

    std::vector<std::uint64_t> points;
    if (!saturated && total <= budget) {
        points.resize(total);
        std::iota(points.begin(), points.end(), std::uint64_t{0});
    } else {
        if (saturated) {
            throw Error(ErrorCode::ConfigInvalid, "grid too large to index");
        }
        // Floyd's sampling of `budget` distinct grid points.
        Rng rng(seed);
        std::set<std::uint64_t> chosen;
        for (std::uint64_t j = total - budget; j < total; ++j) {
            const std::uint64_t t = rng.uniform_below(j + 1);
            if (!chosen.insert(t).second) {
                chosen.insert(j);
            }
        }
        points.assign(chosen.begin(), chosen.end());
    }

    const auto dims = static_cast<Eigen::Index>(space.n_views);
    for (const std::uint64_t p : points) {
        RatioVector x(dims);
        std::uint64_t rest = p;
        for (Eigen::Index j = dims - 1; j >= 0; --j) {
            x[j] = axis[rest % base];
            rest /= base;
        }
        record(run, run_trial(x, cfg, run.trials.size()));
    }
    return run;
}

OptimizerRun optimize(OptimizerMethod method, const SearchSpace& space, const ObjectiveConfig& cfg, Index budget,
                      std::uint64_t seed) {
    switch (method) {
        case OptimizerMethod::Tpe: return tpe_optimize(space, cfg, budget, seed);
        case OptimizerMethod::Evolutionary: return evolutionary_optimize(space, cfg, budget, seed);
        case OptimizerMethod::Grid: return grid_search(space, cfg, budget, seed);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown optimizer");
}

}  // namespace mvprune
