// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvprune/tfps.hpp"

#include <limits>
#include <numeric>
#include <string>

#include "mvprune/parallel.hpp"

namespace mvprune {

namespace {

void check_k(const TokenMatrix& tokens, Index k) {
    const auto n = static_cast<Index>(tokens.rows());
    if (k < 1 || k > n) {
        throw Error(ErrorCode::KOutOfRange,
                    "k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    }
}

// Distance from every token to one anchor token, with row norms cached for COSINE.
class DistanceKernel {
public:
    DistanceKernel(const TokenMatrix& tokens, DistanceMeasure m) : m_tokens(tokens), m_metric(m) {
        if (m == DistanceMeasure::Cosine) {
            m_norms.resize(static_cast<std::size_t>(tokens.rows()));
            for (Eigen::Index j = 0; j < tokens.rows(); ++j) {
                m_norms[static_cast<std::size_t>(j)] = detail::norm(tokens.row(j));
            }
        }
    }

    double operator()(Index candidate, Index anchor) const {
        const auto a = m_tokens.row(static_cast<Eigen::Index>(candidate));
        const auto b = m_tokens.row(static_cast<Eigen::Index>(anchor));
        switch (m_metric) {
            case DistanceMeasure::Cosine:
                return detail::cosine_from_parts(detail::dot(a, b), m_norms[candidate], m_norms[anchor]);
            case DistanceMeasure::L1:
                return detail::l1(a, b);
            case DistanceMeasure::L2:
                return detail::l2(a, b);
        }
        return 0.0;
    }

private:
    const TokenMatrix& m_tokens;
    DistanceMeasure m_metric;
    std::vector<double> m_norms;
};

enum class Pick { Farthest, Nearest };

GreedyResult greedy_select(const TokenMatrix& tokens, Index k, DistanceMeasure m, Index first, Pick pick) {
    check_k(tokens, k);
    const auto n = static_cast<Index>(tokens.rows());
    if (first >= n) {
        throw Error(ErrorCode::KOutOfRange, "first index " + std::to_string(first) + " out of range");
    }

    const DistanceKernel dist(tokens, m);
    std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
    std::vector<char> selected(n, 0);

    GreedyResult result;
    result.order.reserve(k);
    result.separation.reserve(k);
    result.order.push_back(first);
    result.separation.push_back(std::numeric_limits<double>::infinity());
    selected[first] = 1;

    for (Index i = 1; i < k; ++i) {
        const Index last = result.order.back();
        Index best = n;
        double best_value = 0.0;
        for (Index j = 0; j < n; ++j) {
            if (selected[j]) {
                continue;
            }
            min_dist[j] = std::min(min_dist[j], dist(j, last));
            const bool better = best == n || (pick == Pick::Farthest ? min_dist[j] > best_value
                                                                     : min_dist[j] < best_value);
            if (better) {
                best = j;
                best_value = min_dist[j];
            }
        }
        selected[best] = 1;
        result.order.push_back(best);
        result.separation.push_back(best_value);
    }
    return result;
}

}  // namespace

std::vector<Index> GreedyResult::sorted() const {
    std::vector<Index> out = order;
    std::sort(out.begin(), out.end());
    return out;
}

GreedyResult tfps_select(const TokenMatrix& tokens, Index k, DistanceMeasure m, Rng& rng) {
    check_k(tokens, k);
    const auto first = static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(tokens.rows())));
    return greedy_select(tokens, k, m, first, Pick::Farthest);
}

GreedyResult tfps_select_from(const TokenMatrix& tokens, Index k, DistanceMeasure m, Index first) {
    return greedy_select(tokens, k, m, first, Pick::Farthest);
}

std::vector<Index> tfps_naive_oracle(const TokenMatrix& tokens, Index k, DistanceMeasure m, Index first) {
    check_k(tokens, k);
    const auto n = static_cast<Index>(tokens.rows());
    if (first >= n) {
        throw Error(ErrorCode::KOutOfRange, "first index " + std::to_string(first) + " out of range");
    }
    std::vector<Index> chosen{first};
    std::vector<char> selected(n, 0);
    selected[first] = 1;
    while (chosen.size() < k) {
        Index best = n;
        double best_value = -1.0;
        for (Index j = 0; j < n; ++j) {
            if (selected[j]) {
                continue;
            }
            double d_min = std::numeric_limits<double>::infinity();
            for (const Index s : chosen) {
                d_min = std::min(d_min, pairwise_distance(tokens.row(static_cast<Eigen::Index>(j)),
                                                          tokens.row(static_cast<Eigen::Index>(s)), m));
            }
            if (d_min > best_value) {
                best = j;
                best_value = d_min;
            }
        }
        selected[best] = 1;
        chosen.push_back(best);
    }
    return chosen;
}

GreedyResult nearest_select(const TokenMatrix& tokens, Index k, DistanceMeasure m, Rng& rng) {
    check_k(tokens, k);
    const auto first = static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(tokens.rows())));
    return greedy_select(tokens, k, m, first, Pick::Nearest);
}

GreedyResult nearest_select_from(const TokenMatrix& tokens, Index k, DistanceMeasure m, Index first) {
    return greedy_select(tokens, k, m, first, Pick::Nearest);
}

std::vector<Index> baseline_select(const TokenMatrix& tokens, Index k, SelectionStrategy strategy, Rng& rng) {
    check_k(tokens, k);
    const auto n = static_cast<Index>(tokens.rows());
    std::vector<Index> out;
    out.reserve(k);
    switch (strategy) {
        case SelectionStrategy::Random: {
            std::vector<Index> pool(n);
            std::iota(pool.begin(), pool.end(), Index{0});
            for (Index i = 0; i < k; ++i) {
                const auto j = i + static_cast<Index>(rng.uniform_below(n - i));
                std::swap(pool[i], pool[j]);
                out.push_back(pool[i]);
            }
            break;
        }
        case SelectionStrategy::Stride:
            for (Index i = 0; i < k; ++i) {
                out.push_back(i * n / k);
            }
            break;
        default:
            throw Error(ErrorCode::InvalidArgument, "baseline_select accepts RANDOM or STRIDE only");
    }
    return out;
}

Selection select_multiview(const ViewTokenSet& vs, const RatioVector& ratios, DistanceMeasure m,
                           SelectionStrategy strategy, std::uint64_t seed, FirstPick first) {
    if (ratios.size() != static_cast<Eigen::Index>(vs.size())) {
        throw Error(ErrorCode::InvalidArgument, "ratio vector has " + std::to_string(ratios.size()) +
                                                    " entries for " + std::to_string(vs.size()) + " views");
    }

    Selection sel;
    sel.metric = m;
    sel.strategy = strategy;
    sel.seed = seed;
    sel.ratios = ratios;
    sel.views.reserve(vs.size());
    for (const auto& view : vs.views) {
        sel.views.push_back(ViewSelection{view.label, static_cast<Index>(view.tokens.rows()), {}, {}});
    }

    parallel_for(vs.size(), [&](std::size_t v) {
        const auto& tokens = vs.views[v].tokens;
        const auto n = static_cast<Index>(tokens.rows());
        const Index k = retained_count(ratios[static_cast<Eigen::Index>(v)], n);
        if (k == 0) {
            return;
        }
        Rng rng(seed ^ stable_hash(vs.views[v].label));
        std::vector<Index> order;
        switch (strategy) {
            case SelectionStrategy::Tfps:
                order = first == FirstPick::Zero ? tfps_select_from(tokens, k, m, 0).order
                                                 : tfps_select(tokens, k, m, rng).order;
                break;
            case SelectionStrategy::Nearest:
                order = first == FirstPick::Zero ? nearest_select_from(tokens, k, m, 0).order
                                                 : nearest_select(tokens, k, m, rng).order;
                break;
            case SelectionStrategy::Random:
            case SelectionStrategy::Stride:
                order = baseline_select(tokens, k, strategy, rng);
                break;
        }
        auto& out = sel.views[v];
        out.kept = order;
        std::sort(out.kept.begin(), out.kept.end());
        out.order = std::move(order);
    });
    return sel;
}

}  // namespace mvprune
