// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mvprune/core.hpp"
#include "mvprune/rng.hpp"

namespace mvprune {

namespace detail {

// Plain left-to-right accumulation in binary64. Vectorized reductions would reorder the sum and
// break bit-stable comparisons between the incremental selector and its oracle.
template <typename A, typename B>
double dot(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        s += static_cast<double>(a.coeff(i)) * static_cast<double>(b.coeff(i));
    }
    return s;
}

template <typename A>
double norm(const Eigen::MatrixBase<A>& a) {
    return std::sqrt(dot(a, a));
}

template <typename A, typename B>
double l1(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        s += std::abs(static_cast<double>(a.coeff(i)) - static_cast<double>(b.coeff(i)));
    }
    return s;
}

template <typename A, typename B>
double l2(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a.coeff(i)) - static_cast<double>(b.coeff(i));
        s += d * d;
    }
    return std::sqrt(s);
}

/// A zero-norm vector is treated as orthogonal to everything: distance 1.
inline double cosine_from_parts(double ab, double norm_a, double norm_b) {
    if (norm_a == 0.0 || norm_b == 0.0) {
        return 1.0;
    }
    return std::clamp(1.0 - ab / (norm_a * norm_b), 0.0, 2.0);
}

}  // namespace detail

/// Distance between two token rows, computed in binary64.
///
/// COSINE is 1 - cos(a, b) in [0, 2] and returns 1.0 when either vector has zero norm.
/// L1 and L2 are the usual Minkowski distances.
template <typename A, typename B>
double pairwise_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, DistanceMeasure m) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimMismatch, "pairwise_distance on rows of different length");
    }
    switch (m) {
        case DistanceMeasure::Cosine:
            return detail::cosine_from_parts(detail::dot(a, b), detail::norm(a), detail::norm(b));
        case DistanceMeasure::L1:
            return detail::l1(a, b);
        case DistanceMeasure::L2:
            return detail::l2(a, b);
    }
    return 0.0;
}

/// Output of a greedy selector.
struct GreedyResult {
    std::vector<Index> order;       // selection order; order[0] is the seed token
    std::vector<double> separation; // min distance to the selected set at pick time (+inf for the seed)

    std::vector<Index> sorted() const;
};

/// Token-wise farthest point sampling. The first token is drawn uniformly with rng; every
/// further pick maximizes the minimum distance to the tokens already chosen, lowest index on ties.
GreedyResult tfps_select(const TokenMatrix& tokens, Index k, DistanceMeasure m, Rng& rng);

/// As tfps_select but with the first token given. Used for deterministic runs and oracle checks.
GreedyResult tfps_select_from(const TokenMatrix& tokens, Index k, DistanceMeasure m, Index first);

/// Recompute-from-scratch reference for tfps_select_from; O(N K^2) distance evaluations.
std::vector<Index> tfps_naive_oracle(const TokenMatrix& tokens, Index k, DistanceMeasure m, Index first);

/// Inverse ablation: every pick minimizes the distance to the selected set.
GreedyResult nearest_select(const TokenMatrix& tokens, Index k, DistanceMeasure m, Rng& rng);
GreedyResult nearest_select_from(const TokenMatrix& tokens, Index k, DistanceMeasure m, Index first);

/// RANDOM: k draws without replacement (partial Fisher-Yates). STRIDE: floor(i * n / k).
/// Returns indices in draw order.
std::vector<Index> baseline_select(const TokenMatrix& tokens, Index k, SelectionStrategy strategy, Rng& rng);

enum class FirstPick { Random, Zero };

/// Runs the strategy on every view with k_v = retained_count(ratios[v], n_v).
/// View v uses Rng(seed ^ stable_hash(label_v)), so results do not depend on view order.
Selection select_multiview(const ViewTokenSet& vs, const RatioVector& ratios, DistanceMeasure m,
                           SelectionStrategy strategy, std::uint64_t seed, FirstPick first = FirstPick::Random);

}  // namespace mvprune
