// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <initializer_list>
#include <vector>

#include "mvprune/core.hpp"
#include "mvprune/rng.hpp"

namespace mvprune::testing {

inline TokenMatrix rows(std::initializer_list<std::initializer_list<float>> values) {
    const auto n = static_cast<Eigen::Index>(values.size());
    const auto d = n == 0 ? 1 : static_cast<Eigen::Index>(values.begin()->size());
    TokenMatrix t(n, d);
    Eigen::Index i = 0;
    for (const auto& row : values) {
        Eigen::Index j = 0;
        for (const float x : row) t(i, j++) = x;
        ++i;
    }
    return t;
}

inline TokenMatrix gaussian(Index n, Index d, Rng& rng) {
    TokenMatrix t(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = static_cast<float>(rng.normal());
    return t;
}

inline ViewTokenSet uniform_views(Index views, Index n, Index d, Rng& rng) {
    ViewTokenSet vs;
    const auto labels = standard_labels();
    for (Index v = 0; v < views; ++v) {
        vs.views.push_back(View{v < labels.size() ? labels[v] : ViewLabel::from_name("cam" + std::to_string(v)),
                                gaussian(n, d, rng)});
    }
    return vs;
}

}  // namespace mvprune::testing
