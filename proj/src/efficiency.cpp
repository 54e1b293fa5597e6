// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvprune/efficiency.hpp"

#include <cmath>
#include <string>

namespace mvprune {

void ModelProfile::validate() const {
    if (n_layers < 1 || d_model < 1 || n_heads < 1 || n_kv_heads < 1 || d_ff < 1 || bytes_per_element < 1) {
        throw Error(ErrorCode::ConfigInvalid, "model profile sizes must be positive");
    }
    if (d_model % n_heads != 0) {
        throw Error(ErrorCode::ConfigInvalid, "d_model must be divisible by n_heads");
    }
    if (n_kv_heads > n_heads) {
        throw Error(ErrorCode::ConfigInvalid, "n_kv_heads must not exceed n_heads");
    }
}

void SequenceProfile::validate() const {
    if (n_visual_after > n_visual_before) {
        throw Error(ErrorCode::ConfigInvalid, "pruned visual count exceeds the original");
    }
}

double flops_prefill(const ModelProfile& p, Index n) {
    p.validate();
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "flops_prefill needs at least one token");
    }
    const double tokens = static_cast<double>(n);
    const double d = static_cast<double>(p.d_model);
    const double kv_share = static_cast<double>(p.n_kv_heads) / static_cast<double>(p.n_heads);
    const double projections = 4.0 * tokens * d * d * (1.0 + kv_share);
    const double attention = p.include_attention_quadratic ? 4.0 * tokens * tokens * d : 0.0;
    const double ffn = 6.0 * tokens * d * static_cast<double>(p.d_ff);
    double total = static_cast<double>(p.n_layers) * (projections + attention + ffn);
    if (p.include_vocab_head) {
        total += 2.0 * tokens * d * static_cast<double>(p.vocab_size);
    }
    return total;
}

std::uint64_t kv_cache_bytes(const ModelProfile& p, Index n) {
    p.validate();
    return 2ULL * p.n_layers * n * p.kv_width() * p.bytes_per_element;
}

EfficiencyReport efficiency_report(const ModelProfile& p, const SequenceProfile& s) {
    p.validate();
    s.validate();
    if (s.n_visual_before < 1) {
        throw Error(ErrorCode::InvalidArgument, "sequence has no visual tokens");
    }
    EfficiencyReport r;
    const Index before = s.n_visual_before + s.n_text;
    const Index after = s.n_visual_after + s.n_text;
    r.flops_before = flops_prefill(p, before);
    r.flops_after = after > 0 ? flops_prefill(p, after) : 0.0;
    r.flops_fraction = r.flops_after / r.flops_before;
    r.kv_before = kv_cache_bytes(p, before);
    r.kv_after = kv_cache_bytes(p, after);
    r.kv_fraction = static_cast<double>(r.kv_after) / static_cast<double>(r.kv_before);
    r.kv_fraction_visual = static_cast<double>(kv_cache_bytes(p, s.n_visual_after)) /
                           static_cast<double>(kv_cache_bytes(p, s.n_visual_before));
    r.token_fraction = static_cast<double>(s.n_visual_after) / static_cast<double>(s.n_visual_before);
    return r;
}

Index calibrate_text_len(const ModelProfile& p, const SequenceProfile& s, double target_fraction) {
    if (!(target_fraction > 0.0 && target_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "target fraction must lie in (0, 1)");
    }
    const auto fraction = [&](Index text) {
        SequenceProfile q = s;
        q.n_text = text;
        return efficiency_report(p, q).flops_fraction;
    };

    // The fraction rises monotonically with text length toward 1.
    Index lo = 0;
    Index hi = 10 * s.n_visual_before;
    const double f_lo = fraction(lo);
    const double f_hi = fraction(hi);
    const double slack = 1e-12 * target_fraction;
    if (target_fraction <= f_lo) {
        if (f_lo - target_fraction <= slack) {
            return 0;
        }
        throw Error(ErrorCode::NoSolution, "target below the fraction reached without text");
    }
    if (target_fraction > f_hi + slack) {
        throw Error(ErrorCode::NoSolution, "target above the fraction reached at " + std::to_string(hi) +
                                               " text tokens");
    }
    // Invariant: fraction(lo) < target <= fraction(hi).
    while (hi - lo > 1) {
        const Index mid = lo + (hi - lo) / 2;
        if (fraction(mid) < target_fraction) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::abs(fraction(lo) - target_fraction) <= std::abs(fraction(hi) - target_fraction) ? lo : hi;
}

}  // namespace mvprune
