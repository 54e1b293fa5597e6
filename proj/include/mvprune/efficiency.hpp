// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "mvprune/core.hpp"

namespace mvprune {

/// Decoder-only transformer shape used for cost accounting.
struct ModelProfile {
    Index n_layers = 32;
    Index d_model = 4096;
    Index n_heads = 32;
    Index n_kv_heads = 8;
    Index d_ff = 14336;
    Index bytes_per_element = 2;
    bool include_vocab_head = false;
    Index vocab_size = 128256;
    /// The 4 n^2 d attention-matmul term. Disable for a purely linear accounting.
    bool include_attention_quadratic = true;

    /// 7-8B class profile (32 layers, d_model 4096, d_ff 14336, 8 KV heads).
    static ModelProfile llama_8b() { return {}; }

    Index kv_width() const { return d_model * n_kv_heads / n_heads; }
    void validate() const;
};

struct SequenceProfile {
    Index n_visual_before = 0;
    Index n_visual_after = 0;
    Index n_text = 0;

    void validate() const;
};

/// Prefill FLOPs for a sequence of n tokens:
///   n_layers * (4 n d^2 (1 + kv/h) + 4 n^2 d + 6 n d d_ff) [+ 2 n d vocab].
double flops_prefill(const ModelProfile& p, Index n);

/// 2 * n_layers * n * kv_width * bytes_per_element.
std::uint64_t kv_cache_bytes(const ModelProfile& p, Index n);

struct EfficiencyReport {
    double flops_before = 0.0;
    double flops_after = 0.0;
    double flops_fraction = 0.0;
    std::uint64_t kv_before = 0;  // full sequence (visual + text)
    std::uint64_t kv_after = 0;
    double kv_fraction = 0.0;         // full sequence
    double kv_fraction_visual = 0.0;  // visual tokens only
    double token_fraction = 0.0;      // visual tokens only
};

EfficiencyReport efficiency_report(const ModelProfile& p, const SequenceProfile& s);

/// Smallest-error integer n_text in [0, 10 * n_visual_before] whose FLOPs fraction is closest to
/// target_fraction (s.n_text is ignored). Throws Error(NoSolution) if the target is not bracketed.
Index calibrate_text_len(const ModelProfile& p, const SequenceProfile& s, double target_fraction);

}  // namespace mvprune
