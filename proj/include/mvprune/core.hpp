// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mvprune {

using Index = std::size_t;

/// Token embeddings of one view: one row per token, binary32 storage.
using TokenMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-view retention fractions, aligned with ViewTokenSet order.
using RatioVector = Eigen::VectorXd;

enum class ErrorCode {
    InvalidArgument,
    DimMismatch,
    NonfiniteValue,
    DuplicateLabel,
    KOutOfRange,
    OracleFailure,
    ConfigInvalid,
    SelectionMismatch,
    InfeasibleBudget,
    Malformed,
    IoError,
    NoSolution,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return m_code; }

private:
    ErrorCode m_code;
};

enum class DistanceMeasure { Cosine, L1, L2 };

std::string_view to_string(DistanceMeasure m);
DistanceMeasure parse_distance_measure(std::string_view text);

/// Camera label. The six surround views are enumerated; anything else is kept by name.
class ViewLabel {
public:
    enum class Kind { Front, FrontLeft, FrontRight, Back, BackLeft, BackRight, Other };

    ViewLabel(Kind kind);  // NOLINT(google-explicit-constructor)

    /// Standard names map onto their enumerated kind; other text becomes Other(name).
    static ViewLabel from_name(std::string_view name);

    Kind kind() const noexcept { return m_kind; }
    const std::string& name() const noexcept { return m_name; }

    friend bool operator==(const ViewLabel& a, const ViewLabel& b) { return a.m_name == b.m_name; }

private:
    ViewLabel(Kind kind, std::string name);

    Kind m_kind;
    std::string m_name;
};

/// FRONT, FRONT_LEFT, FRONT_RIGHT, BACK, BACK_LEFT, BACK_RIGHT.
std::vector<ViewLabel> standard_labels();

/// 64-bit FNV-1a over the label name. Stable across platforms and releases.
std::uint64_t stable_hash(const ViewLabel& label);

struct View {
    ViewLabel label;
    TokenMatrix tokens;
};

struct ViewTokenSet {
    std::vector<View> views;

    std::size_t size() const noexcept { return views.size(); }
    Index dim() const { return views.empty() ? 0 : static_cast<Index>(views.front().tokens.cols()); }
    Index total_tokens() const;
};

/// Throws Error(DimMismatch | NonfiniteValue | DuplicateLabel | InvalidArgument).
void validate_viewset(const ViewTokenSet& vs);

/// clamp(round(alpha * n), 1, n), with round-half-away-from-zero; 0 when n == 0.
Index retained_count(double alpha, Index n);

enum class SelectionStrategy { Tfps, Nearest, Random, Stride };

std::string_view to_string(SelectionStrategy s);
SelectionStrategy parse_strategy(std::string_view text);

struct ViewSelection {
    ViewLabel label;
    Index n_tokens = 0;
    std::vector<Index> kept;   // strictly increasing
    std::vector<Index> order;  // selection order
};

struct Selection {
    DistanceMeasure metric = DistanceMeasure::Cosine;
    SelectionStrategy strategy = SelectionStrategy::Tfps;
    std::uint64_t seed = 0;
    RatioVector ratios;
    std::vector<ViewSelection> views;

    Index total_kept() const;
};

/// Checks a selection against the view set it was drawn from: labels, counts and index bounds.
/// Throws Error(SelectionMismatch).
void validate_selection(const Selection& sel, const ViewTokenSet& vs);

/// Worker cap from MVPRUNE_THREADS (default: hardware concurrency, at least 1).
unsigned thread_budget();

}  // namespace mvprune
