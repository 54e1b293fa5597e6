// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvprune/core.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <unordered_set>

namespace mvprune {

namespace {

constexpr std::array<std::string_view, 6> kStandardNames = {
    "FRONT", "FRONT_LEFT", "FRONT_RIGHT", "BACK", "BACK_LEFT", "BACK_RIGHT"};

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
        case ErrorCode::DimMismatch: return "DIM_MISMATCH";
        case ErrorCode::NonfiniteValue: return "NONFINITE_VALUE";
        case ErrorCode::DuplicateLabel: return "DUPLICATE_LABEL";
        case ErrorCode::KOutOfRange: return "K_OUT_OF_RANGE";
        case ErrorCode::OracleFailure: return "ORACLE_FAILURE";
        case ErrorCode::ConfigInvalid: return "CONFIG_INVALID";
        case ErrorCode::SelectionMismatch: return "SELECTION_MISMATCH";
        case ErrorCode::InfeasibleBudget: return "INFEASIBLE_BUDGET";
        case ErrorCode::Malformed: return "MALFORMED";
        case ErrorCode::IoError: return "IO_ERROR";
        case ErrorCode::NoSolution: return "NO_SOLUTION";
    }
    return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), m_code(code) {}

std::string_view to_string(DistanceMeasure m) {
    switch (m) {
        case DistanceMeasure::Cosine: return "cosine";
        case DistanceMeasure::L1: return "l1";
        case DistanceMeasure::L2: return "l2";
    }
    return "cosine";
}

DistanceMeasure parse_distance_measure(std::string_view text) {
    const std::string t = lower(text);
    if (t == "cosine" || t == "cos") return DistanceMeasure::Cosine;
    if (t == "l1") return DistanceMeasure::L1;
    if (t == "l2") return DistanceMeasure::L2;
    throw Error(ErrorCode::InvalidArgument, "unknown distance measure '" + std::string(text) + "'");
}

std::string_view to_string(SelectionStrategy s) {
    switch (s) {
        case SelectionStrategy::Tfps: return "tfps";
        case SelectionStrategy::Nearest: return "nearest";
        case SelectionStrategy::Random: return "random";
        case SelectionStrategy::Stride: return "stride";
    }
    return "tfps";
}

SelectionStrategy parse_strategy(std::string_view text) {
    const std::string t = lower(text);
    if (t == "tfps") return SelectionStrategy::Tfps;
    if (t == "nearest") return SelectionStrategy::Nearest;
    if (t == "random") return SelectionStrategy::Random;
    if (t == "stride") return SelectionStrategy::Stride;
    throw Error(ErrorCode::InvalidArgument, "unknown selection strategy '" + std::string(text) + "'");
}

ViewLabel::ViewLabel(Kind kind) : m_kind(kind) {
    if (kind == Kind::Other) {
        throw Error(ErrorCode::InvalidArgument, "ViewLabel::Other requires a name; use from_name");
    }
    m_name = std::string(kStandardNames[static_cast<std::size_t>(kind)]);
}

ViewLabel::ViewLabel(Kind kind, std::string name) : m_kind(kind), m_name(std::move(name)) {}

ViewLabel ViewLabel::from_name(std::string_view name) {
    for (std::size_t i = 0; i < kStandardNames.size(); ++i) {
        if (name == kStandardNames[i]) {
            return ViewLabel(static_cast<Kind>(i));
        }
    }
    if (name.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty view label");
    }
    return ViewLabel(Kind::Other, std::string(name));
}

std::vector<ViewLabel> standard_labels() {
    return {ViewLabel::Kind::Front,   ViewLabel::Kind::FrontLeft, ViewLabel::Kind::FrontRight,
            ViewLabel::Kind::Back,    ViewLabel::Kind::BackLeft,  ViewLabel::Kind::BackRight};
}

std::uint64_t stable_hash(const ViewLabel& label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : label.name()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Index ViewTokenSet::total_tokens() const {
    Index total = 0;
    for (const auto& v : views) {
        total += static_cast<Index>(v.tokens.rows());
    }
    return total;
}

void validate_viewset(const ViewTokenSet& vs) {
    if (vs.views.empty()) {
        throw Error(ErrorCode::InvalidArgument, "view set has no views");
    }
    const auto dim = vs.views.front().tokens.cols();
    std::unordered_set<std::string> seen;
    for (std::size_t v = 0; v < vs.views.size(); ++v) {
        const auto& view = vs.views[v];
        if (view.tokens.cols() < 1) {
            throw Error(ErrorCode::DimMismatch, "view '" + view.label.name() + "' has dim 0");
        }
        if (view.tokens.cols() != dim) {
            throw Error(ErrorCode::DimMismatch, "view '" + view.label.name() + "' has dim " +
                                                    std::to_string(view.tokens.cols()) + ", expected " +
                                                    std::to_string(dim));
        }
        if (!seen.insert(view.label.name()).second) {
            throw Error(ErrorCode::DuplicateLabel, "label '" + view.label.name() + "' appears twice");
        }
        if (!view.tokens.allFinite()) {
            throw Error(ErrorCode::NonfiniteValue, "view '" + view.label.name() + "' contains NaN/Inf");
        }
    }
}

Index retained_count(double alpha, Index n) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "retention ratio must lie in [0, 1]");
    }
    if (n == 0) {
        return 0;
    }
    const auto k = static_cast<Index>(std::llround(alpha * static_cast<double>(n)));
    return std::clamp<Index>(k, 1, n);
}

Index Selection::total_kept() const {
    Index total = 0;
    for (const auto& v : views) {
        total += v.kept.size();
    }
    return total;
}

void validate_selection(const Selection& sel, const ViewTokenSet& vs) {
    if (sel.views.size() != vs.views.size()) {
        throw Error(ErrorCode::SelectionMismatch, "selection has " + std::to_string(sel.views.size()) +
                                                      " views, view set has " + std::to_string(vs.views.size()));
    }
    for (std::size_t v = 0; v < vs.views.size(); ++v) {
        const auto& s = sel.views[v];
        const auto n = static_cast<Index>(vs.views[v].tokens.rows());
        if (!(s.label == vs.views[v].label)) {
            throw Error(ErrorCode::SelectionMismatch, "label mismatch at view " + std::to_string(v));
        }
        if (s.n_tokens != n) {
            throw Error(ErrorCode::SelectionMismatch, "token count mismatch for '" + s.label.name() + "'");
        }
        for (std::size_t i = 0; i < s.kept.size(); ++i) {
            if (s.kept[i] >= n || (i > 0 && s.kept[i] <= s.kept[i - 1])) {
                throw Error(ErrorCode::SelectionMismatch,
                            "kept indices of '" + s.label.name() + "' are out of range or not increasing");
            }
        }
        if (s.order.size() != s.kept.size()) {
            throw Error(ErrorCode::SelectionMismatch, "order/kept size mismatch for '" + s.label.name() + "'");
        }
        if (sel.ratios.size() == static_cast<Eigen::Index>(vs.views.size()) &&
            s.kept.size() != retained_count(sel.ratios[static_cast<Eigen::Index>(v)], n)) {
            throw Error(ErrorCode::SelectionMismatch, "kept count of '" + s.label.name() + "' disagrees with ratio");
        }
    }
}

unsigned thread_budget() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MVPRUNE_THREADS")) {
        unsigned cap = 0;
        const std::string_view text(env);
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
        if (ec == std::errc() && ptr == text.data() + text.size() && cap >= 1) {
            return std::min(hw, cap);
        }
    }
    return hw;
}

}  // namespace mvprune
