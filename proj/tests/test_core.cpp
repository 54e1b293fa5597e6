// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "mvprune/core.hpp"
#include "mvprune/tfps.hpp"

using namespace mvprune;
using mvprune::testing::gaussian;

namespace {

ErrorCode code_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an mvprune::Error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("validate_viewset accepts matching dims and flags violations") {
    Rng rng(1);
    ViewTokenSet ok{{{ViewLabel::Kind::Front, gaussian(4, 8, rng)}, {ViewLabel::Kind::Back, gaussian(3, 8, rng)}}};
    CHECK_NOTHROW(validate_viewset(ok));

    ViewTokenSet dims{{{ViewLabel::Kind::Front, gaussian(4, 8, rng)}, {ViewLabel::Kind::Back, gaussian(3, 16, rng)}}};
    CHECK(code_of([&] { validate_viewset(dims); }) == ErrorCode::DimMismatch);

    ViewTokenSet nan{{{ViewLabel::Kind::Front, gaussian(4, 8, rng)}}};
    nan.views[0].tokens(2, 5) = std::numeric_limits<float>::quiet_NaN();
    CHECK(code_of([&] { validate_viewset(nan); }) == ErrorCode::NonfiniteValue);

    ViewTokenSet inf{{{ViewLabel::Kind::Front, gaussian(4, 8, rng)}}};
    inf.views[0].tokens(0, 0) = -std::numeric_limits<float>::infinity();
    CHECK(code_of([&] { validate_viewset(inf); }) == ErrorCode::NonfiniteValue);

    ViewTokenSet dup{{{ViewLabel::Kind::Front, gaussian(4, 8, rng)}, {ViewLabel::Kind::Front, gaussian(4, 8, rng)}}};
    CHECK(code_of([&] { validate_viewset(dup); }) == ErrorCode::DuplicateLabel);

    ViewTokenSet empty_view{{{ViewLabel::from_name("aux"), TokenMatrix(0, 4)}}};
    CHECK_NOTHROW(validate_viewset(empty_view));
}

TEST_CASE("view labels keep standard names and custom ones") {
    CHECK(ViewLabel::from_name("BACK_LEFT").kind() == ViewLabel::Kind::BackLeft);
    const auto other = ViewLabel::from_name("thermal");
    CHECK(other.kind() == ViewLabel::Kind::Other);
    CHECK(other.name() == "thermal");
    CHECK(standard_labels().size() == 6);
    CHECK(stable_hash(ViewLabel::Kind::Front) != stable_hash(ViewLabel::Kind::Back));
    // FNV-1a 64 of the empty string is the offset basis; of "a" is a published test vector.
    CHECK(stable_hash(ViewLabel::from_name("a")) == 0xaf63dc4c8601ec8cULL);
    CHECK_THROWS_AS(ViewLabel::from_name(""), Error);
}

TEST_CASE("retained_count reproduces the reported token counts") {
    CHECK(retained_count(0.25, 256) == 64);
    CHECK(retained_count(1.0, 729) == 729);
    CHECK(retained_count(0.10, 729) == 73);
    CHECK(6 * retained_count(0.10, 729) == 438);
    CHECK(retained_count(0.0996, 1536) == 153);
    CHECK(retained_count(0.0, 10) == 1);
    CHECK(retained_count(0.01, 10) == 1);
    CHECK(retained_count(0.5, 0) == 0);
    CHECK(retained_count(0.05, 10) == 1);  // 0.5 rounds away from zero
    CHECK(retained_count(0.15, 10) == 2);  // 1.5 -> 2
    CHECK_THROWS_AS(retained_count(1.5, 10), Error);
    CHECK_THROWS_AS(retained_count(-0.1, 10), Error);
}

TEST_CASE("retained_count is monotone in alpha and in n") {
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        const double a = rng.uniform();
        const double b = rng.uniform();
        const Index n = rng.uniform_below(5000);
        CHECK(retained_count(std::min(a, b), n) <= retained_count(std::max(a, b), n));
        const double alpha = 0.001 + 0.999 * rng.uniform();
        CHECK(retained_count(alpha, n) <= retained_count(alpha, n + 1 + rng.uniform_below(100)));
    }
}

TEST_CASE("selections re-validate against their source view set") {
    Rng rng(3);
    ViewTokenSet vs = mvprune::testing::uniform_views(6, 40, 5, rng);
    vs.views[2].tokens.resize(0, 5);
    for (int trial = 0; trial < 50; ++trial) {
        RatioVector ratios(6);
        for (Eigen::Index v = 0; v < 6; ++v) ratios[v] = rng.uniform(0.01, 1.0);
        const auto strategy = static_cast<SelectionStrategy>(trial % 4);
        const Selection sel = select_multiview(vs, ratios, DistanceMeasure::L2, strategy, rng.next_u64());
        CHECK_NOTHROW(validate_selection(sel, vs));
    }

    Selection bad = select_multiview(vs, RatioVector::Constant(6, 0.5), DistanceMeasure::L2,
                                     SelectionStrategy::Tfps, 1);
    bad.views[0].kept.back() = 40;
    CHECK(code_of([&] { validate_selection(bad, vs); }) == ErrorCode::SelectionMismatch);
}

TEST_CASE("enum parsing round trips") {
    for (const auto m : {DistanceMeasure::Cosine, DistanceMeasure::L1, DistanceMeasure::L2}) {
        CHECK(parse_distance_measure(to_string(m)) == m);
    }
    for (const auto s : {SelectionStrategy::Tfps, SelectionStrategy::Nearest, SelectionStrategy::Random,
                         SelectionStrategy::Stride}) {
        CHECK(parse_strategy(to_string(s)) == s);
    }
    CHECK_THROWS_AS(parse_distance_measure("hamming"), Error);
}
