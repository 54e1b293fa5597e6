// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace mvprune::bench {

struct CriterionResult {
    std::string id;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct Criterion {
    std::string id;
    std::string title;
    std::function<CriterionResult()> run;
};

/// A1..A10, in order.
std::vector<Criterion> acceptance_criteria();

/// Runs the criteria whose ids are listed (all when empty).
std::vector<CriterionResult> run_acceptance(const std::vector<std::string>& only = {});

/// One line per criterion plus a totals line.
std::string format_summary(const std::vector<CriterionResult>& results);

}  // namespace mvprune::bench
