// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mvprune/allocator.hpp"
#include "mvprune/core.hpp"
#include "mvprune/efficiency.hpp"
#include "mvprune/scene.hpp"

namespace mvprune::io {

inline constexpr std::uint32_t kMvtkVersion = 1;
inline constexpr int kSchemaVersion = 1;

// MVTK layout, little-endian throughout:
//   "MVTK" | version u32 | view_count u32
//   per view: label_len u16 | label bytes (UTF-8) | n_tokens u32 | dim u32
//   per view, same order: n_tokens * dim binary32 values, row-major
// The file must end exactly after the last payload byte.

/// Returns the number of bytes written. Throws Error(IoError) on stream failure.
std::uint64_t write_mvtk(const ViewTokenSet& vs, std::ostream& out);

/// Throws Error(Malformed) with the byte offset of the problem, or the validate_viewset errors.
ViewTokenSet read_mvtk(std::istream& in);

void write_mvtk_file(const ViewTokenSet& vs, const std::filesystem::path& path);
ViewTokenSet read_mvtk_file(const std::filesystem::path& path);

/// Canonical text for a JSON value: sorted keys, two-space indentation, scalar arrays on one
/// line, reals with 17 significant digits (always carrying a '.' or exponent), non-finite reals
/// as null. Ends with a newline.
std::string canonical_dump(const nlohmann::json& value);

nlohmann::json to_json(const Selection& sel);
Selection selection_from_json(const nlohmann::json& j);

/// Wall times are machine-dependent and only emitted when include_timing is set.
nlohmann::json to_json(const OptimizerRun& run, bool include_timing = false);
OptimizerRun run_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ModelProfile& p, const SequenceProfile& s, const EfficiencyReport& r);

struct SceneFile {
    SceneConfig config;
    std::uint64_t seed = 0;
    std::optional<SceneTruth> truth;
};

nlohmann::json scene_to_json(const SceneConfig& cfg, std::uint64_t seed, const SceneTruth* truth);
SceneFile scene_from_json(const nlohmann::json& j);

std::string write_selection_json(const Selection& sel);
std::string write_run_json(const OptimizerRun& run, bool include_timing = false);
std::string write_report_json(const ModelProfile& p, const SequenceProfile& s, const EfficiencyReport& r);

/// Parses text; throws Error(Malformed) on syntax or schema errors.
nlohmann::json parse_json(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace mvprune::io
