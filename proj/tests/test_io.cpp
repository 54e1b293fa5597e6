// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "mvprune/io.hpp"
#include "mvprune/tfps.hpp"

using namespace mvprune;
using mvprune::testing::rows;

namespace {

std::string to_bytes(const ViewTokenSet& vs) {
    std::ostringstream out(std::ios::binary);
    io::write_mvtk(vs, out);
    return out.str();
}

ViewTokenSet from_bytes(const std::string& bytes) {
    std::istringstream in(bytes, std::ios::binary);
    return io::read_mvtk(in);
}

std::string malformed_message(const std::string& bytes) {
    try {
        from_bytes(bytes);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Malformed);
        return e.what();
    }
    FAIL("expected MALFORMED");
    return {};
}

void put_u32(std::string& s, std::size_t at, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) s[at + static_cast<std::size_t>(b)] = static_cast<char>((v >> (8 * b)) & 0xFF);
}

}  // namespace

TEST_CASE("MVTK golden bytes for a one-token view") {
    ViewTokenSet vs{{{ViewLabel::Kind::Front, rows({{1.0f}})}}};
    const std::string bytes = to_bytes(vs);
    const std::string expected = std::string("MVTK") + std::string("\x01\x00\x00\x00", 4) +
                                 std::string("\x01\x00\x00\x00", 4) + std::string("\x05\x00", 2) + "FRONT" +
                                 std::string("\x01\x00\x00\x00", 4) + std::string("\x01\x00\x00\x00", 4) +
                                 std::string("\x00\x00\x80\x3f", 4);
    CHECK(bytes.size() == 31);
    CHECK(bytes == expected);
}

TEST_CASE("MVTK round trips") {
    SUBCASE("surround-view sized tensor") {
        Rng rng(12);
        const ViewTokenSet vs = mvprune::testing::uniform_views(6, 256, 1152, rng);
        const std::string bytes = to_bytes(vs);
        CHECK(bytes.size() == 12 + 6 * (2 + 8) + (5 + 10 + 11 + 4 + 9 + 10) + 6ULL * 256 * 1152 * 4);
        const ViewTokenSet back = from_bytes(bytes);
        REQUIRE(back.size() == 6);
        for (std::size_t v = 0; v < 6; ++v) {
            CHECK(back.views[v].label == vs.views[v].label);
            CHECK(back.views[v].tokens == vs.views[v].tokens);
        }
    }
    SUBCASE("empty view and custom label") {
        ViewTokenSet vs{{{ViewLabel::from_name("thermal"), TokenMatrix(0, 3)},
                         {ViewLabel::Kind::Back, rows({{1.f, -2.f, 3.5f}, {0.f, 0.f, -0.f}})}}};
        const ViewTokenSet back = from_bytes(to_bytes(vs));
        CHECK(back.views[0].label.name() == "thermal");
        CHECK(back.views[0].tokens.rows() == 0);
        CHECK(back.views[1].tokens == vs.views[1].tokens);
        CHECK(std::signbit(back.views[1].tokens(1, 2)));
    }
    SUBCASE("files") {
        const auto path = std::filesystem::temp_directory_path() / "mvprune_io_test.mvtk";
        ViewTokenSet vs{{{ViewLabel::Kind::FrontLeft, rows({{0.25f, 0.5f}})}}};
        io::write_mvtk_file(vs, path);
        CHECK(io::read_mvtk_file(path).views[0].tokens == vs.views[0].tokens);
        std::filesystem::remove(path);
        CHECK_THROWS_AS(io::read_mvtk_file(path), Error);
    }
}

TEST_CASE("MVTK rejects malformed input") {
    ViewTokenSet vs{{{ViewLabel::Kind::Front, rows({{1.f, 2.f}, {3.f, 4.f}})}}};
    const std::string good = to_bytes(vs);

    std::string bad_magic = good;
    bad_magic[0] = 'X';
    CHECK(malformed_message(bad_magic).find("offset 0") != std::string::npos);

    std::string v2 = good;
    put_u32(v2, 4, 2);
    CHECK(malformed_message(v2).find("version") != std::string::npos);

    CHECK(malformed_message(good.substr(0, 10)).find("offset") != std::string::npos);
    CHECK(malformed_message(good.substr(0, good.size() - 1)).find("offset") != std::string::npos);
    CHECK(malformed_message(good + std::string(1, '\0')).find("offset") != std::string::npos);

    std::string zero_views = good;
    put_u32(zero_views, 8, 0);
    malformed_message(zero_views);

    // A NaN in the payload fails validation, not parsing.
    std::string nan = good;
    put_u32(nan, good.size() - 4, 0x7fc00000u);
    try {
        from_bytes(nan);
        FAIL("expected NONFINITE_VALUE");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonfiniteValue);
    }

    ViewTokenSet mixed{{{ViewLabel::Kind::Front, rows({{1.f, 2.f}})}, {ViewLabel::Kind::Back, rows({{1.f}})}}};
    CHECK_THROWS_AS(to_bytes(mixed), Error);
}

TEST_CASE("canonical JSON formatting") {
    const nlohmann::json j = {{"b", 1},
                              {"a", {1.0, 2.5, 0.1}},
                              {"c", {{"z", std::numeric_limits<double>::infinity()}, {"y", "text"}}},
                              {"d", nlohmann::json::array({nlohmann::json{{"k", 1}}})}};
    const std::string text = io::canonical_dump(j);
    const std::string expected =
        "{\n"
        "  \"a\": [1.0, 2.5, 0.10000000000000001],\n"
        "  \"b\": 1,\n"
        "  \"c\": {\n"
        "    \"y\": \"text\",\n"
        "    \"z\": null\n"
        "  },\n"
        "  \"d\": [\n"
        "    {\n"
        "      \"k\": 1\n"
        "    }\n"
        "  ]\n"
        "}\n";
    CHECK(text == expected);
    CHECK(io::canonical_dump(io::parse_json(text)) == text);
    CHECK_THROWS_AS(io::parse_json("{\"a\": "), Error);
}

TEST_CASE("selection JSON") {
    Rng rng(4);
    const ViewTokenSet vs = mvprune::testing::uniform_views(3, 20, 4, rng);
    RatioVector ratios(3);
    ratios << 0.25, 0.5, 1.0;
    const Selection sel = select_multiview(vs, ratios, DistanceMeasure::L2, SelectionStrategy::Tfps, 77);
    const std::string text = io::write_selection_json(sel);
    CHECK(text == io::write_selection_json(sel));
    const auto j = io::parse_json(text);
    CHECK(j.at("kind") == "selection");
    CHECK(j.at("schema_version") == 1);
    CHECK(j.at("total_kept") == 5 + 10 + 20);
    CHECK(j.at("views").at(0).at("k") == 5);
    const Selection back = io::selection_from_json(j);
    CHECK_NOTHROW(validate_selection(back, vs));
    CHECK(io::write_selection_json(back) == text);

    auto wrong = j;
    wrong["kind"] = "scene";
    CHECK_THROWS_AS(io::selection_from_json(wrong), Error);
    auto missing = j;
    missing.erase("metric");
    CHECK_THROWS_AS(io::selection_from_json(missing), Error);
}

TEST_CASE("optimizer run JSON keeps the score identity and failed trials") {
    ObjectiveConfig cfg;
    int calls = 0;
    cfg.oracle = [&calls](const RatioVector& r) {
        if (++calls == 2) throw std::runtime_error("down");
        return 1.0 - r.mean();
    };
    const auto run = optimize(OptimizerMethod::Tpe, SearchSpace::with_defaults(2), cfg, 12, 5);
    const std::string text = io::write_run_json(run);
    CHECK(text.find("wall_time_s") == std::string::npos);
    CHECK(io::write_run_json(run, true).find("wall_time_s") != std::string::npos);

    const OptimizerRun back = io::run_from_json(io::parse_json(text));
    REQUIRE(back.trials.size() == 12);
    CHECK(back.best_index == run.best_index);
    CHECK(back.trials[1].failed);
    CHECK(std::isnan(back.trials[1].reward));
    CHECK(std::isinf(back.trials[1].score));
    for (const auto& t : back.trials) {
        if (t.failed) continue;
        CHECK(t.score == composite_score(t.reward, penalty_of(t.ratios), back.reward_scale, back.penalty_scale));
    }
    CHECK(io::write_run_json(back) == text);
}

TEST_CASE("scene and report JSON") {
    const SceneConfig cfg;
    const Scene scene = generate_scene(cfg, 9);
    const auto file = io::scene_from_json(io::parse_json(io::canonical_dump(io::scene_to_json(cfg, 9, &scene.truth))));
    CHECK(file.seed == 9);
    REQUIRE(file.truth.has_value());
    CHECK(file.truth->members == scene.truth.members);
    CHECK(file.truth->centers[0] == scene.truth.centers[0]);
    const Scene again = generate_scene(file.config, file.seed);
    CHECK(again.views.views[3].tokens == scene.views.views[3].tokens);

    const ModelProfile p = ModelProfile::llama_8b();
    const SequenceProfile s{4374, 438, 0};
    const auto j = io::parse_json(io::write_report_json(p, s, efficiency_report(p, s)));
    CHECK(j.at("kind") == "efficiency_report");
    CHECK(j.at("kv_fraction_full").get<double>() == doctest::Approx(438.0 / 4374.0));
}
