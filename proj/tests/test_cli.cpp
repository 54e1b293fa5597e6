// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include "helpers.hpp"
#include "mvprune/io.hpp"

#ifndef MVPRUNE_CLI
#error "MVPRUNE_CLI must point at the mvprune executable"
#endif

using namespace mvprune;
namespace fs = std::filesystem;

namespace {

struct Output {
    int status = -1;
    std::string out;
};

Output run(const std::string& args) {
    const std::string cmd = std::string("\"") + MVPRUNE_CLI + "\" " + args + " 2>/dev/null";
    Output result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), n);
    const int raw = pclose(pipe);
    result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return result;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "mvprune_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

fs::path sample_tokens() {
    const fs::path path = scratch("tokens.mvtk");
    Rng rng(31);
    io::write_mvtk_file(mvprune::testing::uniform_views(6, 256, 24, rng), path);
    return path;
}

}  // namespace

TEST_CASE("cli prune") {
    const std::string input = sample_tokens().string();

    const auto quarter = run("prune --json --input " + input + " --ratio 0.25 --seed 3");
    REQUIRE(quarter.status == 0);
    const auto j = io::parse_json(quarter.out);
    CHECK(j.at("total_kept") == 384);
    for (const auto& v : j.at("views")) CHECK(v.at("k") == 64);

    const auto same = run("prune --json --input " + input + " --ratio 0.25 --seed 3");
    CHECK(same.out == quarter.out);

    const auto by_fraction = run("prune --json --input " + input + " --prune-fraction 0.75 --seed 3");
    CHECK(by_fraction.out == quarter.out);

    const auto identity = run("prune --json --input " + input + " --ratio 1.0");
    REQUIRE(identity.status == 0);
    for (const auto& v : io::parse_json(identity.out).at("views")) CHECK(v.at("k") == 256);

    const fs::path out = scratch("sel.json");
    CHECK(run("prune --input " + input + " --ratios 0.1,0.2,0.3,0.4,0.5,0.6 -o " + out.string()).status == 0);
    const auto sel = io::selection_from_json(io::parse_json(io::read_text_file(out)));
    CHECK(sel.views[5].kept.size() == retained_count(0.6, 256));

    CHECK(run("prune --input " + input + " --ratios 0.1,0.2").status == 2);
    CHECK(run("prune --input " + scratch("missing.mvtk").string() + " --ratio 0.5").status == 3);
    CHECK(run("prune --input " + input + " --ratio 0.5 --metric hamming").status == 2);
}

TEST_CASE("cli prune rejects malformed dumps") {
    const fs::path bad = scratch("bad.mvtk");
    io::write_text_file(bad, "MVTK\x02");
    CHECK(run("prune --input " + bad.string() + " --ratio 0.5").status == 3);
}

TEST_CASE("cli allocate") {
    const auto one = run("allocate --json --objective quadratic --views 3 --budget 1");
    REQUIRE(one.status == 0);
    const auto j = io::parse_json(one.out);
    CHECK(j.at("n_trials") == 1);
    for (const auto& r : j.at("best").at("ratios")) CHECK(r.get<double>() == 0.9);

    const auto grid =
        run("allocate --json --objective quadratic --views 1 --method grid --budget 6 --penalty-scale 0");
    REQUIRE(grid.status == 0);
    CHECK(io::parse_json(grid.out).at("best").at("ratios").at(0).get<double>() == 0.25);

    const auto a = run("allocate --json --gen-scene default --budget 20 --seed 4");
    const auto b = run("allocate --json --gen-scene default --budget 20 --seed 4");
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);

    CHECK(run("allocate --objective quadratic --budget 0").status == 2);
}

TEST_CASE("cli gen-scene round trips through allocate") {
    const fs::path scene = scratch("scene.json");
    const fs::path tokens = scratch("scene.mvtk");
    const auto first = run("gen-scene --json --seed 7");
    const auto second = run("gen-scene --json --seed 7");
    REQUIRE(first.status == 0);
    CHECK(first.out == second.out);
    CHECK(run("gen-scene --seed 7 -o " + scene.string() + " --tokens " + tokens.string()).status == 0);
    CHECK(io::read_mvtk_file(tokens).total_tokens() == 6 * 256);
    CHECK(run("allocate --scene " + scene.string() + " --budget 5").status == 0);
    CHECK(run("gen-scene --clusters 1,2 --weights 0.5,0.5,0.0").status == 2);
}

TEST_CASE("cli efficiency") {
    const auto r = run("efficiency --json --visual-before 4374 --visual-after 438");
    REQUIRE(r.status == 0);
    const auto j = io::parse_json(r.out);
    CHECK(j.at("kv_fraction_full").get<double>() == doctest::Approx(0.10014).epsilon(1e-4));
    const auto cal = run("efficiency --json --visual-before 4374 --visual-after 438 --calibrate 0.134");
    REQUIRE(cal.status == 0);
    const auto cj = io::parse_json(cal.out);
    CHECK(cj.at("calibration").at("n_text") == 275);
    CHECK(cj.at("sequence").at("n_text") == 275);
    CHECK(cj.at("flops_fraction").get<double>() == doctest::Approx(0.134).epsilon(1e-3));
    CHECK(run("efficiency --visual-before 10 --visual-after 20").status == 2);
}

TEST_CASE("cli bench subset") {
    const auto r = run("bench --only A4");
    CHECK(r.status == 0);
    CHECK(r.out.find("A4   PASS") != std::string::npos);
    CHECK(r.out.find("A5") == std::string::npos);
}

TEST_CASE("cli TPE is at least as good as grid on average") {
    double tpe = 0.0;
    double grid = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
        const std::string common = " --json --gen-scene default --budget 100 --seed " + std::to_string(seed);
        const auto a = run("allocate --method tpe" + common);
        const auto b = run("allocate --method grid" + common);
        REQUIRE(a.status == 0);
        REQUIRE(b.status == 0);
        tpe += io::parse_json(a.out).at("best").at("score").get<double>();
        grid += io::parse_json(b.out).at("best").at("score").get<double>();
    }
    CHECK(tpe >= grid);
}
