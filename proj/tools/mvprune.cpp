// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

// mvprune: multi-view visual-token pruning toolkit.
//
// Exit codes: 0 ok, 1 bench checks failed, 2 usage, 3 malformed input, 4 internal error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acceptance.hpp"
#include "mvprune/allocator.hpp"
#include "mvprune/core.hpp"
#include "mvprune/efficiency.hpp"
#include "mvprune/io.hpp"
#include "mvprune/scene.hpp"
#include "mvprune/tfps.hpp"

namespace {

using namespace mvprune;

constexpr int kExitOk = 0;
constexpr int kExitChecksFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitInternal = 4;

struct GlobalOptions {
    std::uint64_t seed = 42;
    std::string output;
    bool json = false;
};

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::ConfigInvalid:
        case ErrorCode::InfeasibleBudget:
            return kExitUsage;
        case ErrorCode::Malformed:
        case ErrorCode::DimMismatch:
        case ErrorCode::NonfiniteValue:
        case ErrorCode::DuplicateLabel:
        case ErrorCode::IoError:
        case ErrorCode::SelectionMismatch:
        case ErrorCode::NoSolution:
            return kExitInput;
        default:
            return kExitInternal;
    }
}

std::vector<double> parse_csv_reals(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) {
            throw Error(ErrorCode::InvalidArgument, "not a number in list: '" + item + "'");
        }
        out.push_back(x);
    }
    if (out.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty list");
    }
    return out;
}

// Canonical JSON goes to --output (file) and, with --json, to stdout. Human text goes to stdout
// only when --json is off.
void emit(const GlobalOptions& g, const std::string& json_text, const std::string& human) {
    if (!g.output.empty()) {
        io::write_text_file(g.output, json_text);
    }
    if (g.json) {
        std::cout << json_text;
    } else {
        std::cout << human;
    }
}

// ---- prune ----------------------------------------------------------------------------------

struct PruneOptions {
    std::string input;
    std::string ratios;
    std::optional<double> ratio;
    std::optional<double> prune_fraction;
    std::string metric = "cosine";
    std::string strategy = "tfps";
    bool first_zero = false;
};

int run_prune(const GlobalOptions& g, const PruneOptions& o) {
    const int given = (o.ratios.empty() ? 0 : 1) + (o.ratio ? 1 : 0) + (o.prune_fraction ? 1 : 0);
    if (given != 1) {
        throw Error(ErrorCode::InvalidArgument, "give exactly one of --ratios, --ratio, --prune-fraction");
    }
    const auto metric = parse_distance_measure(o.metric);
    const auto strategy = parse_strategy(o.strategy);
    std::vector<double> per_view;
    if (!o.ratios.empty()) {
        per_view = parse_csv_reals(o.ratios);
    }
    const double uniform = o.ratio ? *o.ratio : (o.prune_fraction ? 1.0 - *o.prune_fraction : 0.0);
    for (const double a : per_view.empty() ? std::vector<double>{uniform} : per_view) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "retention ratios must lie in [0, 1]");
        }
    }

    const ViewTokenSet vs = io::read_mvtk_file(o.input);
    RatioVector ratios(static_cast<Eigen::Index>(vs.size()));
    if (per_view.empty()) {
        ratios.setConstant(uniform);
    } else {
        if (per_view.size() != vs.size()) {
            throw Error(ErrorCode::InvalidArgument, "--ratios has " + std::to_string(per_view.size()) +
                                                        " entries but the input has " + std::to_string(vs.size()) +
                                                        " views");
        }
        for (std::size_t v = 0; v < per_view.size(); ++v) ratios[static_cast<Eigen::Index>(v)] = per_view[v];
    }

    const Selection sel =
        select_multiview(vs, ratios, metric, strategy, g.seed, o.first_zero ? FirstPick::Zero : FirstPick::Random);
    std::ostringstream human;
    for (const auto& v : sel.views) {
        human << v.label.name() << ": kept " << v.kept.size() << " of " << v.n_tokens << "\n";
    }
    human << "total: kept " << sel.total_kept() << " of " << vs.total_tokens() << "\n";
    emit(g, io::write_selection_json(sel), human.str());
    return kExitOk;
}

// ---- allocate -------------------------------------------------------------------------------

struct AllocateOptions {
    std::string scene;
    std::string gen_scene;
    std::string objective = "coverage";
    Index views = 1;
    std::string method = "tpe";
    Index budget = 100;
    double reward_scale = 0.5;
    double penalty_scale = -0.05;
    std::string metric = "cosine";
    bool timing = false;
};

int run_allocate(const GlobalOptions& g, const AllocateOptions& o) {
    const auto method = parse_optimizer_method(o.method);
    const auto metric = parse_distance_measure(o.metric);
    if (o.budget < 1) {
        throw Error(ErrorCode::InvalidArgument, "--budget must be at least 1");
    }
    ObjectiveConfig obj;
    obj.reward_scale = o.reward_scale;
    obj.penalty_scale = o.penalty_scale;

    std::optional<CoverageTable> table;
    Index n_views = 0;
    if (o.objective == "quadratic") {
        if (!o.scene.empty() || !o.gen_scene.empty()) {
            throw Error(ErrorCode::InvalidArgument, "--objective quadratic takes no scene");
        }
        n_views = o.views;
        // Separable test objective with its optimum at 0.3 in every view.
        obj.oracle = [](const RatioVector& a) { return (1.0 - (a.array() - 0.3).square()).prod(); };
    } else if (o.objective == "coverage") {
        if (o.scene.empty() == o.gen_scene.empty()) {
            throw Error(ErrorCode::InvalidArgument, "give exactly one of --scene or --gen-scene");
        }
        SceneConfig cfg;
        std::uint64_t scene_seed = g.seed;
        std::optional<SceneTruth> pinned;
        if (!o.scene.empty()) {
            auto file = io::scene_from_json(io::parse_json(io::read_text_file(o.scene)));
            cfg = file.config;
            scene_seed = file.seed;
            pinned = std::move(file.truth);
        } else if (o.gen_scene != "default") {
            throw Error(ErrorCode::InvalidArgument, "--gen-scene accepts only 'default'");
        }
        Scene scene = generate_scene(cfg, scene_seed);
        if (pinned && (pinned->members != scene.truth.members || pinned->centers.size() != scene.truth.centers.size())) {
            throw Error(ErrorCode::Malformed, "scene truth in " + o.scene + " does not match its config and seed");
        }
        table.emplace(scene, metric, SelectionStrategy::Tfps);
        n_views = cfg.n_views();
        obj.oracle = [&table](const RatioVector& a) { return table->reward(a); };
    } else {
        throw Error(ErrorCode::InvalidArgument, "--objective must be coverage or quadratic");
    }

    const OptimizerRun run = optimize(method, SearchSpace::with_defaults(n_views), obj, o.budget, g.seed);
    std::ostringstream human;
    human << to_string(method) << ": " << run.trials.size() << " trials, best #" << run.best_index
          << " score " << run.best().score << " reward " << run.best().reward << "\nratios:";
    for (Eigen::Index v = 0; v < run.best().ratios.size(); ++v) human << " " << run.best().ratios[v];
    human << "\n";
    emit(g, io::write_run_json(run, o.timing), human.str());
    return kExitOk;
}

// ---- gen-scene ------------------------------------------------------------------------------

struct GenSceneOptions {
    Index tokens_per_view = 256;
    Index dim = 32;
    std::string clusters;
    std::string weights;
    double cover_radius = 0.15;
    double cluster_std = 0.05;
    double background_std = 0.05;
    double background_offset = 1.0;
    std::string tokens_out;
};

int run_gen_scene(const GlobalOptions& g, const GenSceneOptions& o) {
    SceneConfig cfg;
    cfg.tokens_per_view = o.tokens_per_view;
    cfg.dim = o.dim;
    cfg.cover_radius = o.cover_radius;
    cfg.cluster_std = o.cluster_std;
    cfg.background_std = o.background_std;
    cfg.background_offset = o.background_offset;
    if (!o.clusters.empty()) {
        cfg.clusters_per_view.clear();
        for (const double c : parse_csv_reals(o.clusters)) {
            if (c < 0 || c != static_cast<double>(static_cast<Index>(c))) {
                throw Error(ErrorCode::InvalidArgument, "--clusters takes non-negative integers");
            }
            cfg.clusters_per_view.push_back(static_cast<Index>(c));
        }
    }
    if (!o.weights.empty()) {
        cfg.view_weights = parse_csv_reals(o.weights);
    }
    if (cfg.clusters_per_view.size() != cfg.labels.size()) {
        throw Error(ErrorCode::InvalidArgument, "--clusters needs one entry per view (6)");
    }
    cfg.validate();

    const Scene scene = generate_scene(cfg, g.seed);
    if (!o.tokens_out.empty()) {
        io::write_mvtk_file(scene.views, o.tokens_out);
    }
    std::ostringstream human;
    human << "scene seed " << g.seed << ": " << cfg.n_views() << " views x " << cfg.tokens_per_view
          << " tokens, dim " << cfg.dim << "\n";
    emit(g, io::canonical_dump(io::scene_to_json(cfg, g.seed, &scene.truth)), human.str());
    return kExitOk;
}

// ---- efficiency -----------------------------------------------------------------------------

struct EfficiencyOptions {
    Index visual_before = 4374;
    Index visual_after = 438;
    Index text = 0;
    ModelProfile profile = ModelProfile::llama_8b();
    bool no_quadratic = false;
    std::optional<double> calibrate;
};

int run_efficiency(const GlobalOptions& g, EfficiencyOptions o) {
    o.profile.include_attention_quadratic = !o.no_quadratic;
    o.profile.validate();
    SequenceProfile s{o.visual_before, o.visual_after, o.text};
    s.validate();
    std::optional<Index> calibrated;
    if (o.calibrate) {
        calibrated = calibrate_text_len(o.profile, s, *o.calibrate);
        s.n_text = *calibrated;
    }
    const auto report = efficiency_report(o.profile, s);
    nlohmann::json j = io::to_json(o.profile, s, report);
    if (calibrated) {
        j["calibration"] = {{"target_fraction", *o.calibrate}, {"n_text", *calibrated}};
    }
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "tokens %zu -> %zu (%.5f)\nflops fraction %.5f\nkv fraction visual %.5f, full %.5f\n",
                  s.n_visual_before, s.n_visual_after, report.token_fraction, report.flops_fraction,
                  report.kv_fraction_visual, report.kv_fraction);
    std::string human = buf;
    if (calibrated) {
        human += "calibrated n_text " + std::to_string(*calibrated) + "\n";
    }
    emit(g, io::canonical_dump(j), human);
    return kExitOk;
}

// ---- bench ----------------------------------------------------------------------------------

int run_bench(const GlobalOptions& g, const std::vector<std::string>& only) {
    const auto results = bench::run_acceptance(only);
    nlohmann::json j = {{"kind", "bench"}, {"schema_version", io::kSchemaVersion}};
    nlohmann::json rows = nlohmann::json::array();
    bool ok = !results.empty();
    for (const auto& r : results) {
        rows.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}});
        ok = ok && r.passed;
    }
    j["criteria"] = rows;
    j["passed"] = ok;
    const std::string summary = bench::format_summary(results);
    if (!g.output.empty()) {
        io::write_text_file(g.output, summary);
    }
    std::cout << (g.json ? io::canonical_dump(j) : summary);
    return ok ? kExitOk : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mvprune: diversity-aware visual token pruning for multi-view inputs"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Random seed (u64)")->capture_default_str();
    app.add_option("--output,-o", g.output, "Write the JSON result to this path");
    app.add_flag("--json", g.json, "Print canonical JSON on stdout instead of a summary");

    PruneOptions prune;
    auto* cmd_prune = app.add_subcommand("prune", "Select tokens from an MVTK dump");
    cmd_prune->add_option("--input,-i", prune.input, "MVTK token dump")->required();
    cmd_prune->add_option("--ratios", prune.ratios, "Per-view retention ratios, comma separated");
    cmd_prune->add_option("--ratio", prune.ratio, "Uniform retention ratio");
    cmd_prune->add_option("--prune-fraction", prune.prune_fraction, "Uniform fraction to remove (ratio = 1 - x)");
    cmd_prune->add_option("--metric", prune.metric, "cosine | l1 | l2")->capture_default_str();
    cmd_prune->add_option("--strategy", prune.strategy, "tfps | nearest | random | stride")->capture_default_str();
    cmd_prune->add_flag("--first-zero", prune.first_zero, "Start every greedy run at token 0 (debugging)");

    AllocateOptions alloc;
    auto* cmd_alloc = app.add_subcommand("allocate", "Optimize per-view retention ratios");
    cmd_alloc->add_option("--scene", alloc.scene, "Scene JSON written by gen-scene");
    cmd_alloc->add_option("--gen-scene", alloc.gen_scene, "Generate a scene from the default config ('default')");
    cmd_alloc->add_option("--objective", alloc.objective, "coverage | quadratic")->capture_default_str();
    cmd_alloc->add_option("--views", alloc.views, "View count for --objective quadratic")->capture_default_str();
    cmd_alloc->add_option("--method", alloc.method, "tpe | evolutionary | grid")->capture_default_str();
    cmd_alloc->add_option("--budget", alloc.budget, "Objective evaluations")->capture_default_str();
    cmd_alloc->add_option("--reward-scale", alloc.reward_scale)->capture_default_str();
    cmd_alloc->add_option("--penalty-scale", alloc.penalty_scale)->capture_default_str();
    cmd_alloc->add_option("--metric", alloc.metric, "Distance used by T-FPS in the reward")->capture_default_str();
    cmd_alloc->add_flag("--timing", alloc.timing, "Include per-trial wall times (non-deterministic)");

    GenSceneOptions scene;
    auto* cmd_scene = app.add_subcommand("gen-scene", "Generate a synthetic multi-view scene");
    cmd_scene->add_option("--tokens-per-view", scene.tokens_per_view)->capture_default_str();
    cmd_scene->add_option("--dim", scene.dim)->capture_default_str();
    cmd_scene->add_option("--clusters", scene.clusters, "Clusters per view, comma separated");
    cmd_scene->add_option("--weights", scene.weights, "View weights, comma separated");
    cmd_scene->add_option("--cover-radius", scene.cover_radius)->capture_default_str();
    cmd_scene->add_option("--cluster-std", scene.cluster_std)->capture_default_str();
    cmd_scene->add_option("--background-std", scene.background_std)->capture_default_str();
    cmd_scene->add_option("--background-offset", scene.background_offset)->capture_default_str();
    cmd_scene->add_option("--tokens", scene.tokens_out, "Also write the tokens as MVTK");

    EfficiencyOptions eff;
    auto* cmd_eff = app.add_subcommand("efficiency", "Prefill FLOPs and KV-cache accounting");
    cmd_eff->add_option("--visual-before", eff.visual_before)->capture_default_str();
    cmd_eff->add_option("--visual-after", eff.visual_after)->capture_default_str();
    cmd_eff->add_option("--text", eff.text)->capture_default_str();
    cmd_eff->add_option("--layers", eff.profile.n_layers)->capture_default_str();
    cmd_eff->add_option("--d-model", eff.profile.d_model)->capture_default_str();
    cmd_eff->add_option("--heads", eff.profile.n_heads)->capture_default_str();
    cmd_eff->add_option("--kv-heads", eff.profile.n_kv_heads)->capture_default_str();
    cmd_eff->add_option("--d-ff", eff.profile.d_ff)->capture_default_str();
    cmd_eff->add_option("--bytes-per-element", eff.profile.bytes_per_element)->capture_default_str();
    cmd_eff->add_flag("--vocab-head", eff.profile.include_vocab_head, "Count the LM head");
    cmd_eff->add_option("--vocab-size", eff.profile.vocab_size)->capture_default_str();
    cmd_eff->add_flag("--no-attention-quadratic", eff.no_quadratic, "Drop the n^2 attention term");
    cmd_eff->add_option("--calibrate", eff.calibrate, "Solve n_text for this target FLOPs fraction");

    std::vector<std::string> only;
    auto* cmd_bench = app.add_subcommand("bench", "Run the acceptance checks");
    cmd_bench->add_option("--only", only, "Criterion ids to run (default all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*cmd_prune) return run_prune(g, prune);
        if (*cmd_alloc) return run_allocate(g, alloc);
        if (*cmd_scene) return run_gen_scene(g, scene);
        if (*cmd_eff) return run_efficiency(g, eff);
        if (*cmd_bench) return run_bench(g, only);
    } catch (const Error& e) {
        std::cerr << "mvprune: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "mvprune: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
