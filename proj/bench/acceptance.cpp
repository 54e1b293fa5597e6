// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "acceptance.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "mvprune/allocator.hpp"
#include "mvprune/core.hpp"
#include "mvprune/efficiency.hpp"
#include "mvprune/io.hpp"
#include "mvprune/rng.hpp"
#include "mvprune/scene.hpp"
#include "mvprune/tfps.hpp"

namespace mvprune::bench {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), format, args...);
    return buf;
}

TokenMatrix gaussian_tokens(Index n, Index d, Rng& rng) {
    TokenMatrix t(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        t.data()[i] = static_cast<float>(rng.normal());
    }
    return t;
}

// Small integer coordinates: many exact distance ties and duplicate rows.
TokenMatrix lattice_tokens(Index n, Index d, Rng& rng) {
    TokenMatrix t(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        t.data()[i] = static_cast<float>(static_cast<int>(rng.uniform_below(5)) - 2);
    }
    return t;
}

Index draw_between(Rng& rng, Index lo, Index hi) { return lo + static_cast<Index>(rng.uniform_below(hi - lo + 1)); }

double min_pairwise(const TokenMatrix& tokens, const std::vector<Index>& set, DistanceMeasure m) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < set.size(); ++a) {
        for (std::size_t b = a + 1; b < set.size(); ++b) {
            best = std::min(best, pairwise_distance(tokens.row(static_cast<Eigen::Index>(set[a])),
                                                    tokens.row(static_cast<Eigen::Index>(set[b])), m));
        }
    }
    return best;
}

// Max over all k-subsets of the min pairwise distance, by enumeration.
double exhaustive_dispersion(const TokenMatrix& tokens, Index k, DistanceMeasure m) {
    const auto n = static_cast<Index>(tokens.rows());
    std::vector<Index> pick(k);
    for (Index i = 0; i < k; ++i) pick[i] = i;
    double best = -1.0;
    for (;;) {
        best = std::max(best, min_pairwise(tokens, pick, m));
        Index i = k;
        while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (Index j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
}

ViewTokenSet random_viewset(Rng& rng, Index max_views, Index max_tokens, Index max_dim) {
    const Index views = draw_between(rng, 1, max_views);
    const Index dim = draw_between(rng, 1, max_dim);
    ViewTokenSet vs;
    const auto labels = standard_labels();
    for (Index v = 0; v < views; ++v) {
        ViewLabel label = v < labels.size() && rng.uniform() < 0.7 ? labels[v]
                                                                    : ViewLabel::from_name("cam_" + std::to_string(v));
        vs.views.push_back(View{label, gaussian_tokens(draw_between(rng, 0, max_tokens), dim, rng)});
    }
    return vs;
}

CriterionResult finish(CriterionResult r, Clock::time_point start, double limit_s) {
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (limit_s > 0.0 && r.seconds >= limit_s) {
        r.passed = false;
        r.detail += fmt(" [runtime %.1fs exceeds %.0fs]", r.seconds, limit_s);
    }
    return r;
}

CriterionResult check_a1() {
    const auto start = Clock::now();
    CriterionResult r{"A1", "T-FPS incremental selector equals the naive oracle", true, "", 0.0};
    Index mismatches = 0;
    Index total = 0;
    for (const auto m : {DistanceMeasure::Cosine, DistanceMeasure::L1, DistanceMeasure::L2}) {
        Rng gen(1000 + static_cast<std::uint64_t>(m));
        for (int inst = 0; inst < 200; ++inst) {
            const Index n = draw_between(gen, 1, 128);
            const Index d = draw_between(gen, 1, 16);
            const Index k = draw_between(gen, 1, std::min<Index>(32, n));
            const TokenMatrix tokens = inst % 4 == 3 ? lattice_tokens(n, d, gen) : gaussian_tokens(n, d, gen);
            const std::uint64_t seed = gen.next_u64();
            Rng rng(seed);
            const auto fast = tfps_select(tokens, k, m, rng).order;
            const auto first = static_cast<Index>(Rng(seed).uniform_below(n));
            const auto slow = tfps_naive_oracle(tokens, k, m, first);
            ++total;
            if (fast != slow) {
                ++mismatches;
            }
        }
    }
    r.passed = mismatches == 0;
    r.detail = fmt("%zu/%zu instances identical", total - mismatches, total);
    return finish(r, start, 30.0);
}

CriterionResult check_a2() {
    const auto start = Clock::now();
    CriterionResult r{"A2", "max-min dispersion 1/2-approximation (L1, L2)", true, "", 0.0};
    Rng gen(2024);
    double worst = std::numeric_limits<double>::infinity();
    Index failures = 0;
    for (int inst = 0; inst < 500; ++inst) {
        const auto m = inst % 2 == 0 ? DistanceMeasure::L1 : DistanceMeasure::L2;
        const Index n = draw_between(gen, 2, 12);
        const Index k = draw_between(gen, 2, std::min<Index>(4, n));
        const Index d = draw_between(gen, 1, 8);
        const TokenMatrix tokens = inst % 5 == 4 ? lattice_tokens(n, d, gen) : gaussian_tokens(n, d, gen);
        Rng rng(gen.next_u64());
        const auto greedy = tfps_select(tokens, k, m, rng).order;
        const double got = min_pairwise(tokens, greedy, m);
        const double opt = exhaustive_dispersion(tokens, k, m);
        if (opt > 0.0) {
            worst = std::min(worst, got / opt);
        }
        if (got < 0.5 * opt) {
            ++failures;
        }
    }
    r.passed = failures == 0;
    r.detail = fmt("500 instances, %zu violations, worst greedy/optimum = %.4f", failures, worst);
    return finish(r, start, 60.0);
}

CriterionResult check_a3() {
    const auto start = Clock::now();
    CriterionResult r{"A3", "k-prefix nesting and byte-identical reruns", true, "", 0.0};
    Rng gen(33);
    Index nesting_failures = 0;
    Index rerun_failures = 0;
    for (int inst = 0; inst < 100; ++inst) {
        const auto m = static_cast<DistanceMeasure>(inst % 3);
        const Index n = draw_between(gen, 1, 64);
        const Index d = draw_between(gen, 1, 16);
        const TokenMatrix tokens = inst % 4 == 3 ? lattice_tokens(n, d, gen) : gaussian_tokens(n, d, gen);
        const std::uint64_t seed = gen.next_u64();
        Rng full_rng(seed);
        const auto full = tfps_select(tokens, n, m, full_rng).order;
        for (Index k = 1; k <= n; ++k) {
            Rng rng(seed);
            const auto part = tfps_select(tokens, k, m, rng).order;
            if (!std::equal(part.begin(), part.end(), full.begin())) {
                ++nesting_failures;
                break;
            }
        }

        const ViewTokenSet vs = random_viewset(gen, 6, 48, 12);
        RatioVector ratios(static_cast<Eigen::Index>(vs.size()));
        for (Eigen::Index v = 0; v < ratios.size(); ++v) ratios[v] = gen.uniform(0.01, 1.0);
        const auto strategy = static_cast<SelectionStrategy>(inst % 4);
        const std::string a = io::write_selection_json(select_multiview(vs, ratios, m, strategy, seed));
        const std::string b = io::write_selection_json(select_multiview(vs, ratios, m, strategy, seed));
        if (a != b) {
            ++rerun_failures;
        }
    }
    r.passed = nesting_failures == 0 && rerun_failures == 0;
    r.detail = fmt("100 instances: %zu nesting failures, %zu rerun mismatches", nesting_failures, rerun_failures);
    return finish(r, start, 0.0);
}

CriterionResult check_a4() {
    const auto start = Clock::now();
    CriterionResult r{"A4", "token arithmetic and KV fractions against reference values", true, "", 0.0};
    std::ostringstream detail;
    const Index k256 = retained_count(0.25, 256);
    const Index k729 = retained_count(0.10, 729);
    const Index k1536 = retained_count(0.0996, 1536);
    const bool counts_ok = k256 == 64 && k729 == 73 && 6 * k729 == 438 && 6 * 729 == 4374 && k1536 == 153;
    detail << "256->" << k256 << ", 6x729->" << 6 * k729 << " of " << 6 * 729 << ", 1536->" << k1536;

    const auto profile = ModelProfile::llama_8b();
    const auto surround = efficiency_report(profile, {4374, 438, 0});
    const auto compact = efficiency_report(profile, {1536, 153, 0});
    const double rel_surround = std::abs(surround.kv_fraction_visual - 230.0 / 2293.0) / (230.0 / 2293.0);
    const double rel_compact = std::abs(compact.kv_fraction_visual - 78.0 / 805.0) / (78.0 / 805.0);
    const bool kv_ok = std::abs(surround.kv_fraction_visual - 0.10014) < 5e-6 && rel_surround < 0.005 &&
                       std::abs(compact.kv_fraction_visual - 0.09961) < 5e-6 && rel_compact < 0.03;
    detail << fmt("; kv %.5f vs 230/2293 (rel %.3f%%), %.5f vs 78/805 (rel %.3f%%)", surround.kv_fraction_visual,
                  100 * rel_surround, compact.kv_fraction_visual, 100 * rel_compact);
    r.passed = counts_ok && kv_ok;
    r.detail = detail.str();
    return finish(r, start, 0.0);
}

CriterionResult check_a5() {
    const auto start = Clock::now();
    CriterionResult r{"A5", "composite score identity and argmax invariance", true, "", 0.0};
    Rng gen(55);
    double worst_rel = 0.0;
    Index argmax_mismatch = 0;
    ObjectiveConfig cfg;  // 0.5 / -0.05
    const double lambda = cfg.implied_lambda();
    for (int inst = 0; inst < 1000; ++inst) {
        RatioVector ratios(6);
        for (Eigen::Index v = 0; v < 6; ++v) ratios[v] = gen.uniform(0.01, 1.0);
        const double reward = gen.uniform();
        cfg.oracle = [reward](const RatioVector&) { return reward; };
        const Trial t = evaluate_objective(ratios, cfg);
        const double p = ratios.sum();
        const double single_lambda = reward - 0.1 * p;
        const double scale = std::abs(0.5 * reward) + std::abs(0.05 * p);
        worst_rel = std::max(worst_rel, std::abs(t.score - 0.5 * single_lambda) / scale);

        // Argmax over a random candidate set under both parameterizations.
        const Index count = draw_between(gen, 2, 50);
        Index best_two = 0;
        Index best_one = 0;
        double top_two = -std::numeric_limits<double>::infinity();
        double top_one = top_two;
        for (Index c = 0; c < count; ++c) {
            RatioVector x(6);
            for (Eigen::Index v = 0; v < 6; ++v) x[v] = gen.uniform(0.01, 1.0);
            const double rc = gen.uniform();
            const double two = composite_score(rc, penalty_of(x), cfg.reward_scale, cfg.penalty_scale);
            const double one = rc - lambda * penalty_of(x);
            if (two > top_two) { top_two = two; best_two = c; }
            if (one > top_one) { top_one = one; best_one = c; }
        }
        argmax_mismatch += best_two != best_one ? 1 : 0;
    }
    r.passed = worst_rel <= 1e-12 && argmax_mismatch == 0 && lambda == 0.1;
    r.detail = fmt("lambda = %.17g, worst relative deviation %.3g, %zu argmax mismatches", lambda, worst_rel,
                   argmax_mismatch);
    return finish(r, start, 0.0);
}

CriterionResult check_a6() {
    const auto start = Clock::now();
    CriterionResult r{"A6", "optimizers locate the 1-view quadratic optimum", true, "", 0.0};
    ObjectiveConfig cfg;
    cfg.penalty_scale = 0.0;
    cfg.oracle = [](const RatioVector& a) { return 1.0 - (a[0] - 0.3) * (a[0] - 0.3); };
    const auto space = SearchSpace::with_defaults(1);
    std::ostringstream detail;
    for (const auto method : {OptimizerMethod::Tpe, OptimizerMethod::Evolutionary, OptimizerMethod::Grid}) {
        int hits = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto run = optimize(method, space, cfg, 100, seed);
            hits += std::abs(run.best().ratios[0] - 0.3) <= 0.05 ? 1 : 0;
        }
        detail << to_string(method) << " " << hits << "/10 ";
        r.passed = r.passed && hits >= 9;
    }
    r.detail = detail.str();
    return finish(r, start, 10.0);
}

CriterionResult check_a7() {
    const auto start = Clock::now();
    CriterionResult r{"A7", "TPE allocation vs exhaustive ground truth; TPE leads evolutionary and grid", true, "",
                      0.0};
    const SceneConfig cfg;
    const std::vector<double> oracle_grid = {0.01, 0.02, 0.03, 0.05, 0.075, 0.1, 0.15, 0.25, 0.5, 1.0};
    const auto space = SearchSpace::with_defaults(cfg.n_views());
    double sum_tpe = 0.0;
    double sum_evo = 0.0;
    double sum_grid = 0.0;
    double worst_share = std::numeric_limits<double>::infinity();
    int below = 0;
    for (std::uint64_t scene_seed = 1; scene_seed <= 10; ++scene_seed) {
        const Scene scene = generate_scene(cfg, scene_seed);
        const CoverageTable table(scene, DistanceMeasure::Cosine, SelectionStrategy::Tfps);
        ObjectiveConfig obj;
        obj.oracle = [&table](const RatioVector& a) { return table.reward(a); };

        const auto tpe = tpe_optimize(space, obj, 100, scene_seed);
        const auto evo = evolutionary_optimize(space, obj, 100, scene_seed);
        const auto grid = grid_search(space, obj, 100, scene_seed);
        sum_tpe += tpe.best().score;
        sum_evo += evo.best().score;
        sum_grid += grid.best().score;

        // Ground truth at the token budget TPE actually spent.
        Index tokens = 0;
        for (Index v = 0; v < cfg.n_views(); ++v) {
            tokens += retained_count(tpe.best().ratios[static_cast<Eigen::Index>(v)], table.tokens_in_view(v));
        }
        const Allocation truth = optimal_allocation_oracle(cfg, scene_seed, oracle_grid, tokens);
        const double share = tpe.best().reward / truth.reward;
        worst_share = std::min(worst_share, share);
        below += share < 0.95 ? 1 : 0;
    }
    const double mean_tpe = sum_tpe / 10.0;
    const double mean_evo = sum_evo / 10.0;
    const double mean_grid = sum_grid / 10.0;
    r.passed = below == 0 && mean_tpe >= mean_evo && mean_tpe >= mean_grid;
    r.detail = fmt("worst TPE/oracle coverage %.4f (%d scenes < 0.95); mean best score tpe %.4f, evo %.4f, grid %.4f",
                   worst_share, below, mean_tpe, mean_evo, mean_grid);
    return finish(r, start, 300.0);
}

CriterionResult check_a8() {
    const auto start = Clock::now();
    CriterionResult r{"A8", "coverage ordering TFPS > RANDOM > NEAREST at retention 0.10", true, "", 0.0};
    const SceneConfig cfg;
    const RatioVector ratios = RatioVector::Constant(static_cast<Eigen::Index>(cfg.n_views()), 0.10);
    double tfps = 0.0;
    double random = 0.0;
    double nearest = 0.0;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const Scene scene = generate_scene(cfg, seed);
        const auto score = [&](SelectionStrategy s) {
            return coverage_reward(select_multiview(scene.views, ratios, DistanceMeasure::Cosine, s, seed),
                                   scene.truth, scene.views);
        };
        tfps += score(SelectionStrategy::Tfps) / 20.0;
        random += score(SelectionStrategy::Random) / 20.0;
        nearest += score(SelectionStrategy::Nearest) / 20.0;
    }
    r.passed = tfps > random && random > nearest && tfps - nearest >= 0.15;
    r.detail = fmt("mean coverage tfps %.4f, random %.4f, nearest %.4f (gap %.4f)", tfps, random, nearest,
                   tfps - nearest);
    return finish(r, start, 60.0);
}

CriterionResult check_a9() {
    const auto start = Clock::now();
    CriterionResult r{"A9", "cost-model properties and text-length calibration", true, "", 0.0};
    std::ostringstream detail;
    Rng gen(99);

    std::vector<ModelProfile> profiles = {ModelProfile::llama_8b()};
    {
        ModelProfile small;
        small.n_layers = 2;
        small.d_model = 64;
        small.n_heads = 4;
        small.n_kv_heads = 4;
        small.d_ff = 256;
        small.include_vocab_head = true;
        small.vocab_size = 1000;
        profiles.push_back(small);
    }

    bool superlinear = true;
    for (const auto& p : profiles) {
        for (int i = 0; i < 200; ++i) {
            const Index n = draw_between(gen, 1, 20000);
            superlinear = superlinear && flops_prefill(p, 2 * n) > 2.0 * flops_prefill(p, n);
        }
    }

    bool kv_linear = true;
    for (const auto& p : profiles) {
        for (int i = 0; i < 200; ++i) {
            const Index a = draw_between(gen, 0, 50000);
            const Index b = draw_between(gen, 0, 50000);
            kv_linear = kv_linear && kv_cache_bytes(p, a + b) == kv_cache_bytes(p, a) + kv_cache_bytes(p, b);
        }
    }

    // flops_fraction > token_fraction for every n_text > 0, checked on both reported token configurations.
    Index dilution_checked = 0;
    Index dilution_violations = 0;
    std::string first_violation;
    for (const auto& p : profiles) {
        for (const SequenceProfile base : {SequenceProfile{4374, 438, 0}, SequenceProfile{1536, 153, 0}}) {
            for (Index text = 1; text <= 16384; text *= 2) {
                SequenceProfile s = base;
                s.n_text = text;
                const auto rep = efficiency_report(p, s);
                ++dilution_checked;
                if (!(rep.flops_fraction > rep.token_fraction)) {
                    if (dilution_violations++ == 0) {
                        first_violation = fmt("n_layers=%zu visual %zu->%zu text %zu: flops %.5f <= tokens %.5f",
                                              p.n_layers, s.n_visual_before, s.n_visual_after, text,
                                              rep.flops_fraction, rep.token_fraction);
                    }
                }
            }
        }
    }

    bool calibrated = true;
    Index text_surround = 0;
    Index text_compact = 0;
    try {
        text_surround = calibrate_text_len(ModelProfile::llama_8b(), {4374, 438, 0}, 0.134);
        text_compact = calibrate_text_len(ModelProfile::llama_8b(), {1536, 153, 0}, 0.203);
        calibrated = text_surround > 0 && text_compact > 0;
    } catch (const Error&) {
        calibrated = false;
    }

    detail << "superlinear " << (superlinear ? "ok" : "FAIL") << "; kv linear " << (kv_linear ? "ok" : "FAIL")
           << "; flops>token " << (dilution_checked - dilution_violations) << "/" << dilution_checked;
    if (dilution_violations > 0) {
        detail << " (first: " << first_violation << ")";
    }
    detail << "; calibrated n_text " << text_surround << " (0.134), " << text_compact << " (0.203)";
    r.passed = superlinear && kv_linear && dilution_violations == 0 && calibrated;
    r.detail = detail.str();
    return finish(r, start, 0.0);
}

bool same_bits(const ViewTokenSet& a, const ViewTokenSet& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t v = 0; v < a.size(); ++v) {
        const auto& x = a.views[v].tokens;
        const auto& y = b.views[v].tokens;
        if (!(a.views[v].label == b.views[v].label) || x.rows() != y.rows() || x.cols() != y.cols()) return false;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (std::bit_cast<std::uint32_t>(x.data()[i]) != std::bit_cast<std::uint32_t>(y.data()[i])) return false;
        }
    }
    return true;
}

CriterionResult check_a10() {
    const auto start = Clock::now();
    CriterionResult r{"A10", "MVTK and JSON round trips are bit-exact", true, "", 0.0};
    Rng gen(1010);
    Index mvtk_fail = 0;
    Index json_fail = 0;
    for (int inst = 0; inst < 100; ++inst) {
        ViewTokenSet vs = random_viewset(gen, 6, 64, 16);
        // Exercise awkward but finite bit patterns.
        for (auto& view : vs.views) {
            for (Eigen::Index i = 0; i < view.tokens.size(); ++i) {
                const auto pick = gen.uniform_below(16);
                if (pick == 0) view.tokens.data()[i] = -0.0f;
                if (pick == 1) view.tokens.data()[i] = std::numeric_limits<float>::denorm_min();
                if (pick == 2) view.tokens.data()[i] = std::numeric_limits<float>::max();
                if (pick == 3) view.tokens.data()[i] = std::numeric_limits<float>::lowest();
            }
        }
        std::stringstream buf;
        io::write_mvtk(vs, buf);
        const std::string bytes = buf.str();
        std::stringstream in(bytes);
        const ViewTokenSet back = io::read_mvtk(in);
        std::stringstream again;
        io::write_mvtk(back, again);
        if (!same_bits(vs, back) || again.str() != bytes) {
            ++mvtk_fail;
        }

        // Selection, optimizer run and scene documents.
        RatioVector ratios(static_cast<Eigen::Index>(vs.size()));
        for (Eigen::Index v = 0; v < ratios.size(); ++v) ratios[v] = gen.uniform(0.01, 1.0);
        const Selection sel = select_multiview(vs, ratios, static_cast<DistanceMeasure>(inst % 3),
                                               static_cast<SelectionStrategy>(inst % 4), gen.next_u64());
        const std::string sel_text = io::write_selection_json(sel);
        const std::string sel_again = io::write_selection_json(io::selection_from_json(io::parse_json(sel_text)));

        ObjectiveConfig obj;
        obj.oracle = [&gen](const RatioVector& a) {
            if (gen.uniform() < 0.1) throw std::runtime_error("flaky oracle");
            return std::clamp(a.mean() + 0.1 * gen.normal(), 0.0, 1.0);
        };
        const auto run = optimize(static_cast<OptimizerMethod>(inst % 3),
                                  SearchSpace::with_defaults(draw_between(gen, 1, 6)), obj,
                                  draw_between(gen, 1, 30), gen.next_u64());
        const std::string run_text = io::write_run_json(run);
        const OptimizerRun run_back = io::run_from_json(io::parse_json(run_text));
        bool run_ok = io::write_run_json(run_back) == run_text && run_back.trials.size() == run.trials.size();
        for (std::size_t t = 0; run_ok && t < run.trials.size(); ++t) {
            const auto& a = run.trials[t];
            const auto& b = run_back.trials[t];
            run_ok = a.failed == b.failed && (a.ratios.array() == b.ratios.array()).all() &&
                     std::bit_cast<std::uint64_t>(a.penalty) == std::bit_cast<std::uint64_t>(b.penalty) &&
                     (a.failed || (std::bit_cast<std::uint64_t>(a.score) == std::bit_cast<std::uint64_t>(b.score) &&
                                   b.score == composite_score(b.reward, b.penalty, run_back.reward_scale,
                                                              run_back.penalty_scale)));
        }

        SceneConfig scfg;
        scfg.tokens_per_view = draw_between(gen, 8, 32);
        scfg.dim = draw_between(gen, 2, 8);
        scfg.clusters_per_view = {draw_between(gen, 0, 4), 1, 2, 0, 3, 1};
        const Scene scene = generate_scene(scfg, gen.next_u64());
        const std::string scene_text = io::canonical_dump(io::scene_to_json(scfg, 7, &scene.truth));
        const auto scene_back = io::scene_from_json(io::parse_json(scene_text));
        const std::string scene_again =
            io::canonical_dump(io::scene_to_json(scene_back.config, scene_back.seed, &*scene_back.truth));

        if (sel_text != sel_again || !run_ok || scene_text != scene_again) {
            ++json_fail;
        }
    }
    r.passed = mvtk_fail == 0 && json_fail == 0;
    r.detail = fmt("100 MVTK round trips (%zu failed), 100 JSON document sets (%zu failed)", mvtk_fail, json_fail);
    return finish(r, start, 0.0);
}

}  // namespace

std::vector<Criterion> acceptance_criteria() {
    return {
        {"A1", "T-FPS oracle equivalence", check_a1},
        {"A2", "dispersion 1/2-approximation", check_a2},
        {"A3", "nesting and determinism", check_a3},
        {"A4", "token arithmetic vs reported counts", check_a4},
        {"A5", "objective identity", check_a5},
        {"A6", "optimizers on analytic objective", check_a6},
        {"A7", "allocator recovers synthetic ground truth", check_a7},
        {"A8", "strategy separation", check_a8},
        {"A9", "efficiency-model properties", check_a9},
        {"A10", "format round trips", check_a10},
    };
}

std::vector<CriterionResult> run_acceptance(const std::vector<std::string>& only) {
    std::vector<CriterionResult> results;
    for (const auto& c : acceptance_criteria()) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) {
            continue;
        }
        try {
            results.push_back(c.run());
        } catch (const std::exception& e) {
            results.push_back({c.id, c.title, false, std::string("exception: ") + e.what(), 0.0});
        }
    }
    return results;
}

std::string format_summary(const std::vector<CriterionResult>& results) {
    std::ostringstream out;
    int passed = 0;
    for (const auto& r : results) {
        out << fmt("%-4s %s %7.2fs  %s: %s\n", r.id.c_str(), r.passed ? "PASS" : "FAIL", r.seconds, r.title.c_str(),
                   r.detail.c_str());
        passed += r.passed ? 1 : 0;
    }
    out << fmt("%d/%zu criteria passed\n", passed, results.size());
    return out.str();
}

}  // namespace mvprune::bench
