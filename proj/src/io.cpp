// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvprune/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <vector>

namespace mvprune::io {

using nlohmann::json;

namespace {

constexpr std::array<char, 4> kMagic = {'M', 'V', 'T', 'K'};

template <typename T>
void put_le(std::string& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
    }
}

class ByteReader {
public:
    explicit ByteReader(const std::vector<unsigned char>& bytes) : m_bytes(bytes) {}

    template <typename T>
    T get(const char* what) {
        require(sizeof(T), what);
        T value = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            value |= static_cast<T>(static_cast<T>(m_bytes[m_pos + i]) << (8 * i));
        }
        m_pos += sizeof(T);
        return value;
    }

    std::string get_string(std::size_t len, const char* what) {
        require(len, what);
        std::string s(reinterpret_cast<const char*>(m_bytes.data() + m_pos), len);
        m_pos += len;
        return s;
    }

    void require(std::uint64_t len, const char* what) const {
        if (len > m_bytes.size() - m_pos) {
            fail(std::string("truncated ") + what);
        }
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::Malformed, what + " at byte offset " + std::to_string(m_pos));
    }

    std::size_t position() const { return m_pos; }
    std::size_t remaining() const { return m_bytes.size() - m_pos; }
    const unsigned char* cursor() const { return m_bytes.data() + m_pos; }
    void skip(std::size_t n) { m_pos += n; }

private:
    const std::vector<unsigned char>& m_bytes;
    std::size_t m_pos = 0;
};

std::string format_real(double x) {
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", x);
    std::string s(buf.data());
    if (s.find_first_of(".eE") == std::string::npos) {
        s += ".0";
    }
    return s;
}

bool is_scalar_array(const json& j) {
    return std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
}

void dump(const json& j, int indent, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ",\n";
                first = false;
                out += inner + json(key).dump() + ": ";
                dump(value, indent + 1, out);
            }
            out += "\n" + pad + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            if (is_scalar_array(j)) {
                out += "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i > 0) out += ", ";
                    dump(j[i], indent + 1, out);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i > 0) out += ",\n";
                out += inner;
                dump(j[i], indent + 1, out);
            }
            out += "\n" + pad + "]";
            return;
        }
        case json::value_t::number_float: {
            const double x = j.get<double>();
            out += std::isfinite(x) ? format_real(x) : "null";
            return;
        }
        default:
            out += j.dump();
            return;
    }
}

json real(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double real_or(const json& j, double fallback) { return j.is_null() ? fallback : j.get<double>(); }

json to_array(const RatioVector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(v[i]);
    }
    return a;
}

RatioVector ratios_from(const json& a) {
    RatioVector v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    }
    return v;
}

void expect_kind(const json& j, std::string_view kind) {
    if (!j.is_object() || j.value("kind", std::string()) != kind) {
        throw Error(ErrorCode::Malformed, "expected a '" + std::string(kind) + "' document");
    }
    if (j.value("schema_version", 0) != kSchemaVersion) {
        throw Error(ErrorCode::Malformed, "unsupported schema_version");
    }
}

// Runs a schema accessor, mapping nlohmann's type/key errors onto MALFORMED.
template <typename F>
auto guarded(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Malformed, std::string("schema error: ") + e.what());
    }
}

json trial_json(const Trial& t, bool include_timing) {
    json j = {{"index", t.index},         {"ratios", to_array(t.ratios)}, {"reward", real(t.reward)},
              {"penalty", real(t.penalty)}, {"score", real(t.score)},       {"failed", t.failed}};
    if (include_timing) {
        j["wall_time_s"] = std::chrono::duration<double>(t.wall_time).count();
    }
    return j;
}

Trial trial_from(const json& j) {
    Trial t;
    t.index = j.at("index").get<Index>();
    t.ratios = ratios_from(j.at("ratios"));
    t.failed = j.at("failed").get<bool>();
    t.reward = real_or(j.at("reward"), std::numeric_limits<double>::quiet_NaN());
    t.penalty = j.at("penalty").get<double>();
    t.score = real_or(j.at("score"), -std::numeric_limits<double>::infinity());
    if (j.contains("wall_time_s")) {
        t.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::duration<double>(j["wall_time_s"].get<double>()));
    }
    return t;
}

}  // namespace

std::uint64_t write_mvtk(const ViewTokenSet& vs, std::ostream& out) {
    validate_viewset(vs);
    std::string header(kMagic.begin(), kMagic.end());
    put_le<std::uint32_t>(header, kMvtkVersion);
    put_le<std::uint32_t>(header, static_cast<std::uint32_t>(vs.size()));
    for (const auto& view : vs.views) {
        const auto& name = view.label.name();
        if (name.size() > std::numeric_limits<std::uint16_t>::max()) {
            throw Error(ErrorCode::InvalidArgument, "label longer than 65535 bytes");
        }
        if (static_cast<std::uint64_t>(view.tokens.rows()) > std::numeric_limits<std::uint32_t>::max() ||
            static_cast<std::uint64_t>(view.tokens.cols()) > std::numeric_limits<std::uint32_t>::max()) {
            throw Error(ErrorCode::InvalidArgument, "view too large for MVTK v1");
        }
        put_le<std::uint16_t>(header, static_cast<std::uint16_t>(name.size()));
        header += name;
        put_le<std::uint32_t>(header, static_cast<std::uint32_t>(view.tokens.rows()));
        put_le<std::uint32_t>(header, static_cast<std::uint32_t>(view.tokens.cols()));
    }
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    std::uint64_t written = header.size();

    std::string payload;
    for (const auto& view : vs.views) {
        payload.clear();
        payload.reserve(static_cast<std::size_t>(view.tokens.size()) * 4);
        for (Eigen::Index r = 0; r < view.tokens.rows(); ++r) {
            for (Eigen::Index c = 0; c < view.tokens.cols(); ++c) {
                put_le<std::uint32_t>(payload, std::bit_cast<std::uint32_t>(view.tokens(r, c)));
            }
        }
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        written += payload.size();
    }
    if (!out) {
        throw Error(ErrorCode::IoError, "failed to write MVTK stream");
    }
    return written;
}

ViewTokenSet read_mvtk(std::istream& in) {
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw Error(ErrorCode::IoError, "failed to read MVTK stream");
    }
    ByteReader r(bytes);
    if (r.get_string(4, "magic") != std::string(kMagic.begin(), kMagic.end())) {
        throw Error(ErrorCode::Malformed, "bad magic at byte offset 0");
    }
    const auto version = r.get<std::uint32_t>("version");
    if (version != kMvtkVersion) {
        throw Error(ErrorCode::Malformed, "unsupported version " + std::to_string(version));
    }
    const auto view_count = r.get<std::uint32_t>("view count");
    if (view_count == 0) {
        r.fail("view count 0");
    }

    struct Header {
        std::string label;
        std::uint32_t n_tokens;
        std::uint32_t dim;
    };
    std::vector<Header> headers;
    for (std::uint32_t v = 0; v < view_count; ++v) {
        const auto len = r.get<std::uint16_t>("label length");
        if (len == 0) {
            r.fail("empty label");
        }
        Header h;
        h.label = r.get_string(len, "label");
        h.n_tokens = r.get<std::uint32_t>("n_tokens");
        h.dim = r.get<std::uint32_t>("dim");
        if (h.dim == 0) {
            r.fail("dim 0 for view '" + h.label + "'");
        }
        headers.push_back(std::move(h));
    }

    std::uint64_t payload = 0;
    for (const auto& h : headers) {
        payload += static_cast<std::uint64_t>(h.n_tokens) * h.dim * 4;
    }
    if (payload != r.remaining()) {
        r.fail("declared payload of " + std::to_string(payload) + " bytes but " + std::to_string(r.remaining()) +
               " remain");
    }

    ViewTokenSet vs;
    for (const auto& h : headers) {
        TokenMatrix tokens(static_cast<Eigen::Index>(h.n_tokens), static_cast<Eigen::Index>(h.dim));
        for (Eigen::Index i = 0; i < tokens.rows(); ++i) {
            for (Eigen::Index c = 0; c < tokens.cols(); ++c) {
                tokens(i, c) = std::bit_cast<float>(r.get<std::uint32_t>("payload"));
            }
        }
        vs.views.push_back(View{ViewLabel::from_name(h.label), std::move(tokens)});
    }
    validate_viewset(vs);
    return vs;
}

void write_mvtk_file(const ViewTokenSet& vs, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    }
    write_mvtk(vs, out);
}

ViewTokenSet read_mvtk_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    return read_mvtk(in);
}

std::string canonical_dump(const json& value) {
    std::string out;
    dump(value, 0, out);
    out += "\n";
    return out;
}

json to_json(const Selection& sel) {
    json views = json::array();
    for (const auto& v : sel.views) {
        views.push_back({{"label", v.label.name()},
                         {"n_tokens", v.n_tokens},
                         {"k", v.kept.size()},
                         {"kept", v.kept},
                         {"order", v.order}});
    }
    return {{"kind", "selection"},
            {"schema_version", kSchemaVersion},
            {"metric", std::string(to_string(sel.metric))},
            {"strategy", std::string(to_string(sel.strategy))},
            {"seed", sel.seed},
            {"ratios", to_array(sel.ratios)},
            {"total_kept", sel.total_kept()},
            {"views", views}};
}

Selection selection_from_json(const json& j) {
    expect_kind(j, "selection");
    return guarded([&] {
        Selection sel;
        sel.metric = parse_distance_measure(j.at("metric").get<std::string>());
        sel.strategy = parse_strategy(j.at("strategy").get<std::string>());
        sel.seed = j.at("seed").get<std::uint64_t>();
        sel.ratios = ratios_from(j.at("ratios"));
        for (const auto& v : j.at("views")) {
            ViewSelection vsel{ViewLabel::from_name(v.at("label").get<std::string>()), v.at("n_tokens").get<Index>(),
                               v.at("kept").get<std::vector<Index>>(), v.at("order").get<std::vector<Index>>()};
            sel.views.push_back(std::move(vsel));
        }
        return sel;
    });
}

json to_json(const OptimizerRun& run, bool include_timing) {
    json trials = json::array();
    for (const auto& t : run.trials) {
        trials.push_back(trial_json(t, include_timing));
    }
    return {{"kind", "optimizer_run"},
            {"schema_version", kSchemaVersion},
            {"method", std::string(to_string(run.method))},
            {"seed", run.seed},
            {"budget", run.budget},
            {"reward_scale", run.reward_scale},
            {"penalty_scale", run.penalty_scale},
            {"best_index", run.best_index},
            {"best", run.trials.empty() ? json(nullptr) : trial_json(run.best(), include_timing)},
            {"n_trials", run.trials.size()},
            {"trials", trials}};
}

OptimizerRun run_from_json(const json& j) {
    expect_kind(j, "optimizer_run");
    return guarded([&] {
        OptimizerRun run;
        run.method = parse_optimizer_method(j.at("method").get<std::string>());
        run.seed = j.at("seed").get<std::uint64_t>();
        run.budget = j.at("budget").get<Index>();
        run.reward_scale = j.at("reward_scale").get<double>();
        run.penalty_scale = j.at("penalty_scale").get<double>();
        run.best_index = j.at("best_index").get<Index>();
        for (const auto& t : j.at("trials")) {
            run.trials.push_back(trial_from(t));
        }
        if (!run.trials.empty() && run.best_index >= run.trials.size()) {
            throw Error(ErrorCode::Malformed, "best_index out of range");
        }
        return run;
    });
}

json to_json(const ModelProfile& p, const SequenceProfile& s, const EfficiencyReport& r) {
    return {{"kind", "efficiency_report"},
            {"schema_version", kSchemaVersion},
            {"profile",
             {{"n_layers", p.n_layers},
              {"d_model", p.d_model},
              {"n_heads", p.n_heads},
              {"n_kv_heads", p.n_kv_heads},
              {"d_ff", p.d_ff},
              {"bytes_per_element", p.bytes_per_element},
              {"include_vocab_head", p.include_vocab_head},
              {"vocab_size", p.vocab_size},
              {"include_attention_quadratic", p.include_attention_quadratic}}},
            {"sequence",
             {{"n_visual_before", s.n_visual_before}, {"n_visual_after", s.n_visual_after}, {"n_text", s.n_text}}},
            {"flops_before", r.flops_before},
            {"flops_after", r.flops_after},
            {"flops_fraction", r.flops_fraction},
            {"kv_bytes_before", r.kv_before},
            {"kv_bytes_after", r.kv_after},
            {"kv_fraction_full", r.kv_fraction},
            {"kv_fraction_visual", r.kv_fraction_visual},
            {"token_fraction", r.token_fraction}};
}

json scene_to_json(const SceneConfig& cfg, std::uint64_t seed, const SceneTruth* truth) {
    json labels = json::array();
    for (const auto& l : cfg.labels) {
        labels.push_back(l.name());
    }
    json j = {{"kind", "scene"},
              {"schema_version", kSchemaVersion},
              {"seed", seed},
              {"config",
               {{"labels", labels},
                {"tokens_per_view", cfg.tokens_per_view},
                {"dim", cfg.dim},
                {"clusters_per_view", cfg.clusters_per_view},
                {"cluster_std", cfg.cluster_std},
                {"background_std", cfg.background_std},
                {"background_offset", cfg.background_offset},
                {"view_weights", cfg.view_weights},
                {"cover_radius", cfg.cover_radius}}}};
    if (truth != nullptr) {
        json views = json::array();
        for (std::size_t v = 0; v < truth->centers.size(); ++v) {
            json centers = json::array();
            const auto& c = truth->centers[v];
            for (Eigen::Index r = 0; r < c.rows(); ++r) {
                centers.push_back(to_array(c.row(r).transpose()));
            }
            views.push_back({{"label", cfg.labels.at(v).name()}, {"centers", centers}, {"members", truth->members[v]}});
        }
        j["truth"] = {{"views", views}, {"view_weights", truth->view_weights}, {"cover_radius", truth->cover_radius}};
    }
    return j;
}

SceneFile scene_from_json(const json& j) {
    expect_kind(j, "scene");
    return guarded([&] {
        SceneFile f;
        f.seed = j.at("seed").get<std::uint64_t>();
        const auto& c = j.at("config");
        f.config.labels.clear();
        for (const auto& l : c.at("labels")) {
            f.config.labels.push_back(ViewLabel::from_name(l.get<std::string>()));
        }
        f.config.tokens_per_view = c.at("tokens_per_view").get<Index>();
        f.config.dim = c.at("dim").get<Index>();
        f.config.clusters_per_view = c.at("clusters_per_view").get<std::vector<Index>>();
        f.config.cluster_std = c.at("cluster_std").get<double>();
        f.config.background_std = c.at("background_std").get<double>();
        f.config.background_offset = c.value("background_offset", SceneConfig{}.background_offset);
        f.config.view_weights = c.at("view_weights").get<std::vector<double>>();
        f.config.cover_radius = c.at("cover_radius").get<double>();
        f.config.validate();
        if (j.contains("truth")) {
            SceneTruth t;
            const auto& tj = j["truth"];
            for (const auto& v : tj.at("views")) {
                const auto& rows = v.at("centers");
                Eigen::MatrixXd centers(static_cast<Eigen::Index>(rows.size()),
                                        static_cast<Eigen::Index>(f.config.dim));
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    if (rows[r].size() != f.config.dim) {
                        throw Error(ErrorCode::Malformed, "scene center has the wrong dim");
                    }
                    centers.row(static_cast<Eigen::Index>(r)) = ratios_from(rows[r]).transpose();
                }
                t.centers.push_back(std::move(centers));
                t.members.push_back(v.at("members").get<std::vector<std::vector<Index>>>());
            }
            t.view_weights = tj.at("view_weights").get<std::vector<double>>();
            t.cover_radius = tj.at("cover_radius").get<double>();
            f.truth = std::move(t);
        }
        return f;
    });
}

std::string write_selection_json(const Selection& sel) { return canonical_dump(to_json(sel)); }

std::string write_run_json(const OptimizerRun& run, bool include_timing) {
    return canonical_dump(to_json(run, include_timing));
}

std::string write_report_json(const ModelProfile& p, const SequenceProfile& s, const EfficiencyReport& r) {
    return canonical_dump(to_json(p, s, r));
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Malformed, std::string("invalid JSON: ") + e.what());
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw Error(ErrorCode::IoError, "failed to write " + path.string());
    }
}

}  // namespace mvprune::io
