#include "hgf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "hgf/errors.hpp"

namespace hgf {

std::string_view to_string(Command c) noexcept {
    switch (c) {
        case Command::Simulate: return "simulate";
        case Command::Verify: return "verify";
        case Command::Oracle: return "oracle";
        case Command::Diagnose: return "diagnose";
    }
    return "?";
}

namespace {

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view want) {
    throw Error(ErrorKind::ConfigError,
                "bad value '" + std::string(value) + "' for " + std::string(key) + ": expected " + std::string(want));
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double to_double(std::string_view key, std::string_view v) {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    double x = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || std::isnan(x)) bad(key, v, "a number");
    return x;
}

template <class I>
I to_int(std::string_view key, std::string_view v) {
    I x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) bad(key, v, "an integer");
    return x;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true") return true;
    if (v == "false") return false;
    bad(key, v, "true or false");
}

std::vector<std::string_view> split(std::string_view v) {
    std::vector<std::string_view> out;
    while (true) {
        const auto c = v.find(',');
        out.push_back(trim(v.substr(0, c)));
        if (c == std::string_view::npos) break;
        v.remove_prefix(c + 1);
    }
    return out;
}

std::string num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ',';
        if constexpr (std::is_floating_point_v<T>)
            s += num(xs[i]);
        else
            s += std::to_string(xs[i]);
    }
    return s;
}

std::string_view flow_name(FlowKind k) {
    switch (k) {
        case FlowKind::Hgf: return "hgf";
        case FlowKind::Einstein: return "einstein";
        case FlowKind::Dissipative: return "dissipative";
        case FlowKind::Surface2D: return "surface2d";
    }
    return "?";
}

const std::pair<CheckSet, std::string_view> kCheckNames[] = {
    {CheckSet::Static, "static"},         {CheckSet::Dynamic, "dynamic"},       {CheckSet::ClosedForm, "closed_form"},
    {CheckSet::Reduction, "reduction"}, {CheckSet::Integrator, "integrator"},
};

struct Key {
    const char* name;
    std::function<void(RunConfig&, std::string_view, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define HGF_NUM(key, field)                                                              \
    Key {                                                                                \
        key, [](RunConfig& c, std::string_view k, std::string_view v) { c.field = to_double(k, v); }, \
            [](const RunConfig& c) { return num(c.field); }                              \
    }
#define HGF_INT(key, field, type)                                                        \
    Key {                                                                                \
        key, [](RunConfig& c, std::string_view k, std::string_view v) { c.field = to_int<type>(k, v); }, \
            [](const RunConfig& c) { return std::to_string(c.field); }                   \
    }
#define HGF_BOOL(key, field)                                                             \
    Key {                                                                                \
        key, [](RunConfig& c, std::string_view k, std::string_view v) { c.field = to_bool(k, v); }, \
            [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); }   \
    }

const std::vector<Key>& schema() {
    static const std::vector<Key> keys = {
        {"command",
         [](RunConfig& c, std::string_view k, std::string_view v) {
             for (Command x : {Command::Simulate, Command::Verify, Command::Oracle, Command::Diagnose})
                 if (v == to_string(x)) {
                     c.command = x;
                     return;
                 }
             bad(k, v, "simulate, verify, oracle or diagnose");
         },
         [](const RunConfig& c) { return std::string(to_string(c.command)); }},
        {"grid.chart",
         [](RunConfig& c, std::string_view k, std::string_view v) {
             if (v == "torus")
                 c.chart = ChartKind::Torus;
             else if (v == "sphere_band")
                 c.chart = ChartKind::SphereBand;
             else
                 bad(k, v, "torus or sphere_band");
         },
         [](const RunConfig& c) { return std::string(c.chart == ChartKind::Torus ? "torus" : "sphere_band"); }},
        HGF_INT("grid.dim", dim, int),
        HGF_INT("grid.points", points, int),
        HGF_INT("grid.margin", margin, int),
        {"preset.base",
         [](RunConfig& c, std::string_view, std::string_view v) { c.preset.base = parse_base_kind(v); },
         [](const RunConfig& c) { return std::string(to_string(c.preset.base)); }},
        HGF_NUM("preset.radius", preset.radius),
        HGF_NUM("preset.epsilon", preset.epsilon),
        {"preset.mode",
         [](RunConfig& c, std::string_view k, std::string_view v) {
             const auto parts = split(v);
             if (parts.empty() || parts.size() > 3) bad(k, v, "one to three integers");
             c.preset.mode = {0, 0, 0};
             for (std::size_t i = 0; i < parts.size(); ++i) c.preset.mode[i] = to_int<int>(k, parts[i]);
         },
         [](const RunConfig& c) {
             return std::to_string(c.preset.mode[0]) + "," + std::to_string(c.preset.mode[1]) + "," +
                    std::to_string(c.preset.mode[2]);
         }},
        HGF_INT("preset.seed", preset.seed, std::uint64_t),
        {"preset.family",
         [](RunConfig& c, std::string_view, std::string_view v) { c.preset.family = parse_family_kind(v); },
         [](const RunConfig& c) { return std::string(to_string(c.preset.family)); }},
        HGF_NUM("preset.lambda", preset.lambda),
        HGF_NUM("preset.v", preset.v),
        HGF_NUM("preset.kappa", preset.kappa),
        HGF_NUM("preset.c1", preset.c1),
        HGF_NUM("preset.c2", preset.c2),
        {"velocity.kind",
         [](RunConfig& c, std::string_view, std::string_view v) { c.preset.velocity.kind = parse_velocity_kind(v); },
         [](const RunConfig& c) { return std::string(to_string(c.preset.velocity.kind)); }},
        HGF_NUM("velocity.amplitude", preset.velocity.amplitude),
        HGF_INT("velocity.seed", preset.velocity.seed, std::uint64_t),
        {"flow.kind",
         [](RunConfig& c, std::string_view k, std::string_view v) {
             for (FlowKind x : {FlowKind::Hgf, FlowKind::Einstein, FlowKind::Dissipative, FlowKind::Surface2D})
                 if (v == flow_name(x)) {
                     c.variant.kind = x;
                     return;
                 }
             bad(k, v, "hgf, einstein, dissipative or surface2d");
         },
         [](const RunConfig& c) { return std::string(flow_name(c.variant.kind)); }},
        HGF_NUM("flow.d", variant.d),
        HGF_NUM("step.cfl", step.cfl),
        HGF_NUM("step.dt_max", step.dt_max),
        HGF_NUM("step.dt_min", step.dt_min),
        HGF_NUM("step.t_end", step.t_end),
        HGF_INT("step.snapshot_stride", step.snapshot_stride, int),
        HGF_NUM("step.fixed_dt", step.fixed_dt),
        HGF_BOOL("step.record_curvature", step.record_curvature),
        {"output.dir", [](RunConfig& c, std::string_view, std::string_view v) { c.out_dir = std::string(v); },
         [](const RunConfig& c) { return c.out_dir; }},
        HGF_BOOL("output.snapshots", write_snapshots),
        {"run.seed",
         [](RunConfig& c, std::string_view k, std::string_view v) {
             if (v == "none")
                 c.seed.reset();
             else
                 c.seed = to_int<std::uint64_t>(k, v);
         },
         [](const RunConfig& c) { return c.seed ? std::to_string(*c.seed) : std::string("none"); }},
        {"verify.ladder",
         [](RunConfig& c, std::string_view k, std::string_view v) {
             c.ladder.clear();
             for (auto p : split(v)) c.ladder.push_back(to_int<int>(k, p));
         },
         [](const RunConfig& c) { return join(c.ladder); }},
        {"verify.checks",
         [](RunConfig& c, std::string_view k, std::string_view v) {
             c.checks = 0;
             for (auto p : split(v)) {
                 bool found = false;
                 for (const auto& [bit, name] : kCheckNames)
                     if (p == name) {
                         c.checks |= static_cast<unsigned>(bit);
                         found = true;
                     }
                 if (!found) bad(k, p, "static, dynamic, closed_form, reduction or integrator");
             }
         },
         [](const RunConfig& c) {
             std::string s;
             for (const auto& [bit, name] : kCheckNames)
                 if (c.checks & static_cast<unsigned>(bit)) s += (s.empty() ? "" : ",") + std::string(name);
             return s;
         }},
        {"verify.mode",
         [](RunConfig& c, std::string_view k, std::string_view v) {
             if (v == "measured")
                 c.mode = CheckMode::Measured;
             else if (v == "oracle")
                 c.mode = CheckMode::Oracle;
             else
                 bad(k, v, "measured or oracle");
         },
         [](const RunConfig& c) { return std::string(c.mode == CheckMode::Oracle ? "oracle" : "measured"); }},
        HGF_NUM("verify.t_check", t_check),
        HGF_NUM("verify.dt_over_dx", dt_over_dx),
        HGF_NUM("verify.static_tolerance", static_tolerance),
        HGF_NUM("verify.dynamic_tolerance", dynamic_tolerance),
        HGF_BOOL("verify.inject_q_sign_error", inject_q_sign_error),
        HGF_INT("verify.scheme_steps", scheme_steps, int),
        HGF_INT("verify.integrator_m", integrator_m, int),
        HGF_NUM("verify.integrator_t_end", integrator_t_end),
        {"oracle.t_samples",
         [](RunConfig& c, std::string_view k, std::string_view v) {
             c.t_samples.clear();
             for (auto p : split(v)) c.t_samples.push_back(to_double(k, p));
         },
         [](const RunConfig& c) { return join(c.t_samples); }},
        HGF_NUM("oracle.tolerance", oracle_tolerance),
        {"diagnose.source",
         [](RunConfig& c, std::string_view k, std::string_view v) {
             if (v == "simulate")
                 c.sample_family = false;
             else if (v == "family")
                 c.sample_family = true;
             else
                 bad(k, v, "simulate or family");
         },
         [](const RunConfig& c) { return std::string(c.sample_family ? "family" : "simulate"); }},
        HGF_INT("diagnose.family_samples", family_samples, int),
        HGF_INT("diagnose.random_planes", random_planes, int),
        {"diagnose.t_blowup",
         [](RunConfig& c, std::string_view k, std::string_view v) {
             if (v == "none")
                 c.t_blowup.reset();
             else
                 c.t_blowup = to_double(k, v);
         },
         [](const RunConfig& c) { return c.t_blowup ? num(*c.t_blowup) : std::string("none"); }},
    };
    return keys;
}

#undef HGF_NUM
#undef HGF_INT
#undef HGF_BOOL

void validate(const RunConfig& c) {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::ConfigError, m); };
    if (c.dim != 2 && c.dim != 3) fail("grid.dim must be 2 or 3");
    if (c.points < 2 * kStencilRadius + 1) fail("grid.points too small");
    if (c.ladder.empty()) fail("verify.ladder is empty");
    for (int p : c.ladder)
        if (p < 2 * kStencilRadius + 1) fail("verify.ladder entries too small");
    if (c.t_samples.empty()) fail("oracle.t_samples is empty");
    if (c.variant.kind == FlowKind::Surface2D && c.dim != 2) fail("surface2d needs grid.dim = 2");
    if (c.family_samples < 3) fail("diagnose.family_samples must be at least 3");
    if (c.random_planes < 0) fail("diagnose.random_planes must be non-negative");
    if (c.scheme_steps < 1) fail("verify.scheme_steps must be positive");
    if (c.integrator_m < 1 || !(c.integrator_t_end > 0.0)) fail("verify.integrator_m and integrator_t_end must be positive");
    if (c.out_dir.empty()) fail("output.dir is empty");
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    RunConfig c;
    std::map<std::string, bool> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorKind::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const Key* k = nullptr;
        for (const Key& s : schema())
            if (key == s.name) k = &s;
        if (!k) throw Error(ErrorKind::ConfigError, "unknown key '" + key + "'");
        if (seen[key]) throw Error(ErrorKind::ConfigError, "key '" + key + "' given twice");
        seen[key] = true;
        k->set(c, key, value);
    }
    validate(c);
    if (c.seed) apply_seed(c, *c.seed);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_text(const RunConfig& c) {
    std::string s;
    for (const Key& k : schema()) s += std::string(k.name) + " = " + k.get(c) + "\n";
    return s;
}

void apply_seed(RunConfig& c, std::uint64_t seed) {
    c.seed = seed;
    c.preset.seed = seed;
    c.preset.velocity.seed = seed + 1;
}

ChartGrid make_chart(const RunConfig& c, int points) {
    return c.chart == ChartKind::Torus ? torus_grid(c.dim, points) : sphere_band_grid(c.dim, points, c.margin);
}

}  // namespace hgf
