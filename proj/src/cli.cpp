#include "hgf/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "hgf/diagnostics.hpp"
#include "hgf/errors.hpp"
#include "hgf/io.hpp"

namespace hgf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + p.string() + " for writing");
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write to " + p.string() + " failed");
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

json optional_number(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

fs::path prepare(const RunConfig& c) {
    const fs::path dir = c.out_dir;
    fs::create_directories(dir);
    write_text(dir / "config.txt", to_text(c));
    return dir;
}

FlowState initial_state(const RunConfig& c, const ChartGrid& grid) {
    const PresetState ps = instantiate(c.preset, grid, 0.0);
    if (c.variant.kind == FlowKind::Surface2D)
        return {0.0, {conformal_factor(ps.g.g)}, {conformal_factor(ps.h.h)}, 0};
    return {0.0, ps.g, ps.h, 0};
}

std::optional<double> sup_of(const Snapshot& s) {
    if (!s.curvature) return std::nullopt;
    return ricci_sup_norm(s);
}

// ---- simulate ----

int do_simulate(const RunConfig& c, std::ostream& log) {
    const fs::path dir = prepare(c);
    const ChartGrid grid = make_chart(c, c.points);
    const Trajectory tr = simulate(initial_state(c, grid), c.variant, c.step);

    if (c.write_snapshots) fs::create_directories(dir / "snapshots");
    std::string index;
    io::NdjsonWriter diag(dir / "diagnostics.ndjson");
    std::vector<std::pair<double, double>> sup_series;
    for (const Snapshot& s : tr.snapshots) {
        char name[32];
        std::snprintf(name, sizeof name, "step_%06ld.bin", s.step);
        if (c.write_snapshots) {
            io::write_snapshot(dir / "snapshots" / name, s);
            index += std::to_string(s.step) + " " + io::format_double(s.t) + " snapshots/" + name + "\n";
        }
        const auto sup = sup_of(s);
        if (sup) sup_series.emplace_back(s.t, *sup);
        diag.write(json{{"step", s.step}, {"t", s.t}, {"ricci_sup", optional_number(sup)}}.dump());
    }
    if (c.write_snapshots) write_text(dir / "index.txt", index);
    io::write_series(dir / "ricci_sup.dat", sup_series);

    json summary{{"command", "simulate"},
                 {"reason", std::string(to_string(tr.reason))},
                 {"t_final", tr.final_state.t},
                 {"steps", tr.final_state.step_count},
                 {"snapshots", tr.snapshots.size()}};
    if (tr.reason != TerminationReason::Completed) {
        summary["message"] = tr.message;
        summary["point"] = tr.point;
        double dt_last = 0.0;
        if (tr.snapshots.size() >= 2) dt_last = tr.snapshots.back().t - tr.snapshots[tr.snapshots.size() - 2].t;
        summary["last_snapshot_gap"] = dt_last;
    }
    write_json(dir / "summary.json", summary);
    log << "simulate: " << to_string(tr.reason) << " at t = " << io::format_double(tr.final_state.t) << " after "
        << tr.final_state.step_count << " steps\n";
    return tr.reason == TerminationReason::Completed ? kExitOk : kExitFailure;
}

// ---- verify / oracle ----

int finish_report(const RunConfig& c, const fs::path& dir, VerificationReport rep, std::ostream& log) {
    rep.sort();
    io::write_report(dir, rep);
    int counts[3] = {0, 0, 0};
    for (const auto& e : rep.entries) {
        ++counts[static_cast<int>(e.status)];
        log << to_string(e.status) << "  " << e.id;
        if (!e.series.entries.empty()) log << "  finest " << io::format_double(e.series.entries.back().max_norm);
        if (e.order.available) log << "  order " << io::format_double(e.order.order);
        if (e.order.saturated) log << "  (saturated)";
        log << "\n";
    }
    write_json(dir / "summary.json", json{{"command", std::string(to_string(c.command))},
                                          {"entries", rep.entries.size()},
                                          {"pass", counts[static_cast<int>(Status::Pass)]},
                                          {"flag", counts[static_cast<int>(Status::Flag)]},
                                          {"fail", counts[static_cast<int>(Status::Fail)]}});
    return rep.any_fail() ? kExitFailure : kExitOk;
}

bool has(const RunConfig& c, CheckSet s) { return (c.checks & static_cast<unsigned>(s)) != 0; }

int do_verify(const RunConfig& c, std::ostream& log) {
    const fs::path dir = prepare(c);
    const ChartGrid base = make_chart(c, c.points);
    const std::vector<ChartGrid> ladder = make_ladder(base, c.ladder);
    VerificationReport rep;
    if (has(c, CheckSet::Static)) {
        StaticOptions o;
        o.mode = c.mode;
        o.tolerance = c.static_tolerance;
        o.inject_q_sign_error = c.inject_q_sign_error;
        rep.append(check_static_identities(c.preset, ladder, o));
    }
    if (has(c, CheckSet::Dynamic)) {
        DynamicOptions o;
        o.mode = c.mode;
        o.t_check = c.t_check;
        o.tolerance = c.dynamic_tolerance;
        o.inject_q_sign_error = c.inject_q_sign_error;
        rep.append(check_dynamic(run_ladder(c.preset, ladder, c.t_check, c.dt_over_dx, c.variant), o));
    }
    if (has(c, CheckSet::ClosedForm))
        rep.append(check_global_closed_form(c.preset, ladder, c.t_samples, c.oracle_tolerance));
    if (has(c, CheckSet::Reduction))
        rep.append(check_surface_reduction(c.preset, base, c.scheme_steps, c.dt_over_dx));
    if (has(c, CheckSet::Integrator))
        rep.append(check_integrator(c.preset, base, c.scheme_steps, c.dt_over_dx, c.integrator_t_end, c.integrator_m));
    return finish_report(c, dir, std::move(rep), log);
}

int do_oracle(const RunConfig& c, std::ostream& log) {
    const fs::path dir = prepare(c);
    const std::vector<ChartGrid> ladder = make_ladder(make_chart(c, c.points), c.ladder);
    return finish_report(c, dir, conformal_residual(c.preset, ladder, c.t_samples, c.oracle_tolerance), log);
}

// ---- diagnose ----

// First t > 0 where the family factor reaches zero, by scan and bisection.
std::optional<double> family_zero(const MetricPreset& p) {
    const double step = 1e-3;
    double a = 0.0;
    for (int k = 1; k <= 100000; ++k) {
        double b = k * step;
        if (family_factor(p, b) <= 0.0) {
            for (int it = 0; it < 80; ++it) {
                const double m = 0.5 * (a + b);
                (family_factor(p, m) > 0.0 ? a : b) = m;
            }
            return 0.5 * (a + b);
        }
        a = b;
    }
    return std::nullopt;
}

struct Sample {
    double t;
    double sup;
    Pinching pinch;
};

int do_diagnose(const RunConfig& c, std::ostream& log) {
    const fs::path dir = prepare(c);
    const ChartGrid grid = make_chart(c, c.points);
    const PlaneSampling planes{c.random_planes, c.preset.seed + 2};
    std::vector<Sample> samples;
    BlowUpOptions bo;
    bo.t_blowup = c.t_blowup;
    std::string reason = "family";

    if (c.sample_family) {
        if (c.preset.family == FamilyKind::None) throw Error(ErrorKind::ConfigError, "diagnose.source = family needs preset.family");
        const auto zero = family_zero(c.preset);
        if (!bo.t_blowup) bo.t_blowup = zero;
        // Without a singular time the family is sampled on [0, step.t_end].
        const double T = zero ? *zero : c.step.t_end;
        const int n = c.family_samples;
        for (int k = 0; k < n; ++k) {
            // Geometric approach to T: T - t runs from T down to 1e-3 T.
            const double t = zero ? T * (1.0 - std::pow(10.0, -3.0 * k / (n - 1))) : T * k / (n - 1);
            const PresetState ps = instantiate(c.preset, grid, t);
            const CurvatureBundle cb = curvature(ps.g);
            samples.push_back({t, ricci_sup_norm(cb, grid.interior()),
                               pinching_ratio(cb, ps.g, grid.interior(), planes)});
        }
    } else {
        if (c.variant.kind == FlowKind::Surface2D)
            throw Error(ErrorKind::ConfigError, "diagnose needs the tensor flow");
        StepControl step = c.step;
        step.record_curvature = true;
        const Trajectory tr = simulate(initial_state(c, grid), c.variant, step);
        reason = std::string(to_string(tr.reason));
        for (const Snapshot& s : tr.snapshots)
            samples.push_back({s.t, ricci_sup_norm(s),
                               pinching_ratio(*s.curvature, s.g, grid.interior(), planes)});
    }

    io::NdjsonWriter diag(dir / "diagnostics.ndjson");
    std::vector<std::pair<double, double>> sup, pinch;
    for (const Sample& s : samples) {
        sup.emplace_back(s.t, s.sup);
        if (s.pinch.ratio) pinch.emplace_back(s.t, *s.pinch.ratio);
        diag.write(json{{"t", s.t},
                        {"ricci_sup", s.sup},
                        {"k_min", s.pinch.k_min},
                        {"k_max", s.pinch.k_max},
                        {"pinching", optional_number(s.pinch.ratio)}}
                       .dump());
    }
    io::write_series(dir / "ricci_sup.dat", sup);
    io::write_series(dir / "pinching.dat", pinch);

    const BlowUpStatus b = blowup_monitor(sup, bo);
    const char* kind = b.kind == BlowUpKind::Growing ? "growing" : b.kind == BlowUpKind::Degenerate ? "degenerate" : "bounded";
    write_json(dir / "blowup.json", json{{"source", c.sample_family ? "family" : "simulate"},
                                         {"termination", reason},
                                         {"kind", kind},
                                         {"exponent", b.exponent},
                                         {"t_blowup", b.t_blowup},
                                         {"r2", b.r2},
                                         {"samples", samples.size()}});
    log << "diagnose: " << kind << ", exponent " << io::format_double(b.exponent) << ", T "
        << io::format_double(b.t_blowup) << ", r2 " << io::format_double(b.r2) << "\n";
    return kExitOk;
}

class NullBuf : public std::streambuf {
protected:
    int overflow(int c) override { return c; }
};

}  // namespace

int run(const RunConfig& c, std::ostream& log) {
    switch (c.command) {
        case Command::Simulate: return do_simulate(c, log);
        case Command::Verify: return do_verify(c, log);
        case Command::Oracle: return do_oracle(c, log);
        case Command::Diagnose: return do_diagnose(c, log);
    }
    return kExitFailure;
}

int execute(const Invocation& inv, std::ostream& log) {
    NullBuf null_buf;
    std::ostream null_stream(&null_buf);
    std::ostream& out = inv.quiet ? null_stream : log;
    std::optional<fs::path> dir = inv.out_dir ? std::optional<fs::path>(*inv.out_dir) : std::nullopt;

    auto report = [&](const std::string& kind, const std::string& message, std::ptrdiff_t point, int code) {
        log << "error (" << kind << "): " << message << "\n";
        if (dir) {
            std::error_code ec;
            fs::create_directories(*dir, ec);
            if (!ec) {
                std::ofstream f(*dir / "error.json");
                f << json{{"kind", kind}, {"message", message}, {"point", point}, {"exit_code", code}}.dump(2) << "\n";
            }
        }
        return code;
    };

    try {
        RunConfig c = load_config(inv.config);
        if (inv.out_dir) c.out_dir = *inv.out_dir;
        if (inv.seed) apply_seed(c, *inv.seed);
        if (inv.ladder) c.ladder = *inv.ladder;
        dir = c.out_dir;
        return run(c, out);
    } catch (const Error& e) {
        const int code = e.kind() == ErrorKind::ConfigError ? kExitConfig : kExitFailure;
        return report(std::string(to_string(e.kind())), e.what(), e.point(), code);
    } catch (const std::exception& e) {
        return report("Exception", e.what(), -1, kExitFailure);
    }
}

}  // namespace hgf::cli
