#include "hgf/flow.hpp"

#include <algorithm>
#include <cmath>

#include "hgf/errors.hpp"
#include "hgf/index.hpp"
#include "hgf/kernels/parallel.hpp"
#include "hgf/kernels/stencil.hpp"

namespace hgf {

namespace {

// out = a + c * b, pointwise on the intersection of valid regions.
Field add_scaled(const Field& a, double c, const Field& b) { return axpby(1.0, a, c, b); }

Field rk4_combine(const Field& y, double dt, const Field& k1, const Field& k2, const Field& k3, const Field& k4) {
    Field out = y.zeros_like();
    Region r = y.valid().intersect(k1.valid()).intersect(k2.valid()).intersect(k3.valid()).intersect(k4.valid());
    out.set_valid(r);
    const int nc = y.components();
    const double w = dt / 6.0;
    for_each_point(y.grid(), r, [&](std::size_t p) {
        auto o = out.at(p);
        for (int c = 0; c < nc; ++c) o[c] = y(p, c) + w * (k1(p, c) + 2.0 * k2(p, c) + 2.0 * k3(p, c) + k4(p, c));
    });
    return out;
}

Field minus_two_ricci(const FlowState& s, CurvatureBundle* keep = nullptr) {
    CurvatureBundle c = curvature(s.g);
    Field out = scaled(-2.0, c.ricci);
    if (keep) *keep = std::move(c);
    return out;
}

bool spd_ok(const FlowState& s, FlowKind kind) {
    const Field& g = s.g.g;
    const int n = g.dim();
    const double floor = s.g.spd_floor;
    return first_failure(g.grid(), g.valid(), [&](std::size_t p) {
               const auto a = g.at(p);
               for (double v : a)
                   if (!std::isfinite(v)) return false;
               for (double v : s.h.h.at(p))
                   if (!std::isfinite(v)) return false;
               if (kind == FlowKind::Surface2D) return a[0] > floor;
               return min_eigenvalue(a, n) > floor;
           }) < 0;
}

FlowState stage(const FlowState& s, double c, const Field& kg, const Field& kh, bool symmetric) {
    FlowState out;
    out.t = s.t;
    out.g = MetricField{add_scaled(s.g.g, c, kg), s.g.spd_floor};
    out.h = VelocityField{add_scaled(s.h.h, c, kh)};
    if (symmetric) {
        symmetrize_rank2(out.g.g);
        symmetrize_rank2(out.h.h);
    }
    return out;
}

}  // namespace

Field hgf_rhs(const FlowState& s) { return minus_two_ricci(s); }

Field einstein_hgf_rhs(const FlowState& s) {
    CurvatureBundle c;
    Field out = minus_two_ricci(s, &c);
    const int n = s.g.g.dim();
    const Idx ix{n};
    for_each_point(out.grid(), out.valid(), [&](std::size_t p) {
        const auto gi = c.ginv.at(p);
        const auto h = s.h.h.at(p);
        auto o = out.at(p);
        double tr = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) tr += gi[ix(a, b)] * h[ix(a, b)];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double q = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) q += gi[ix(a, b)] * h[ix(i, a)] * h[ix(j, b)];
                o[ix(i, j)] += -0.5 * tr * h[ix(i, j)] + q;
            }
    });
    return out;
}

Field dissipative_hgf_rhs(const FlowState& s, double d) {
    const int n = s.g.g.dim();
    if (n < 2) throw Error(ErrorKind::InvalidState, "dissipative flow needs dim >= 2");
    CurvatureBundle c;
    Field out = minus_two_ricci(s, &c);
    const Idx ix{n};
    const double inv_nm1 = 1.0 / (n - 1);
    for_each_point(out.grid(), out.valid(), [&](std::size_t p) {
        const auto gi = c.ginv.at(p);
        const auto h = s.h.h.at(p);
        const auto g = s.g.g.at(p);
        auto o = out.at(p);
        double tr = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) tr += gi[ix(a, b)] * h[ix(a, b)];
        // (∂t g^pq) h_pq = -g^pa g^qb h_ab h_pq
        double dginv_h = 0.0;
        for (int pp = 0; pp < n; ++pp)
            for (int q = 0; q < n; ++q) {
                double dg = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) dg -= gi[ix(pp, a)] * gi[ix(q, b)] * h[ix(a, b)];
                dginv_h += dg * h[ix(pp, q)];
            }
        const double conf = inv_nm1 * (tr * tr + dginv_h);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double q = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) q += gi[ix(a, b)] * h[ix(i, a)] * h[ix(j, b)];
                o[ix(i, j)] += 2.0 * q - (d + 2.0 * tr) * h[ix(i, j)] + conf * g[ix(i, j)];
            }
    });
    return out;
}

Field surface_rhs(const Field& u) {
    if (u.rank() != 0) throw Error(ErrorKind::InvalidState, "surface_rhs expects a scalar field");
    Field logu = u.zeros_like();
    const std::ptrdiff_t bad = first_failure(u.grid(), u.valid(), [&](std::size_t p) {
        const double v = u(p, 0);
        if (!(v > 0.0)) return false;
        logu(p, 0) = std::log(v);
        return true;
    });
    if (bad >= 0) throw Error(ErrorKind::NonPositiveConformalFactor, "conformal factor is not positive", bad);
    Field out = partial_derivative(logu, 0, 2);
    for (int a = 1; a < u.dim(); ++a) out = axpby(1.0, out, 1.0, partial_derivative(logu, a, 2));
    return out;
}

Field variant_rhs(const FlowState& s, const FlowVariant& v) {
    switch (v.kind) {
        case FlowKind::Hgf: return hgf_rhs(s);
        case FlowKind::Einstein: return einstein_hgf_rhs(s);
        case FlowKind::Dissipative: return dissipative_hgf_rhs(s, v.d);
        case FlowKind::Surface2D: return surface_rhs(s.g.g);
    }
    throw Error(ErrorKind::InvalidState, "unknown flow variant");
}

double cfl_dt(const FlowState& s, const StepControl& c, const FlowVariant& v) {
    const Field& g = s.g.g;
    double lmin = std::numeric_limits<double>::infinity();
    const int n = g.dim();
    const bool scalar = v.kind == FlowKind::Surface2D || g.rank() == 0;
    const std::ptrdiff_t bad = first_failure(g.grid(), g.valid(), [&](std::size_t p) {
        const double l = scalar ? g(p, 0) : min_eigenvalue(g.at(p), n);
        return std::isfinite(l) && l > s.g.spd_floor;
    });
    if (bad >= 0) throw Error(ErrorKind::MetricDegenerate, "metric eigenvalue at or below the SPD floor", bad);
    for_each_point(g.grid(), g.valid(), [&](std::size_t p) {
        lmin = std::min(lmin, scalar ? g(p, 0) : min_eigenvalue(g.at(p), n));
    }, /*parallel=*/false);
    if (c.fixed_dt > 0.0) return c.fixed_dt;
    return std::min(c.dt_max, c.cfl * g.grid().min_spacing() * std::sqrt(lmin));
}

FlowState step(const FlowState& s, const FlowVariant& v, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt) || s.t + dt == s.t)
        throw Error(ErrorKind::StepUnderflow, "time step does not advance t");
    const bool sym = v.kind != FlowKind::Surface2D;
    auto rhs = [&](const FlowState& st) {
        try {
            return variant_rhs(st, v);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::MetricDegenerate || e.kind() == ErrorKind::NonPositiveConformalFactor)
                throw Error(ErrorKind::BlowUpDetected, std::string("stage metric lost positivity: ") + e.what(),
                            e.point());
            throw;
        }
    };

    const Field k1g = s.h.h;
    const Field k1h = rhs(s);
    const FlowState s2 = stage(s, 0.5 * dt, k1g, k1h, sym);
    const Field k2h = rhs(s2);
    const FlowState s3 = stage(s, 0.5 * dt, s2.h.h, k2h, sym);
    const Field k3h = rhs(s3);
    const FlowState s4 = stage(s, dt, s3.h.h, k3h, sym);
    const Field k4h = rhs(s4);

    FlowState out;
    out.t = s.t + dt;
    out.step_count = s.step_count + 1;
    out.g = MetricField{rk4_combine(s.g.g, dt, k1g, s2.h.h, s3.h.h, s4.h.h), s.g.spd_floor};
    out.h = VelocityField{rk4_combine(s.h.h, dt, k1h, k2h, k3h, k4h)};
    if (sym) {
        symmetrize_rank2(out.g.g);
        symmetrize_rank2(out.h.h);
    }
    if (!spd_ok(out, v.kind)) {
        const Field& g = out.g.g;
        const int n = g.dim();
        const std::ptrdiff_t p = first_failure(g.grid(), g.valid(), [&](std::size_t q) {
            const auto a = g.at(q);
            if (!sym) return std::isfinite(a[0]) && a[0] > out.g.spd_floor;
            for (double x : a)
                if (!std::isfinite(x)) return false;
            return min_eigenvalue(a, n) > out.g.spd_floor;
        });
        throw Error(ErrorKind::BlowUpDetected, "metric lost positivity or finiteness", p);
    }
    return out;
}

std::string_view to_string(TerminationReason r) noexcept {
    switch (r) {
        case TerminationReason::Completed: return "Completed";
        case TerminationReason::BlowUpDetected: return "BlowUpDetected";
        case TerminationReason::StepUnderflow: return "StepUnderflow";
    }
    return "?";
}

Trajectory simulate(const FlowState& initial, const FlowVariant& v, const StepControl& c) {
    if (!initial.g.g.grid().periodic())
        throw Error(ErrorKind::InvalidState, "time integration needs a periodic chart");
    if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw Error(ErrorKind::ConfigError, "cfl factor must lie in (0, 1]");
    if (!(c.t_end > initial.t)) throw Error(ErrorKind::ConfigError, "t_end must exceed the initial time");
    if (c.snapshot_stride < 1) throw Error(ErrorKind::ConfigError, "snapshot stride must be positive");

    Trajectory traj;
    const bool with_curv = c.record_curvature && v.kind != FlowKind::Surface2D;
    auto record = [&](const FlowState& s) {
        Snapshot snap{s.t, s.step_count, s.g, s.h, std::nullopt};
        if (with_curv) snap.curvature = curvature(s.g);
        traj.snapshots.push_back(std::move(snap));
    };

    FlowState s = initial;
    record(s);
    // Avoid a sliver step at the end: stop once within a relative 1e-12 of t_end.
    const double t_eps = 1e-12 * std::max(1.0, std::abs(c.t_end));
    while (c.t_end - s.t > t_eps) {
        double dt;
        try {
            dt = cfl_dt(s, c, v);
        } catch (const Error& e) {
            traj.reason = TerminationReason::BlowUpDetected;
            traj.message = e.what();
            traj.point = e.point();
            break;
        }
        if (dt < c.dt_min) {
            traj.reason = TerminationReason::StepUnderflow;
            traj.message = "time step fell below dt_min";
            break;
        }
        dt = std::min(dt, c.t_end - s.t);
        try {
            s = step(s, v, dt);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::BlowUpDetected && e.kind() != ErrorKind::StepUnderflow) throw;
            traj.reason = e.kind() == ErrorKind::BlowUpDetected ? TerminationReason::BlowUpDetected
                                                                : TerminationReason::StepUnderflow;
            traj.message = e.what();
            traj.point = e.point();
            break;
        }
        if (s.step_count % c.snapshot_stride == 0) record(s);
    }
    if (traj.snapshots.back().step != s.step_count) record(s);
    traj.final_state = std::move(s);
    return traj;
}

MetricField conformal_metric(const Field& u) {
    const int n = u.dim();
    Field g(u.grid(), 2);
    g.set_valid(u.valid());
    for_each_point(u.grid(), u.valid(), [&](std::size_t p) {
        for (int i = 0; i < n; ++i) g(p, i * n + i) = u(p, 0);
    });
    return {std::move(g)};
}

Field conformal_factor(const Field& g) {
    Field u(g.grid(), 0);
    u.set_valid(g.valid());
    for_each_point(g.grid(), g.valid(), [&](std::size_t p) { u(p, 0) = g(p, 0); });
    return u;
}

}  // namespace hgf
