#include "hgf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hgf/errors.hpp"
#include "hgf/index.hpp"
#include "hgf/kernels/parallel.hpp"
#include "hgf/presets.hpp"

namespace hgf {

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    if (sxx <= 0.0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

LineFit fit_at(const std::vector<std::pair<double, double>>& w, double T) {
    std::vector<double> x, y;
    x.reserve(w.size());
    y.reserve(w.size());
    for (const auto& [t, s] : w) {
        x.push_back(std::log(T - t));
        y.push_back(std::log(s));
    }
    return least_squares(x, y);
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

double ricci_sup_norm(const CurvatureBundle& c, const Region& region) {
    const Field& ric = c.ricci;
    const int n = ric.dim();
    const Idx ix{n};
    const Region r = region.intersect(ric.valid()).intersect(c.ginv.valid());
    double sup = 0.0;
    for_each_point(ric.grid(), r, [&](std::size_t p) {
        const auto gi = c.ginv.at(p);
        const auto R = ric.at(p);
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) s += R[ix(i, j)] * R[ix(k, l)] * gi[ix(i, k)] * gi[ix(j, l)];
        sup = std::max(sup, std::sqrt(std::max(s, 0.0)));
    }, /*parallel=*/false);
    return sup;
}

double ricci_sup_norm(const Snapshot& s) {
    if (!s.curvature) throw Error(ErrorKind::InvalidState, "snapshot carries no curvature");
    return ricci_sup_norm(*s.curvature, s.g.g.grid().interior());
}

BlowUpStatus blowup_monitor(const std::vector<std::pair<double, double>>& series, const BlowUpOptions& o) {
    BlowUpStatus st;
    st.series = series;
    for (std::size_t i = 1; i < series.size(); ++i)
        if (!(series[i].first > series[i - 1].first))
            throw Error(ErrorKind::InvalidState, "blow-up series must be strictly increasing in t");
    if (series.size() < 3) return st;

    const std::size_t n = series.size();
    std::size_t w = static_cast<std::size_t>(std::ceil(o.window_fraction * static_cast<double>(n)));
    w = std::min(n, std::max(w, o.min_window));
    std::vector<std::pair<double, double>> win(series.end() - static_cast<std::ptrdiff_t>(w), series.end());
    for (const auto& [t, s] : win)
        if (!(s > 0.0) || !std::isfinite(s)) return st;

    const double t_last = win.back().first;
    const double span = t_last - win.front().first;
    LineFit best;
    double best_T = 0.0;
    if (o.t_blowup) {
        if (!(*o.t_blowup > t_last)) return st;
        best_T = *o.t_blowup;
        best = fit_at(win, best_T);
    } else {
        // Profile search over the offset T - t_last on a log grid, then a
        // finer pass around the best candidate.
        auto search = [&](double lo, double hi, int steps) {
            for (int k = 0; k <= steps; ++k) {
                const double d = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / steps);
                const LineFit f = fit_at(win, t_last + d);
                if (f.r2 > best.r2) {
                    best = f;
                    best_T = t_last + d;
                }
            }
        };
        search(1e-8 * span, 10.0 * span, 400);
        const double d0 = best_T - t_last;
        search(d0 / 1.05, d0 * 1.05, 100);
    }
    st.exponent = best.slope;
    st.r2 = best.r2;
    st.t_blowup = best_T;
    const double growth = win.back().second / win.front().second;
    if (best.r2 >= o.min_r2 && best.slope < 0.0 && growth >= o.min_growth) st.kind = BlowUpKind::Growing;
    return st;
}

BlowUpStatus blowup_monitor(const Trajectory& traj, const BlowUpOptions& o) {
    std::vector<std::pair<double, double>> series;
    for (const auto& s : traj.snapshots) {
        if (!s.curvature) continue;
        if (!series.empty() && !(s.t > series.back().first)) continue;
        series.emplace_back(s.t, ricci_sup_norm(s));
    }
    BlowUpStatus st = blowup_monitor(series, o);
    if (traj.reason == TerminationReason::BlowUpDetected) {
        st.kind = BlowUpKind::Degenerate;
        st.degenerate_t = traj.final_state.t;
        st.degenerate_point = traj.point;
    }
    return st;
}

Pinching pinching_ratio(const CurvatureBundle& c, const MetricField& g, const Region& region,
                        const PlaneSampling& sampling) {
    const int n = g.g.dim();
    const ChartGrid& grid = g.g.grid();
    const Region r = region.intersect(c.riemann.valid()).intersect(g.g.valid());
    require_nonempty(r, "pinching_ratio");
    std::vector<double> kmax(grid.size(), -std::numeric_limits<double>::infinity());
    std::vector<double> kmin(grid.size(), std::numeric_limits<double>::infinity());

    for_each_point(grid, r, [&](std::size_t p) {
        auto take = [&](const double* u, const double* v) {
            try {
                const double k = sectional_curvature(c, g, p, {u, static_cast<std::size_t>(n)},
                                                     {v, static_cast<std::size_t>(n)});
                kmax[p] = std::max(kmax[p], k);
                kmin[p] = std::min(kmin[p], k);
                return true;
            } catch (const Error&) {
                return false;
            }
        };
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                double u[3] = {0, 0, 0}, v[3] = {0, 0, 0};
                u[a] = 1.0;
                v[b] = 1.0;
                take(u, v);
            }
        std::mt19937_64 rng(splitmix(sampling.seed ^ splitmix(p)));
        for (int k = 0; k < sampling.random_planes; ++k) {
            for (int tries = 0; tries < 16; ++tries) {
                double u[3], v[3];
                for (int a = 0; a < n; ++a) u[a] = 2.0 * unit_draw(rng()) - 1.0;
                for (int a = 0; a < n; ++a) v[a] = 2.0 * unit_draw(rng()) - 1.0;
                if (take(u, v)) break;
            }
        }
    });

    Pinching out{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), std::nullopt};
    for_each_point(grid, r, [&](std::size_t p) {
        out.k_max = std::max(out.k_max, kmax[p]);
        out.k_min = std::min(out.k_min, kmin[p]);
    }, /*parallel=*/false);
    if (out.k_max > kPinchingTolerance) out.ratio = out.k_min / out.k_max;
    return out;
}

}  // namespace hgf
