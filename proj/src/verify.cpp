#include "hgf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>

#include "hgf/errors.hpp"
#include "hgf/index.hpp"
#include "hgf/kernels/parallel.hpp"
#include "hgf/kernels/reduce.hpp"

namespace hgf {

std::string_view to_string(Status s) noexcept {
    switch (s) {
        case Status::Pass: return "PASS";
        case Status::Flag: return "FLAG";
        case Status::Fail: return "FAIL";
    }
    return "?";
}

double convergence_order(const ResidualSeries& s) {
    const auto& e = s.entries;
    if (e.size() < 2) throw Error(ErrorKind::InvalidState, "convergence order needs at least two resolutions");
    if (e.back().max_norm < kSaturationFloor)
        throw Error(ErrorKind::DegenerateSeries, "finest residual of " + s.id + " is at roundoff");
    for (const auto& r : e)
        if (!(r.max_norm > 0.0) || !(r.dx > 0.0))
            throw Error(ErrorKind::DegenerateSeries, "non-positive residual or spacing in " + s.id);
    if (e.size() == 2) return std::log(e[0].max_norm / e[1].max_norm) / std::log(e[0].dx / e[1].dx);
    double mx = 0.0, my = 0.0;
    for (const auto& r : e) {
        mx += std::log(r.dx);
        my += std::log(r.max_norm);
    }
    mx /= static_cast<double>(e.size());
    my /= static_cast<double>(e.size());
    double sxx = 0.0, sxy = 0.0;
    for (const auto& r : e) {
        sxx += (std::log(r.dx) - mx) * (std::log(r.dx) - mx);
        sxy += (std::log(r.dx) - mx) * (std::log(r.max_norm) - my);
    }
    if (sxx <= 0.0) throw Error(ErrorKind::DegenerateSeries, "all resolutions of " + s.id + " coincide");
    return sxy / sxx;
}

OrderEstimate estimate_order(const ResidualSeries& s) {
    OrderEstimate o;
    try {
        o.order = convergence_order(s);
        o.available = true;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::DegenerateSeries && !s.entries.empty() &&
            s.entries.back().max_norm < kSaturationFloor)
            o.saturated = true;
    }
    return o;
}

bool VerificationReport::any_fail() const noexcept {
    return std::any_of(entries.begin(), entries.end(), [](const ReportEntry& e) { return e.status == Status::Fail; });
}

const ReportEntry* VerificationReport::find(std::string_view id) const noexcept {
    for (const auto& e : entries)
        if (e.id == id) return &e;
    return nullptr;
}

void VerificationReport::append(const VerificationReport& other) {
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

void VerificationReport::sort() {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const ReportEntry& a, const ReportEntry& b) { return a.id < b.id; });
}

std::vector<ChartGrid> make_ladder(const ChartGrid& base, const std::vector<int>& points) {
    std::vector<ChartGrid> out;
    out.reserve(points.size());
    for (int p : points) out.push_back(resample(base, p));
    return out;
}

namespace {

Region common_region(const ChartGrid& grid, std::initializer_list<const Field*> fields) {
    Region r = grid.interior();
    for (const Field* f : fields) r = r.intersect(f->valid());
    require_nonempty(r, "verifier residual");
    return r;
}

ResidualEntry norms_of(const Field& res, const Region& r, double dx, double dt) {
    return {dx, dt, field_max_abs(res, r), field_rms(res, r)};
}

// lhs - rhs restricted to r.
Field difference(const Field& lhs, const Field& rhs, const Region& r) {
    Field d = axpby(1.0, lhs, -1.0, rhs);
    d.set_valid(d.valid().intersect(r));
    return d;
}

// Status from a residual series. min_order == 0 marks a bound check whose
// tolerance covers every rung; otherwise PASS needs the finest residual
// within tolerance and the observed order at least min_order. A series that
// sits at roundoff on every rung always passes.
ReportEntry judge_at(ResidualSeries s, double min_order, double tolerance, bool can_fail) {
    ReportEntry e;
    e.id = s.id;
    e.order = estimate_order(s);
    e.order_threshold = min_order;
    e.tolerance = tolerance;
    double worst = 0.0;
    for (const auto& r : s.entries) worst = std::max(worst, r.max_norm);
    const double finest = s.entries.empty() ? 0.0 : s.entries.back().max_norm;
    bool pass;
    if (worst <= kRoundoffTol)
        pass = true;
    else if (min_order == 0.0)
        pass = worst <= tolerance;
    else
        pass = finest <= tolerance && (e.order.saturated || (e.order.available && e.order.order >= e.order_threshold));
    if (!std::isfinite(worst)) pass = false;
    e.status = pass ? Status::Pass : (can_fail ? Status::Fail : Status::Flag);
    e.series = std::move(s);
    return e;
}

ReportEntry judge(ResidualSeries s, double theory, double tolerance, bool can_fail) {
    return judge_at(std::move(s), kOrderFraction * theory, tolerance, can_fail);
}

std::string at_time(const std::string& id, double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "@t=%g", t);
    return id + buf;
}

// Everything assembled spatially at one phase point (g, h).
struct Assembly {
    Region region;
    Field ginv;
    ConnectionField gamma;
    CurvatureBundle curv;
    Field b;  // B^k_ij
    Field a;  // A^k_ij
    Field evolution_riemann, evolution_ricci, evolution_scalar;
    Field riemann_literal, riemann_corrected;
    Field reaction_literal, reaction_corrected;
    Field ricci_frame, scalar_frame;
};

Assembly assemble(const MetricField& g, const VelocityField& h, bool negate_q) {
    const ChartGrid& grid = g.g.grid();
    const int n = g.g.dim();
    const Idx ix{n};

    Assembly s;
    s.ginv = inverse_metric(g);
    s.gamma = christoffel(g, s.ginv);
    s.curv = ricci_and_scalar(riemann(g, s.gamma, s.ginv));
    const Field& gi = s.ginv;
    const CurvatureBundle& cb = s.curv;

    Field q = q_tensor(cb).q;
    if (negate_q) q = scaled(-1.0, q);
    const Field qb = quad_contraction_B(cb);
    const Field lap_r = rough_laplacian(cb.riemann, gi, s.gamma);
    const Field lap_ric = rough_laplacian(cb.ricci, gi, s.gamma);
    const Field lap_scal = rough_laplacian(cb.scalar, gi, s.gamma);
    const Field d2ric = second_covariant_derivative(cb.ricci, s.gamma);
    const ConnectionVelocityField bv = connection_velocity(g, h, gi, s.gamma);
    s.b = bv.b;
    s.a = connection_acceleration(g, h, cb, s.gamma, bv).a;
    const Field db = covariant_derivative(s.b, s.gamma);
    const Field dh = covariant_derivative(h.h, s.gamma);

    s.region = common_region(grid, {&q, &qb, &lap_r, &lap_ric, &lap_scal, &d2ric, &s.b, &s.a, &db, &dh});
    const Region& r = s.region;
    for (Field* f : {&s.evolution_riemann, &s.riemann_literal, &s.riemann_corrected, &s.reaction_literal,
                     &s.reaction_corrected})
        *f = Field(grid, 4);
    for (Field* f : {&s.evolution_ricci, &s.ricci_frame}) *f = Field(grid, 2);
    for (Field* f : {&s.evolution_scalar, &s.scalar_frame}) *f = Field(grid, 0);

    for_each_point(grid, r, [&](std::size_t p) {
        const auto G = g.g.at(p);
        const auto GI = gi.at(p);
        const auto H = h.h.at(p);
        const auto R = cb.riemann.at(p);
        const auto Ric = cb.ricci.at(p);
        const auto B = s.b.at(p);
        const auto DB = db.at(p);
        const auto DH = dh.at(p);
        const auto D2 = d2ric.at(p);
        const auto Q = q.at(p);
        const auto QB = qb.at(p);
        const auto LR = lap_r.at(p);
        const auto LRic = lap_ric.at(p);
        const double LS = lap_scal(p, 0);

        double ricup[9] = {}, hup[9] = {}, hh[9] = {}, hg[9] = {};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int m = 0; m < n; ++m) {
                    ricup[ix(i, j)] += Ric[ix(i, m)] * GI[ix(m, j)];
                    hg[ix(i, j)] += H[ix(i, m)] * GI[ix(m, j)];
                }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int m = 0; m < n; ++m) hup[ix(i, j)] += GI[ix(i, m)] * hg[ix(m, j)];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int m = 0; m < n; ++m) hh[ix(i, j)] += hup[ix(i, m)] * hg[ix(m, j)];

        // ∂t R_ijkl = h_lm g^mq R_ijkq - g_lm (D_i B^m_jk - D_j B^m_ik)
        double rt[81] = {};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        double v = 0.0;
                        for (int m = 0; m < n; ++m)
                            v += hg[ix(l, m)] * R[ix(i, j, k, m)] -
                                 G[ix(l, m)] * (DB[ix(i, m, j, k)] - DB[ix(j, m, i, k)]);
                        rt[ix(i, j, k, l)] = v;
                    }
        double rict[9] = {};
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j)
                    for (int l = 0; l < n; ++l)
                        rict[ix(i, k)] += -hup[ix(j, l)] * R[ix(i, j, k, l)] + GI[ix(j, l)] * rt[ix(i, j, k, l)];

        // g(B(X,W), B(Y,Z)) - g(B(Y,W), B(X,Z)) as bb[i j k l]
        auto bb = [&](int i, int j, int k, int l) {
            double v = 0.0;
            for (int pp = 0; pp < n; ++pp)
                for (int qq = 0; qq < n; ++qq)
                    v += G[ix(pp, qq)] * (B[ix(pp, i, l)] * B[ix(qq, j, k)] - B[ix(pp, j, l)] * B[ix(qq, i, k)]);
            return v;
        };

        auto er = s.evolution_riemann.at(p);
        auto rl = s.riemann_literal.at(p);
        auto rc = s.riemann_corrected.at(p);
        auto xl = s.reaction_literal.at(p);
        auto xc = s.reaction_corrected.at(p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        const int c = ix(i, j, k, l);
                        const double bbt = bb(i, j, k, l);

                        double ricr = 0.0;
                        for (int pp = 0; pp < n; ++pp)
                            for (int qq = 0; qq < n; ++qq)
                                ricr += GI[ix(pp, qq)] * (R[ix(pp, j, k, l)] * Ric[ix(qq, i)] +
                                                          R[ix(i, pp, k, l)] * Ric[ix(qq, j)] +
                                                          R[ix(i, j, pp, l)] * Ric[ix(qq, k)] +
                                                          R[ix(i, j, k, pp)] * Ric[ix(qq, l)]);
                        er[c] = LR[c] + 2.0 * (QB[c] - QB[ix(i, j, l, k)] - QB[ix(i, l, j, k)] + QB[ix(i, k, j, l)]) -
                                ricr + 2.0 * bbt;

                        double ric_kl = 0.0, ric_ij = 0.0, hlit = 0.0, hcor = 0.0, bbl = 0.0;
                        for (int m = 0; m < n; ++m) {
                            ric_kl += ricup[ix(l, m)] * R[ix(i, j, k, m)] - ricup[ix(k, m)] * R[ix(i, j, l, m)];
                            ric_ij += ricup[ix(i, m)] * R[ix(k, l, j, m)] - ricup[ix(j, m)] * R[ix(k, l, i, m)];
                            hlit += H[ix(l, m)] * (DB[ix(i, m, j, k)] - DB[ix(j, m, i, k)]);
                            hcor += DH[ix(i, l, m)] * B[ix(m, j, k)] - DH[ix(j, l, m)] * B[ix(m, i, k)];
                            for (int pp = 0; pp < n; ++pp)
                                bbl += G[ix(l, m)] * (B[ix(m, i, pp)] * B[ix(pp, j, k)] - B[ix(m, j, pp)] * B[ix(pp, i, k)]);
                        }
                        const double d2 = D2[ix(i, k, j, l)] - D2[ix(i, l, j, k)] - D2[ix(j, k, i, l)] +
                                          D2[ix(j, l, i, k)];
                        rl[c] = ric_kl + d2 + 2.0 * hlit - 2.0 * bbl;
                        rc[c] = -ric_kl + d2 + 2.0 * hcor - 2.0 * bbl;
                        xl[c] = LR[c] + Q[c] + ric_ij + ric_kl + 2.0 * hlit - 2.0 * bbl;
                        xc[c] = LR[c] + Q[c] + ric_ij - ric_kl + 2.0 * hcor - 2.0 * bbl;
                    }

        auto ev = s.evolution_ricci.at(p);
        auto fr = s.ricci_frame.at(p);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                double rr = 0.0, rc2 = 0.0, bbs = 0.0, htr = 0.0, hhr = 0.0;
                double frr = 0.0, frh = 0.0, frb = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        rc2 += GI[ix(a, b)] * Ric[ix(a, i)] * Ric[ix(b, k)];
                        bbs += GI[ix(a, b)] * bb(i, a, k, b);
                        htr += hup[ix(a, b)] * rt[ix(i, a, k, b)];
                        hhr += hh[ix(a, b)] * R[ix(i, a, k, b)];
                        for (int c2 = 0; c2 < n; ++c2)
                            for (int d = 0; d < n; ++d) {
                                const double w = GI[ix(a, c2)] * GI[ix(b, d)] * Ric[ix(c2, d)];
                                rr += w * R[ix(a, i, b, k)];
                                frr += w * R[ix(i, a, k, b)];
                            }
                        for (int m = 0; m < n; ++m)
                            frh += GI[ix(a, b)] * H[ix(b, m)] * (DB[ix(i, m, a, k)] - DB[ix(a, m, i, k)]);
                    }
                for (int a = 0; a < n; ++a)
                    for (int m = 0; m < n; ++m)
                        frb += B[ix(a, i, m)] * B[ix(m, a, k)] - B[ix(a, a, m)] * B[ix(m, i, k)];
                ev[ix(i, k)] = LRic[ix(i, k)] + 2.0 * rr - 2.0 * rc2 + 2.0 * bbs - 2.0 * htr + 2.0 * hhr;
                // the frame sum over e_j (metric dual pairs) is g^{ab}; g^{ab} g_bp = δ^a_p
                fr[ix(i, k)] = LRic[ix(i, k)] + 2.0 * frr + 2.0 * frh - 2.0 * frb;
            }

        double ric2 = 0.0, bbsc = 0.0, htsc = 0.0, hric = 0.0, hhric = 0.0, fsh = 0.0, fsb = 0.0;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                hric += hup[ix(i, k)] * rict[ix(i, k)];
                hhric += hh[ix(i, k)] * Ric[ix(i, k)];
                for (int j = 0; j < n; ++j)
                    for (int l = 0; l < n; ++l) {
                        ric2 += Ric[ix(i, j)] * Ric[ix(k, l)] * GI[ix(i, k)] * GI[ix(j, l)];
                        bbsc += GI[ix(i, k)] * GI[ix(j, l)] * bb(i, j, k, l);
                        htsc += GI[ix(i, k)] * hup[ix(j, l)] * rt[ix(i, j, k, l)];
                    }
            }
        for (int j = 0; j < n; ++j)
            for (int jp = 0; jp < n; ++jp)
                for (int i = 0; i < n; ++i) {
                    for (int ip = 0; ip < n; ++ip)
                        for (int m = 0; m < n; ++m)
                            fsh += GI[ix(j, jp)] * GI[ix(i, ip)] * H[ix(ip, m)] *
                                   (DB[ix(j, m, i, jp)] - DB[ix(i, m, j, jp)]);
                    for (int m = 0; m < n; ++m)
                        fsb += GI[ix(j, jp)] * (B[ix(i, j, m)] * B[ix(m, i, jp)] - B[ix(i, i, m)] * B[ix(m, j, jp)]);
                }
        s.evolution_scalar(p, 0) = LS + 2.0 * ric2 + 2.0 * bbsc - 2.0 * htsc - 2.0 * hric + 4.0 * hhric;
        s.scalar_frame(p, 0) = LS + 2.0 * ric2 + 2.0 * fsh - 2.0 * fsb;
    });
    for (Field* f : {&s.evolution_riemann, &s.riemann_literal, &s.riemann_corrected, &s.reaction_literal,
                     &s.reaction_corrected, &s.evolution_ricci, &s.ricci_frame, &s.evolution_scalar, &s.scalar_frame})
        f->set_valid(r);
    return s;
}

// c_m f_m + c_0 f_0 + c_p f_p
Field combine3(double cm, const Field& fm, double c0, const Field& f0, double cp, const Field& fp) {
    return axpby(1.0, axpby(cm, fm, c0, f0), cp, fp);
}

// Three-point derivatives on a possibly nonuniform stencil t0-h1, t0, t0+h2.
Field first_difference(const Field& fm, const Field& f0, const Field& fp, double h1, double h2) {
    const double d = h1 * h2 * (h1 + h2);
    return combine3(-h2 * h2 / d, fm, (h2 * h2 - h1 * h1) / d, f0, h1 * h1 / d, fp);
}

Field second_difference(const Field& fm, const Field& f0, const Field& fp, double h1, double h2) {
    const double a = 2.0 / (h2 * (h1 + h2));
    const double c = 2.0 / (h1 * (h1 + h2));
    return combine3(c, fm, -(a + c), f0, a, fp);
}

CurvatureBundle bundle_of(const Snapshot& s) {
    return s.curvature ? *s.curvature : curvature(s.g);
}

struct RungResiduals {
    double dx = 0.0;
    double dt = 0.0;
    std::vector<std::pair<std::string, ResidualEntry>> rows;
};

RungResiduals dynamic_rung(const Trajectory& tr, const DynamicOptions& o) {
    const auto& snaps = tr.snapshots;
    if (snaps.size() < 5) throw Error(ErrorKind::InsufficientSnapshots, "dynamic check needs five snapshots");
    std::size_t c = 0;
    for (std::size_t i = 1; i < snaps.size(); ++i)
        if (std::abs(snaps[i].t - o.t_check) < std::abs(snaps[c].t - o.t_check)) c = i;
    if (c < 2 || c + 2 >= snaps.size())
        throw Error(ErrorKind::InsufficientSnapshots, "fewer than two snapshots on one side of t_check");
    for (std::size_t i = c - 2; i < c + 2; ++i)
        if (snaps[i + 1].step != snaps[i].step + 1)
            throw Error(ErrorKind::InsufficientSnapshots, "snapshots around t_check are not consecutive steps");

    const Snapshot& sm = snaps[c - 1];
    const Snapshot& s0 = snaps[c];
    const Snapshot& sp = snaps[c + 1];
    const double h1 = s0.t - sm.t;
    const double h2 = sp.t - s0.t;

    const Assembly a = assemble(s0.g, s0.h, o.inject_q_sign_error);
    const CurvatureBundle cm = bundle_of(sm);
    const CurvatureBundle cp = bundle_of(sp);
    const ConnectionField gm = christoffel(sm.g);
    const ConnectionField gp = christoffel(sp.g);

    RungResiduals out;
    out.dx = s0.g.g.grid().min_spacing();
    out.dt = std::max(h1, h2);
    const Region& r = a.region;
    auto add = [&](const char* id, const Field& lhs, const Field& rhs) {
        out.rows.emplace_back(id, norms_of(difference(lhs, rhs, r), r, out.dx, out.dt));
    };

    const Field r_tt = second_difference(cm.riemann, a.curv.riemann, cp.riemann, h1, h2);
    add("evolution.riemann", r_tt, a.evolution_riemann);
    add("global.riemann.literal", r_tt, a.riemann_literal);
    add("global.riemann.corrected", r_tt, a.riemann_corrected);
    add("global.reaction.literal", r_tt, a.reaction_literal);
    add("global.reaction.corrected", r_tt, a.reaction_corrected);
    const Field ric_tt = second_difference(cm.ricci, a.curv.ricci, cp.ricci, h1, h2);
    add("evolution.ricci", ric_tt, a.evolution_ricci);
    add("global.ricci_frame", ric_tt, a.ricci_frame);
    const Field s_tt = second_difference(cm.scalar, a.curv.scalar, cp.scalar, h1, h2);
    add("evolution.scalar", s_tt, a.evolution_scalar);
    add("global.scalar_frame", s_tt, a.scalar_frame);
    add("connection.velocity", first_difference(gm.gamma, a.gamma.gamma, gp.gamma, h1, h2), a.b);
    add("connection.acceleration", second_difference(gm.gamma, a.gamma.gamma, gp.gamma, h1, h2), a.a);
    return out;
}

bool starts_with(const std::string& s, std::string_view prefix) {
    return s.compare(0, prefix.size(), prefix) == 0;
}

VerificationReport dynamic_report(const std::vector<Trajectory>& ladder, const DynamicOptions& o,
                                  std::initializer_list<std::string_view> prefixes) {
    if (ladder.empty()) throw Error(ErrorKind::InvalidState, "empty trajectory ladder");
    std::vector<RungResiduals> rungs;
    for (const auto& tr : ladder) rungs.push_back(dynamic_rung(tr, o));

    VerificationReport rep;
    const bool oracle = o.mode == CheckMode::Oracle;
    for (std::size_t k = 0; k < rungs.front().rows.size(); ++k) {
        const std::string& id = rungs.front().rows[k].first;
        if (!std::any_of(prefixes.begin(), prefixes.end(), [&](std::string_view p) { return starts_with(id, p); }))
            continue;
        ResidualSeries s{id, {}};
        for (const auto& r : rungs) s.entries.push_back(r.rows[k].second);
        const bool frame = id == "global.ricci_frame" || id == "global.scalar_frame";
        rep.entries.push_back(judge(std::move(s), 2.0, o.tolerance, oracle && !frame));
    }
    return rep;
}

}  // namespace

VerificationReport check_static_identities(const MetricPreset& preset, const std::vector<ChartGrid>& ladder,
                                           const StaticOptions& o) {
    if (ladder.empty()) throw Error(ErrorKind::InvalidState, "empty ladder");
    const char* ids[] = {"bianchi1.riemann",   "bianchi1.q",          "bianchi2.div_ric",    "bianchi2.contracted",
                         "d2ric.laplacian",    "ricci_identity.plus", "ricci_identity.minus"};
    std::vector<ResidualSeries> series;
    for (const char* id : ids) series.push_back({id, {}});
    double scale_r = 0.0, scale_q = 0.0;

    for (const ChartGrid& grid : ladder) {
        const int n = grid.dim();
        const Idx ix{n};
        const MetricField g = instantiate(preset, grid, 0.0).g;
        const Field gi = inverse_metric(g);
        const ConnectionField gamma = christoffel(g, gi);
        const CurvatureBundle cb = ricci_and_scalar(riemann(g, gamma, gi));
        Field q = q_tensor(cb).q;
        if (o.inject_q_sign_error) q = scaled(-1.0, q);
        const Field dric = covariant_derivative(cb.ricci, gamma);
        const Field d2ric = covariant_derivative(dric, gamma);
        const Field dscal = covariant_derivative(cb.scalar, gamma);
        const Field dr = covariant_derivative(cb.riemann, gamma);
        const Field lap_r = contracted_derivative(dr, gamma, gi, 0, 1);
        const Field div_dr = contracted_derivative(dr, gamma, gi, 1, 2);

        const Region r = common_region(grid, {&cb.riemann, &q, &dric, &d2ric, &dscal, &lap_r, &div_dr});
        scale_r = std::max(scale_r, field_max_abs(cb.riemann, r));
        scale_q = std::max(scale_q, field_max_abs(q, r));

        Field b1r(grid, 4), b1q(grid, 4), div(grid, 1), contracted(grid, 4), d2ric_res(grid, 4), plus(grid, 4),
            minus(grid, 4);
        for_each_point(grid, r, [&](std::size_t p) {
            const auto GI = gi.at(p);
            const auto R = cb.riemann.at(p);
            const auto Ric = cb.ricci.at(p);
            const auto Q = q.at(p);
            const auto DRic = dric.at(p);
            const auto D2 = d2ric.at(p);
            const auto LR = lap_r.at(p);
            const auto DV = div_dr.at(p);
            double ricup[9] = {};
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int m = 0; m < n; ++m) ricup[ix(i, j)] += Ric[ix(i, m)] * GI[ix(m, j)];
            for (int k = 0; k < n; ++k) {
                double v = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int j = 0; j < n; ++j) v += GI[ix(a, j)] * DRic[ix(a, j, k)];
                div(p, k) = v - 0.5 * dscal(p, k);
            }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l) {
                            const int c = ix(i, j, k, l);
                            b1r(p, c) = R[c] + R[ix(i, k, l, j)] + R[ix(i, l, j, k)];
                            b1q(p, c) = Q[c] + Q[ix(i, k, l, j)] + Q[ix(i, l, j, k)];
                            const double two = D2[ix(i, k, j, l)] - D2[ix(i, l, j, k)];
                            contracted(p, c) = two - DV[c];
                            double rr = 0.0, pp = 0.0;
                            for (int m = 0; m < n; ++m) {
                                rr += ricup[ix(i, m)] * R[ix(k, l, j, m)] - ricup[ix(j, m)] * R[ix(k, l, i, m)];
                                // R^m_ijk Ric_ml + R^m_ijl Ric_km with R^m_ijk = -g^mq R_ijkq
                                for (int qq = 0; qq < n; ++qq)
                                    pp -= GI[ix(m, qq)] *
                                          (R[ix(i, j, k, qq)] * Ric[ix(m, l)] + R[ix(i, j, l, qq)] * Ric[ix(k, m)]);
                            }
                            const double four = two - D2[ix(j, k, i, l)] + D2[ix(j, l, i, k)];
                            d2ric_res(p, c) = four - (LR[c] + Q[c] + rr);
                            const double comm = D2[c] - D2[ix(j, i, k, l)];
                            plus(p, c) = comm - pp;
                            minus(p, c) = comm + pp;
                        }
        });
        const double dx = grid.min_spacing();
        const Field* res[] = {&b1r, &b1q, &div, &contracted, &d2ric_res, &plus, &minus};
        for (std::size_t k = 0; k < series.size(); ++k) series[k].entries.push_back(norms_of(*res[k], r, dx, 0.0));
    }

    const bool oracle = o.mode == CheckMode::Oracle;
    VerificationReport rep;
    rep.entries.push_back(judge(series[0], 0.0, kRoundoffTol * (scale_r + 1.0), oracle));
    rep.entries.push_back(judge(series[1], 0.0, kRoundoffTol * (scale_q + 1.0), oracle));
    for (std::size_t k = 2; k < 5; ++k) rep.entries.push_back(judge(series[k], 4.0, o.tolerance, oracle));
    rep.entries.push_back(judge(series[5], 4.0, o.tolerance, false));
    rep.entries.push_back(judge(series[6], 4.0, o.tolerance, false));
    return rep;
}

VerificationReport check_local_evolution(const std::vector<Trajectory>& ladder, const DynamicOptions& o) {
    return dynamic_report(ladder, o, {"evolution."});
}

VerificationReport check_global_evolution(const std::vector<Trajectory>& ladder, const DynamicOptions& o) {
    return dynamic_report(ladder, o, {"global."});
}

VerificationReport check_connection_acceleration(const std::vector<Trajectory>& ladder, const DynamicOptions& o) {
    return dynamic_report(ladder, o, {"connection."});
}

VerificationReport check_dynamic(const std::vector<Trajectory>& ladder, const DynamicOptions& o) {
    return dynamic_report(ladder, o, {"evolution.", "global.", "connection."});
}

std::vector<Trajectory> run_ladder(const MetricPreset& preset, const std::vector<ChartGrid>& ladder, double t_check,
                                   double dt_over_dx, const FlowVariant& v) {
    if (ladder.empty()) throw Error(ErrorKind::InvalidState, "empty ladder");
    if (!(t_check > 0.0) || !(dt_over_dx > 0.0))
        throw Error(ErrorKind::InvalidState, "run_ladder needs t_check > 0 and dt_over_dx > 0");
    const double dx0 = ladder.front().min_spacing();
    long m = std::max(2L, static_cast<long>(std::ceil(t_check / (dt_over_dx * dx0))));
    std::vector<Trajectory> out;
    for (const ChartGrid& grid : ladder) {
        const PresetState ps = instantiate(preset, grid, 0.0);
        FlowState s0{0.0, ps.g, ps.h, 0};
        StepControl c;
        c.fixed_dt = t_check / static_cast<double>(m);
        c.t_end = t_check + 2.0 * c.fixed_dt;
        c.snapshot_stride = 1;
        c.record_curvature = true;
        out.push_back(simulate(s0, v, c));
        m *= 2;
    }
    return out;
}

VerificationReport conformal_residual(const MetricPreset& family, const std::vector<ChartGrid>& ladder,
                                      const std::vector<double>& t_samples, double tolerance) {
    if (family.family == FamilyKind::None) throw Error(ErrorKind::ConfigError, "preset has no family");
    MetricPreset base = family;
    base.family = FamilyKind::None;
    base.velocity = {};
    const double rho_tt = family.family == FamilyKind::Conformal ? -2.0 * family.lambda : -4.0 * family.kappa;

    VerificationReport rep;
    for (double t : t_samples) {
        ResidualSeries hgf{at_time("conformal.hgf", t), {}};
        ResidualSeries inv{at_time("conformal.ricci_invariance", t), {}};
        for (const ChartGrid& grid : ladder) {
            const MetricField g0 = instantiate(base, grid, 0.0).g;
            const MetricField g = instantiate(family, grid, t).g;
            const CurvatureBundle c0 = curvature(g0);
            const CurvatureBundle c = curvature(g);
            const Field res = axpby(rho_tt, g0.g, 2.0, c.ricci);
            const Field dif = axpby(1.0, c.ricci, -1.0, c0.ricci);
            const Region r = common_region(grid, {&res, &dif});
            const double dx = grid.min_spacing();
            hgf.entries.push_back(norms_of(res, r, dx, 0.0));
            inv.entries.push_back(norms_of(dif, r, dx, 0.0));
        }
        rep.entries.push_back(judge(std::move(hgf), 4.0, tolerance, true));
        rep.entries.push_back(judge(std::move(inv), 0.0, kRoundoffTol, true));
    }
    return rep;
}

VerificationReport check_global_closed_form(const MetricPreset& family, const std::vector<ChartGrid>& ladder,
                                            const std::vector<double>& t_samples, double tolerance) {
    if (family.family == FamilyKind::None) throw Error(ErrorKind::ConfigError, "preset has no family");
    if (ladder.empty()) throw Error(ErrorKind::InvalidState, "empty ladder");
    MetricPreset base = family;
    base.family = FamilyKind::None;
    base.velocity = {};
    const int n = ladder.front().dim();
    const double k0 = einstein_constant(base, n) / static_cast<double>(n - 1);
    const double rho_tt = family.family == FamilyKind::Conformal ? -2.0 * family.lambda : -4.0 * family.kappa;
    const Idx ix{n};

    VerificationReport rep;
    for (double t : t_samples) {
        const char* ids[] = {"closed_form.riemann.literal", "closed_form.riemann.corrected",
                             "closed_form.reaction.literal", "closed_form.reaction.corrected",
                             "closed_form.connection_acceleration"};
        std::vector<ResidualSeries> series;
        for (const char* id : ids) series.push_back({at_time(id, t), {}});
        for (const ChartGrid& grid : ladder) {
            const MetricField g0 = instantiate(base, grid, 0.0).g;
            const PresetState st = instantiate(family, grid, t);
            const Assembly a = assemble(st.g, st.h, false);
            Field lhs(grid, 4);
            for_each_point(grid, a.region, [&](std::size_t p) {
                const auto G = g0.g.at(p);
                auto L = lhs.at(p);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int k = 0; k < n; ++k)
                            for (int l = 0; l < n; ++l)
                                L[ix(i, j, k, l)] =
                                    rho_tt * k0 * (G[ix(i, k)] * G[ix(j, l)] - G[ix(i, l)] * G[ix(j, k)]);
            });
            lhs.set_valid(a.region);
            const double dx = grid.min_spacing();
            const Field* rhs[] = {&a.riemann_literal, &a.riemann_corrected, &a.reaction_literal,
                                  &a.reaction_corrected};
            for (std::size_t k = 0; k < 4; ++k)
                series[k].entries.push_back(norms_of(difference(lhs, *rhs[k], a.region), a.region, dx, 0.0));
            series[4].entries.push_back(norms_of(a.a, a.region, dx, 0.0));
        }
        for (auto& s : series) rep.entries.push_back(judge(std::move(s), 4.0, tolerance, true));
    }
    return rep;
}

namespace {

double relative_max_diff(const Field& a, const Field& b) {
    const Region r = a.grid().full_region();
    return field_max_abs(axpby(1.0, a, -1.0, b), r) / field_max_abs(b, r);
}

FlowState advance(FlowState s, const FlowVariant& v, double dt, int steps) {
    for (int k = 0; k < steps; ++k) s = step(s, v, dt);
    return s;
}

}  // namespace

VerificationReport check_surface_reduction(const MetricPreset& conformal, const ChartGrid& grid, int steps,
                                           double dt_over_dx, const std::vector<double>& eps) {
    if (grid.dim() != 2) throw Error(ErrorKind::ConfigError, "the surface reduction needs a 2D chart");
    if (steps < 1 || !(dt_over_dx > 0.0)) throw Error(ErrorKind::ConfigError, "reduction needs steps and dt > 0");
    const double dt = dt_over_dx * grid.min_spacing();
    VerificationReport rep;

    const PresetState ps = instantiate(conformal, grid, 0.0);
    const Field u0 = conformal_factor(ps.g.g);
    const Field ut0 = conformal_factor(ps.h.h);
    if (relative_max_diff(conformal_metric(u0).g, ps.g.g) > 0.0 || relative_max_diff(conformal_metric(ut0).g, ps.h.h) > 0.0)
        throw Error(ErrorKind::ConfigError, "surface reduction needs conformally flat data g = u δ, h = u_t δ");
    const FlowState tensor = advance({0.0, ps.g, ps.h, 0}, {}, dt, steps);
    const FlowState surface = advance({0.0, {u0}, {ut0}, 0}, {FlowKind::Surface2D}, dt, steps);
    const double rel = relative_max_diff(conformal_factor(tensor.g.g), surface.g.g);
    ResidualSeries red{"reduction.surface_vs_tensor", {{grid.min_spacing(), dt, rel, rel}}};
    rep.entries.push_back(judge_at(std::move(red), 0.0, 1e-8, true));

    ResidualSeries wave{"reduction.linear_wave", {}};
    for (double e : eps) {
        Field u(grid, 0);
        for (std::size_t p = 0; p < grid.size(); ++p) u(p, 0) = 1.0 + e * std::cos(grid.position(p)[0]);
        const FlowState s = advance({0.0, {u}, {u.zeros_like()}, 0}, {FlowKind::Surface2D}, dt, steps);
        double err = 0.0;
        for (std::size_t p = 0; p < grid.size(); ++p)
            err = std::max(err, std::abs(s.g.g(p, 0) - 1.0 - e * std::cos(grid.position(p)[0]) * std::cos(s.t)));
        // the order is measured in ε, so ε stands in for the spacing
        wave.entries.push_back({e, dt, err, err});
    }
    std::reverse(wave.entries.begin(), wave.entries.end());
    rep.entries.push_back(judge_at(std::move(wave), 1.7, 1e-4, true));
    return rep;
}

VerificationReport check_integrator(const MetricPreset& preset, const ChartGrid& grid, int steps, double dt_over_dx,
                                    double t_end, int m) {
    if (steps < 1 || m < 1 || !(dt_over_dx > 0.0) || !(t_end > 0.0))
        throw Error(ErrorKind::ConfigError, "integrator check needs positive steps, m, dt and t_end");
    const PresetState ps = instantiate(preset, grid, 0.0);
    const FlowState s0{0.0, ps.g, ps.h, 0};
    VerificationReport rep;

    const double dt = dt_over_dx * grid.min_spacing();
    FlowState s = advance(s0, {}, dt, steps);
    s.h.h = scaled(-1.0, s.h.h);
    s = advance(s, {}, dt, steps);
    const double rel = relative_max_diff(s.g.g, s0.g.g);
    ResidualSeries rev{"integrator.time_reversal", {{grid.min_spacing(), dt, rel, rel}}};
    rep.entries.push_back(judge_at(std::move(rev), 0.0, 1e-8, true));

    auto run = [&](int k) { return advance(s0, {}, t_end / (m * k), m * k).g.g; };
    const Field ref = run(4);
    ResidualSeries ord{"integrator.temporal_order", {}};
    for (int k : {1, 2}) {
        const Field d = axpby(1.0, run(k), -1.0, ref);
        ord.entries.push_back({t_end / (m * k), t_end / (m * k), field_max_abs(d, grid.full_region()),
                               field_rms(d, grid.full_region())});
    }
    rep.entries.push_back(judge_at(std::move(ord), 3.7, 1e-3, true));
    return rep;
}

}  // namespace hgf
