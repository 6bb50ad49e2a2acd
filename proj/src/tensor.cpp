#include "hgf/tensor.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "hgf/errors.hpp"
#include "hgf/index.hpp"
#include "hgf/kernels/parallel.hpp"
#include "hgf/kernels/stencil.hpp"

namespace hgf {

namespace {

Region all_axes_derivative_region(const Field& f) {
    Region r = f.valid();
    for (int a = 0; a < f.dim(); ++a) r = derivative_region(f.grid(), r, a);
    return r;
}

// digits[I * rank + s] = index in slot s of flat component I.
std::vector<int> digit_table(int n, int rank) {
    const int nc = tensor_components(n, rank);
    std::vector<int> d(static_cast<std::size_t>(nc) * rank);
    for (int I = 0; I < nc; ++I) {
        int rem = I;
        for (int s = rank - 1; s >= 0; --s) {
            d[I * rank + s] = rem % n;
            rem /= n;
        }
    }
    return d;
}

std::vector<int> stride_table(int n, int rank) {
    std::vector<int> st(rank);
    for (int s = 0; s < rank; ++s) st[s] = tensor_components(n, rank - 1 - s);
    return st;
}

// Covariant derivative of t at one point: out[a * nc + I] = (D_a t)_I.
// scratch must hold n * nc doubles.
void local_covariant_derivative(const Field& t, const Field& gamma, int i0, int i1, int i2,
                                const std::vector<int>& digits, const std::vector<int>& strides,
                                std::span<double> scratch, std::span<double> out) {
    const int n = t.dim();
    const int r = t.rank();
    const int nc = t.components();
    const std::uint32_t upper = t.upper_mask();
    const std::size_t p = t.grid().index(i0, i1, i2);
    const auto tp = t.at(p);
    const auto gp = gamma.at(p);
    const Idx ix{n};
    for (int a = 0; a < n; ++a) point_derivative(t, i0, i1, i2, a, scratch.subspan(a * nc, nc));
    for (int a = 0; a < n; ++a)
        for (int I = 0; I < nc; ++I) {
            double v = scratch[a * nc + I];
            for (int s = 0; s < r; ++s) {
                const int d = digits[I * r + s];
                const int base = I - d * strides[s];
                if (upper & (1u << s)) {
                    for (int m = 0; m < n; ++m) v += gp[ix(d, a, m)] * tp[base + m * strides[s]];
                } else {
                    for (int m = 0; m < n; ++m) v -= gp[ix(m, a, d)] * tp[base + m * strides[s]];
                }
            }
            out[a * nc + I] = v;
        }
}

}  // namespace

Field inverse_metric(const MetricField& m) {
    const Field& g = m.g;
    const int n = g.dim();
    Field out(g.grid(), 2, 0b11u);
    out.set_valid(g.valid());
    const std::ptrdiff_t bad = first_failure(g.grid(), g.valid(), [&](std::size_t p) {
        const auto a = g.at(p);
        for (double v : a)
            if (!std::isfinite(v)) return false;
        if (!(min_eigenvalue(a, n) > m.spd_floor)) return false;
        invert_symmetric(a, n, out.at(p));
        return true;
    });
    if (bad >= 0) throw Error(ErrorKind::MetricDegenerate, "metric eigenvalue at or below the SPD floor", bad);
    return out;
}

double min_metric_eigenvalue(const MetricField& m) {
    double lo = std::numeric_limits<double>::infinity();
    const int n = m.g.dim();
    for_each_point(m.g.grid(), m.g.valid(), [&](std::size_t p) {
        lo = std::min(lo, min_eigenvalue(m.g.at(p), n));
    }, /*parallel=*/false);
    return lo;
}

ConnectionField christoffel(const MetricField& m, const Field& ginv) {
    const Field& g = m.g;
    const int n = g.dim();
    std::vector<Field> dg;
    dg.reserve(n);
    for (int a = 0; a < n; ++a) dg.push_back(partial_derivative(g, a, 1));

    Field gamma(g.grid(), 3, 0b1u);
    Region r = ginv.valid();
    for (const auto& d : dg) r = r.intersect(d.valid());
    require_nonempty(r, "christoffel");
    gamma.set_valid(r);

    const Idx ix{n};
    for_each_point(g.grid(), r, [&](std::size_t p) {
        const auto gi = ginv.at(p);
        auto out = gamma.at(p);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l)
                        s += gi[ix(k, l)] * (dg[i](p, ix(j, l)) + dg[j](p, ix(i, l)) - dg[l](p, ix(i, j)));
                    out[ix(k, i, j)] = 0.5 * s;
                    out[ix(k, j, i)] = 0.5 * s;
                }
    });
    return {std::move(gamma)};
}

ConnectionField christoffel(const MetricField& m) { return christoffel(m, inverse_metric(m)); }

CurvatureBundle riemann(const MetricField& m, const ConnectionField& gamma) {
    return riemann(m, gamma, inverse_metric(m));
}

CurvatureBundle riemann(const MetricField& m, const ConnectionField& conn, const Field& ginv) {
    const Field& g = m.g;
    const int n = g.dim();
    const Idx ix{n};

    // hess[a * n + b] = ∂_a ∂_b g, stored for a <= b.
    std::vector<Field> hess(n * n);
    {
        std::vector<Field> dg;
        for (int a = 0; a < n; ++a) dg.push_back(partial_derivative(g, a, 1));
        for (int a = 0; a < n; ++a) {
            hess[a * n + a] = partial_derivative(g, a, 2);
            for (int b = a + 1; b < n; ++b) hess[a * n + b] = partial_derivative(dg[a], b, 1);
        }
    }
    Region r = conn.gamma.valid().intersect(ginv.valid());
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) r = r.intersect(hess[a * n + b].valid());
    require_nonempty(r, "riemann");

    Field riem(g.grid(), 4);
    riem.set_valid(r);

    auto H = [&](std::size_t p, int a, int b, int i, int j) {
        return a <= b ? hess[a * n + b](p, ix(i, j)) : hess[b * n + a](p, ix(i, j));
    };

    for_each_point(g.grid(), r, [&](std::size_t p) {
        const auto gp = g.at(p);
        const auto G = conn.gamma.at(p);
        auto out = riem.at(p);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = k + 1; l < n; ++l) {
                        if (ix(i, j) > ix(k, l)) continue;
                        double v = 0.5 * (H(p, j, k, i, l) + H(p, i, l, j, k) - H(p, j, l, i, k) - H(p, i, k, j, l));
                        for (int a = 0; a < n; ++a)
                            for (int b = 0; b < n; ++b)
                                v += gp[ix(a, b)] * (G[ix(a, j, k)] * G[ix(b, i, l)] - G[ix(a, j, l)] * G[ix(b, i, k)]);
                        out[ix(i, j, k, l)] = v;
                        out[ix(j, i, k, l)] = -v;
                        out[ix(i, j, l, k)] = -v;
                        out[ix(j, i, l, k)] = v;
                        out[ix(k, l, i, j)] = v;
                        out[ix(l, k, i, j)] = -v;
                        out[ix(k, l, j, i)] = -v;
                        out[ix(l, k, j, i)] = v;
                    }
    });

    CurvatureBundle b;
    b.ginv = ginv;
    b.riemann = std::move(riem);
    return b;
}

CurvatureBundle ricci_and_scalar(CurvatureBundle b) {
    const Field& R = b.riemann;
    const int n = R.dim();
    const Idx ix{n};
    Field ric(R.grid(), 2);
    Field scal(R.grid(), 0);
    const Region r = R.valid().intersect(b.ginv.valid());
    ric.set_valid(r);
    scal.set_valid(r);
    for_each_point(R.grid(), r, [&](std::size_t p) {
        const auto gi = b.ginv.at(p);
        const auto Rp = R.at(p);
        auto out = ric.at(p);
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                double s = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int k = 0; k < n; ++k) s += gi[ix(i, k)] * Rp[ix(i, j, k, l)];
                out[ix(j, l)] = s;
            }
        for (int j = 0; j < n; ++j)
            for (int l = j + 1; l < n; ++l) {
                const double s = 0.5 * (out[ix(j, l)] + out[ix(l, j)]);
                out[ix(j, l)] = s;
                out[ix(l, j)] = s;
            }
        double sc = 0.0;
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) sc += gi[ix(j, l)] * out[ix(j, l)];
        scal(p, 0) = sc;
    });
    b.ricci = std::move(ric);
    b.scalar = std::move(scal);
    return b;
}

CurvatureBundle curvature(const MetricField& g) {
    Field ginv = inverse_metric(g);
    ConnectionField gamma = christoffel(g, ginv);
    return ricci_and_scalar(riemann(g, gamma, ginv));
}

Field covariant_derivative(const Field& t, const ConnectionField& gamma) {
    const int n = t.dim();
    const int nc = t.components();
    Field out(t.grid(), t.rank() + 1, t.upper_mask() << 1);
    const Region r = all_axes_derivative_region(t).intersect(gamma.gamma.valid());
    require_nonempty(r, "covariant_derivative");
    out.set_valid(r);
    const auto digits = digit_table(n, t.rank());
    const auto strides = stride_table(n, t.rank());
    for_each_point_scratch(t.grid(), r, static_cast<std::size_t>(n) * nc,
                           [&](std::size_t p, int i0, int i1, int i2, std::span<double> scratch) {
                               local_covariant_derivative(t, gamma.gamma, i0, i1, i2, digits, strides, scratch,
                                                          out.at(p));
                           });
    return out;
}

Field second_covariant_derivative(const Field& t, const ConnectionField& gamma) {
    return covariant_derivative(covariant_derivative(t, gamma), gamma);
}

Field contracted_derivative(const Field& dt, const ConnectionField& gamma, const Field& ginv, int slot_a,
                            int slot_b) {
    const int n = dt.dim();
    const int r_full = dt.rank() + 1;
    const std::uint32_t full_mask = dt.upper_mask() << 1;
    if (slot_a < 0 || slot_b <= slot_a || slot_b >= r_full)
        throw Error(ErrorKind::InvalidState, "contraction slots out of range");
    if ((full_mask & (1u << slot_a)) || (full_mask & (1u << slot_b)))
        throw Error(ErrorKind::InvalidState, "contraction slots must be covariant");

    std::uint32_t out_mask = 0;
    for (int s = 0, o = 0; s < r_full; ++s) {
        if (s == slot_a || s == slot_b) continue;
        if (full_mask & (1u << s)) out_mask |= 1u << o;
        ++o;
    }
    Field out(dt.grid(), r_full - 2, out_mask);
    const Region r = all_axes_derivative_region(dt).intersect(gamma.gamma.valid()).intersect(ginv.valid());
    require_nonempty(r, "contracted_derivative");
    out.set_valid(r);

    const int nc_dt = dt.components();
    const int nc_full = tensor_components(n, r_full);
    const auto digits = digit_table(n, dt.rank());
    const auto strides = stride_table(n, dt.rank());
    const auto full_digits = digit_table(n, r_full);
    // Flat output index of every full component.
    std::vector<int> target(nc_full);
    for (int F = 0; F < nc_full; ++F) {
        int J = 0;
        for (int s = 0; s < r_full; ++s)
            if (s != slot_a && s != slot_b) J = J * n + full_digits[F * r_full + s];
        target[F] = J;
    }

    const Idx ix{n};
    for_each_point_scratch(dt.grid(), r, static_cast<std::size_t>(n) * nc_dt + nc_full,
                           [&](std::size_t p, int i0, int i1, int i2, std::span<double> scratch) {
                               auto local = scratch.subspan(static_cast<std::size_t>(n) * nc_dt, nc_full);
                               local_covariant_derivative(dt, gamma.gamma, i0, i1, i2, digits, strides,
                                                          scratch.first(static_cast<std::size_t>(n) * nc_dt), local);
                               const auto gi = ginv.at(p);
                               auto o = out.at(p);
                               for (int F = 0; F < nc_full; ++F) {
                                   const int x = full_digits[F * r_full + slot_a];
                                   const int y = full_digits[F * r_full + slot_b];
                                   o[target[F]] += gi[ix(x, y)] * local[F];
                               }
                           });
    return out;
}

Field rough_laplacian(const Field& t, const Field& ginv, const ConnectionField& gamma) {
    return contracted_derivative(covariant_derivative(t, gamma), gamma, ginv, 0, 1);
}

ConnectionVelocityField connection_velocity(const MetricField& g, const VelocityField& h, const Field& ginv,
                                            const ConnectionField& gamma) {
    const int n = g.g.dim();
    const Idx ix{n};
    const Field dh = covariant_derivative(h.h, gamma);
    Field b(g.g.grid(), 3, 0b1u);
    const Region r = dh.valid().intersect(ginv.valid());
    b.set_valid(r);
    for_each_point(g.g.grid(), r, [&](std::size_t p) {
        const auto gi = ginv.at(p);
        const auto D = dh.at(p);
        auto out = b.at(p);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l) s += gi[ix(k, l)] * (D[ix(i, j, l)] + D[ix(j, i, l)] - D[ix(l, i, j)]);
                    out[ix(k, i, j)] = 0.5 * s;
                    out[ix(k, j, i)] = 0.5 * s;
                }
    });
    return {std::move(b)};
}

ConnectionVelocityField connection_velocity(const MetricField& g, const VelocityField& h) {
    const Field ginv = inverse_metric(g);
    return connection_velocity(g, h, ginv, christoffel(g, ginv));
}

ConnectionAccelField connection_acceleration(const MetricField& g, const VelocityField& h,
                                             const CurvatureBundle& bundle, const ConnectionField& gamma,
                                             const ConnectionVelocityField& b) {
    const int n = g.g.dim();
    const Idx ix{n};
    const Field dric = covariant_derivative(bundle.ricci, gamma);
    Field a(g.g.grid(), 3, 0b1u);
    const Region r = dric.valid().intersect(b.b.valid()).intersect(bundle.ginv.valid());
    require_nonempty(r, "connection_acceleration");
    a.set_valid(r);
    for_each_point(g.g.grid(), r, [&](std::size_t p) {
        const auto gi = bundle.ginv.at(p);
        const auto D = dric.at(p);
        const auto hp = h.h.at(p);
        const auto B = b.b.at(p);
        auto out = a.at(p);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l) {
                        double hb = 0.0;
                        for (int m = 0; m < n; ++m) hb += hp[ix(l, m)] * B[ix(m, i, j)];
                        s += gi[ix(k, l)] * (-D[ix(i, j, l)] - D[ix(j, i, l)] + D[ix(l, i, j)] - 2.0 * hb);
                    }
                    out[ix(k, i, j)] = s;
                    out[ix(k, j, i)] = s;
                }
    });
    return {std::move(a)};
}

ConnectionAccelField connection_acceleration(const MetricField& g, const VelocityField& h,
                                             const CurvatureBundle& bundle) {
    const ConnectionField gamma = christoffel(g, bundle.ginv);
    return connection_acceleration(g, h, bundle, gamma, connection_velocity(g, h, bundle.ginv, gamma));
}

Field quad_contraction_B(const CurvatureBundle& bundle) {
    const Field& R = bundle.riemann;
    const int n = R.dim();
    const Idx ix{n};
    const int n4 = tensor_components(n, 4);
    Field out(R.grid(), 4);
    const Region r = R.valid().intersect(bundle.ginv.valid());
    out.set_valid(r);
    for_each_point_scratch(R.grid(), r, n4, [&](std::size_t p, int, int, int, std::span<double> U) {
        const auto gi = bundle.ginv.at(p);
        const auto Rp = R.at(p);
        // U_ij^rs = g^pr g^qs R_piqj
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int rr = 0; rr < n; ++rr)
                    for (int s = 0; s < n; ++s) {
                        double v = 0.0;
                        for (int pp = 0; pp < n; ++pp)
                            for (int q = 0; q < n; ++q) v += gi[ix(pp, rr)] * gi[ix(q, s)] * Rp[ix(pp, i, q, j)];
                        U[ix(i, j, rr, s)] = v;
                    }
        auto o = out.at(p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        double v = 0.0;
                        for (int rr = 0; rr < n; ++rr)
                            for (int s = 0; s < n; ++s) v += U[ix(i, j, rr, s)] * Rp[ix(rr, k, s, l)];
                        o[ix(i, j, k, l)] = v;
                    }
    });
    return out;
}

QTensorField q_tensor(const CurvatureBundle& bundle) {
    const Field& R = bundle.riemann;
    const int n = R.dim();
    const Idx ix{n};
    const int n4 = tensor_components(n, 4);
    QTensorField out{Field(R.grid(), 4), Field(R.grid(), 4), Field(R.grid(), 4)};
    const Region r = R.valid().intersect(bundle.ginv.valid());
    out.r2.set_valid(r);
    out.rsharp.set_valid(r);
    out.q.set_valid(r);

    auto raise_pair = [&](std::span<const double> gi, std::span<const double> Rp, int s1, int s2,
                          std::span<double> dst) {
        // dst[i][j][a][b] = g^pa g^qb R with slots s1 <- p, s2 <- q and the
        // two remaining slots (in order) <- i, j.
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        double v = 0.0;
                        for (int pp = 0; pp < n; ++pp)
                            for (int q = 0; q < n; ++q) {
                                int idx[4];
                                int free_slot = 0;
                                const int fr[2] = {i, j};
                                for (int s = 0; s < 4; ++s) {
                                    if (s == s1)
                                        idx[s] = pp;
                                    else if (s == s2)
                                        idx[s] = q;
                                    else
                                        idx[s] = fr[free_slot++];
                                }
                                v += gi[ix(pp, a)] * gi[ix(q, b)] * Rp[ix(idx[0], idx[1], idx[2], idx[3])];
                            }
                        dst[ix(i, j, a, b)] = v;
                    }
    };

    for_each_point_scratch(R.grid(), r, 2 * static_cast<std::size_t>(n4),
                           [&](std::size_t p, int, int, int, std::span<double> scratch) {
                               const auto gi = bundle.ginv.at(p);
                               const auto Rp = R.at(p);
                               auto up = scratch.first(n4);     // R_ij^ab
                               auto S = scratch.subspan(n4, n4);  // S_ik^ab = g^pa g^qb R_ipkq
                               raise_pair(gi, Rp, 2, 3, up);
                               raise_pair(gi, Rp, 1, 3, S);
                               auto r2 = out.r2.at(p);
                               auto rs = out.rsharp.at(p);
                               auto q = out.q.at(p);
                               for (int i = 0; i < n; ++i)
                                   for (int j = 0; j < n; ++j)
                                       for (int k = 0; k < n; ++k)
                                           for (int l = 0; l < n; ++l) {
                                               double a2 = 0.0, as = 0.0;
                                               for (int a = 0; a < n; ++a)
                                                   for (int b = 0; b < n; ++b) {
                                                       a2 += up[ix(i, j, a, b)] * Rp[ix(a, b, k, l)];
                                                       as += S[ix(i, k, a, b)] * Rp[ix(j, a, l, b)] -
                                                             S[ix(i, l, a, b)] * Rp[ix(j, a, k, b)];
                                                   }
                                               const int c = ix(i, j, k, l);
                                               r2[c] = a2;
                                               rs[c] = 2.0 * as;
                                               q[c] = a2 + 2.0 * as;
                                           }
                           });
    return out;
}

double sectional_curvature(const CurvatureBundle& bundle, const MetricField& g, std::size_t p,
                           std::span<const double> u, std::span<const double> v) {
    const int n = g.g.dim();
    const Idx ix{n};
    const auto gp = g.g.at(p);
    const auto Rp = bundle.riemann.at(p);
    double uu = 0.0, vv = 0.0, uv = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            uu += gp[ix(a, b)] * u[a] * u[b];
            vv += gp[ix(a, b)] * v[a] * v[b];
            uv += gp[ix(a, b)] * u[a] * v[b];
        }
    const double den = uu * vv - uv * uv;
    if (!(den > 1e-12 * uu * vv)) throw Error(ErrorKind::DegeneratePlane, "plane vectors are linearly dependent");
    double num = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) num += Rp[ix(a, b, c, d)] * u[a] * v[b] * u[c] * v[d];
    return num / den;
}

Field trace(const Field& t2, const Field& ginv) {
    const int n = t2.dim();
    const Idx ix{n};
    Field out(t2.grid(), 0);
    const Region r = t2.valid().intersect(ginv.valid());
    out.set_valid(r);
    for_each_point(t2.grid(), r, [&](std::size_t p) {
        const auto gi = ginv.at(p);
        const auto t = t2.at(p);
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += gi[ix(i, j)] * t[ix(i, j)];
        out(p, 0) = s;
    });
    return out;
}

}  // namespace hgf
