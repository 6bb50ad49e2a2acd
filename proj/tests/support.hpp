#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "hgf/field.hpp"
#include "hgf/grid.hpp"
#include "hgf/tensor.hpp"

namespace test {

using Pos = std::array<double, 3>;

// Field filled from a closed form evaluated at each grid point. fn writes
// all components of one point.
inline hgf::Field make_field(const hgf::ChartGrid& grid, int rank, const std::function<void(const Pos&, double*)>& fn,
                             std::uint32_t upper = 0) {
    hgf::Field f(grid, rank, upper);
    for (std::size_t p = 0; p < grid.size(); ++p) fn(grid.position(p), f.at(p).data());
    return f;
}

inline hgf::Field make_scalar(const hgf::ChartGrid& grid, const std::function<double(const Pos&)>& fn) {
    return make_field(grid, 0, [&](const Pos& x, double* out) { out[0] = fn(x); });
}

// Max |f - oracle| over region, componentwise.
inline double max_error(const hgf::Field& f, const hgf::Region& region,
                        const std::function<void(const Pos&, double*)>& oracle) {
    std::vector<double> want(f.components());
    double err = 0.0;
    const auto& g = f.grid();
    for (int i0 = region.lo[0]; i0 < region.hi[0]; ++i0)
        for (int i1 = region.lo[1]; i1 < region.hi[1]; ++i1)
            for (int i2 = region.lo[2]; i2 < region.hi[2]; ++i2) {
                const std::size_t p = g.index(i0, i1, i2);
                oracle(g.position(p), want.data());
                for (int c = 0; c < f.components(); ++c) err = std::max(err, std::abs(f(p, c) - want[c]));
            }
    return err;
}

inline double max_abs_in(const hgf::Field& f, const hgf::Region& region) {
    return max_error(f, region, [&](const Pos&, double* w) {
        for (int c = 0; c < f.components(); ++c) w[c] = 0.0;
    });
}

// Points of a region in flat-index order.
inline std::vector<std::size_t> points_of(const hgf::ChartGrid& g, const hgf::Region& r) {
    std::vector<std::size_t> out;
    for (int i0 = r.lo[0]; i0 < r.hi[0]; ++i0)
        for (int i1 = r.lo[1]; i1 < r.hi[1]; ++i1)
            for (int i2 = r.lo[2]; i2 < r.hi[2]; ++i2) out.push_back(g.index(i0, i1, i2));
    return out;
}

// Orthonormal frame of g at a point by Gram-Schmidt on the coordinate basis
// in axis order. e[k][a] is the a-th coordinate component of e_k.
inline std::vector<std::vector<double>> gram_schmidt(std::span<const double> g, int n) {
    auto dot = [&](const std::vector<double>& u, const std::vector<double>& v) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) s += g[a * n + b] * u[a] * v[b];
        return s;
    };
    std::vector<std::vector<double>> e;
    for (int k = 0; k < n; ++k) {
        std::vector<double> v(n, 0.0);
        v[k] = 1.0;
        for (const auto& prev : e) {
            const double c = dot(v, prev);
            for (int a = 0; a < n; ++a) v[a] -= c * prev[a];
        }
        const double norm = std::sqrt(dot(v, v));
        for (int a = 0; a < n; ++a) v[a] /= norm;
        e.push_back(v);
    }
    return e;
}

// T(v0, v1, ..., v_{r-1}) for a covariant rank-r tensor at one point.
inline double evaluate(std::span<const double> t, int n, const std::vector<const std::vector<double>*>& vs) {
    const int r = static_cast<int>(vs.size());
    int total = 1;
    for (int s = 0; s < r; ++s) total *= n;
    double sum = 0.0;
    for (int I = 0; I < total; ++I) {
        double w = t[I];
        int rem = I;
        for (int s = r - 1; s >= 0; --s) {
            w *= (*vs[s])[rem % n];
            rem /= n;
        }
        sum += w;
    }
    return sum;
}

}  // namespace test
