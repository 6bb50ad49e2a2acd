#include "hgf/kernels/stencil.hpp"

#include <array>
#include <string>

#include "hgf/errors.hpp"
#include "hgf/kernels/parallel.hpp"

namespace hgf {

namespace {

void check_args(const Field& f, int axis, int order) {
    if (axis < 0 || axis >= f.dim()) throw Error(ErrorKind::InvalidState, "derivative axis out of range");
    if (order != 1 && order != 2) throw Error(ErrorKind::InvalidState, "derivative order must be 1 or 2");
}

// Flat indices of the four neighbours (-2, -1, +1, +2) along axis.
std::array<std::size_t, 4> neighbours(const ChartGrid& g, int i0, int i1, int i2, int axis) noexcept {
    std::array<int, 3> idx{i0, i1, i2};
    const int n = g.shape()[axis];
    std::array<std::size_t, 4> out{};
    constexpr std::array<int, 4> offs{-2, -1, 1, 2};
    for (int k = 0; k < 4; ++k) {
        auto j = idx;
        j[axis] = g.periodic() ? (idx[axis] + offs[k] + n) % n : idx[axis] + offs[k];
        out[k] = g.index(j[0], j[1], j[2]);
    }
    return out;
}

}  // namespace

Region derivative_region(const ChartGrid& grid, const Region& in, int axis) {
    return grid.periodic() ? in : in.shrink(axis, kStencilRadius);
}

Field partial_derivative(const Field& f, int axis, int order) {
    check_args(f, axis, order);
    const ChartGrid& g = f.grid();
    Field out = f.zeros_like();
    out.set_valid(derivative_region(g, f.valid(), axis));
    require_nonempty(out.valid(), "partial_derivative");

    const double h = g.spacing()[axis];
    const int nc = f.components();
    const Region r = out.valid();
    const double* src = f.values().data();
    double* dst = out.values().data();

#pragma omp parallel for schedule(static)
    for (int i0 = r.lo[0]; i0 < r.hi[0]; ++i0)
        for (int i1 = r.lo[1]; i1 < r.hi[1]; ++i1)
            for (int i2 = r.lo[2]; i2 < r.hi[2]; ++i2) {
                const std::size_t p = g.index(i0, i1, i2);
                const auto nb = neighbours(g, i0, i1, i2, axis);
                const double* m2 = src + nb[0] * nc;
                const double* m1 = src + nb[1] * nc;
                const double* c0 = src + p * nc;
                const double* p1 = src + nb[2] * nc;
                const double* p2 = src + nb[3] * nc;
                double* o = dst + p * nc;
                if (order == 1) {
                    for (int c = 0; c < nc; ++c) o[c] = fd1(m2[c], m1[c], p1[c], p2[c], h);
                } else {
                    for (int c = 0; c < nc; ++c) o[c] = fd2(m2[c], m1[c], c0[c], p1[c], p2[c], h);
                }
            }
    return out;
}

void point_derivative(const Field& f, int i0, int i1, int i2, int axis, std::span<double> out) noexcept {
    const ChartGrid& g = f.grid();
    const auto nb = neighbours(g, i0, i1, i2, axis);
    const double h = g.spacing()[axis];
    const int nc = f.components();
    const double* src = f.values().data();
    const double* m2 = src + nb[0] * nc;
    const double* m1 = src + nb[1] * nc;
    const double* p1 = src + nb[2] * nc;
    const double* p2 = src + nb[3] * nc;
    for (int c = 0; c < nc; ++c) out[c] = fd1(m2[c], m1[c], p1[c], p2[c], h);
}

namespace serial {

Field partial_derivative(const Field& f, int axis, int order) {
    check_args(f, axis, order);
    const ChartGrid& g = f.grid();
    Field out = f.zeros_like();
    out.set_valid(derivative_region(g, f.valid(), axis));
    require_nonempty(out.valid(), "serial::partial_derivative");

    const double h = g.spacing()[axis];
    const int n = g.shape()[axis];
    const Region r = out.valid();
    auto sample = [&](std::array<int, 3> idx, int shift, int c) {
        idx[axis] += shift;
        if (g.periodic()) idx[axis] = ((idx[axis] % n) + n) % n;
        return f(g.index(idx[0], idx[1], idx[2]), c);
    };
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t p = 0; p < g.size(); ++p) {
            const auto idx = g.multi_index(p);
            if (!r.contains(idx[0], idx[1], idx[2])) continue;
            const double fm2 = sample(idx, -2, c), fm1 = sample(idx, -1, c);
            const double fp1 = sample(idx, 1, c), fp2 = sample(idx, 2, c);
            out(p, c) = order == 1 ? fd1(fm2, fm1, fp1, fp2, h) : fd2(fm2, fm1, f(p, c), fp1, fp2, h);
        }
    return out;
}

}  // namespace serial

}  // namespace hgf
