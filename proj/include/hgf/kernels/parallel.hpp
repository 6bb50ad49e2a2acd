#pragma once

#include <cstddef>
#include <limits>

#include "hgf/grid.hpp"

namespace hgf {

/// Calls fn(p) for every flat point index p in the region. The outer axis is
/// split across OpenMP threads; each p is visited exactly once, so kernels
/// that write only to point p are bitwise independent of the thread count.
template <class F>
void for_each_point(const ChartGrid& grid, const Region& region, F&& fn, bool parallel = true) {
    if (region.empty()) return;
#pragma omp parallel for schedule(static) if (parallel)
    for (int i0 = region.lo[0]; i0 < region.hi[0]; ++i0)
        for (int i1 = region.lo[1]; i1 < region.hi[1]; ++i1)
            for (int i2 = region.lo[2]; i2 < region.hi[2]; ++i2) fn(grid.index(i0, i1, i2));
}

/// Smallest flat index in the region for which ok(p) is false, or -1.
/// Exceptions cannot leave an OpenMP region, so kernels that can fail report
/// through this and throw afterwards.
template <class Pred>
std::ptrdiff_t first_failure(const ChartGrid& grid, const Region& region, Pred&& ok) {
    std::ptrdiff_t worst = std::numeric_limits<std::ptrdiff_t>::max();
    if (!region.empty()) {
#pragma omp parallel for schedule(static) reduction(min : worst)
        for (int i0 = region.lo[0]; i0 < region.hi[0]; ++i0)
            for (int i1 = region.lo[1]; i1 < region.hi[1]; ++i1)
                for (int i2 = region.lo[2]; i2 < region.hi[2]; ++i2) {
                    const std::size_t p = grid.index(i0, i1, i2);
                    if (!ok(p) && static_cast<std::ptrdiff_t>(p) < worst) worst = static_cast<std::ptrdiff_t>(p);
                }
    }
    return worst == std::numeric_limits<std::ptrdiff_t>::max() ? -1 : worst;
}

}  // namespace hgf

#include <span>
#include <vector>

namespace hgf {

/// for_each_point variant that hands each thread a private scratch buffer of
/// `scratch_size` doubles: fn(p, i0, i1, i2, scratch).
template <class F>
void for_each_point_scratch(const ChartGrid& grid, const Region& region, std::size_t scratch_size, F&& fn) {
    if (region.empty()) return;
#pragma omp parallel
    {
        std::vector<double> scratch(scratch_size);
#pragma omp for schedule(static)
        for (int i0 = region.lo[0]; i0 < region.hi[0]; ++i0)
            for (int i1 = region.lo[1]; i1 < region.hi[1]; ++i1)
                for (int i2 = region.lo[2]; i2 < region.hi[2]; ++i2)
                    fn(grid.index(i0, i1, i2), i0, i1, i2, std::span<double>(scratch));
    }
}

}  // namespace hgf
