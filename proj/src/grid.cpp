#include "hgf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hgf/errors.hpp"

namespace hgf {

bool Region::empty() const noexcept {
    for (int a = 0; a < 3; ++a)
        if (hi[a] <= lo[a]) return true;
    return false;
}

std::size_t Region::size() const noexcept {
    if (empty()) return 0;
    std::size_t n = 1;
    for (int a = 0; a < 3; ++a) n *= static_cast<std::size_t>(hi[a] - lo[a]);
    return n;
}

bool Region::contains(int i0, int i1, int i2) const noexcept {
    return i0 >= lo[0] && i0 < hi[0] && i1 >= lo[1] && i1 < hi[1] && i2 >= lo[2] && i2 < hi[2];
}

Region Region::intersect(const Region& other) const noexcept {
    Region r;
    for (int a = 0; a < 3; ++a) {
        r.lo[a] = std::max(lo[a], other.lo[a]);
        r.hi[a] = std::min(hi[a], other.hi[a]);
    }
    return r;
}

Region Region::shrink(int axis, int amount) const noexcept {
    Region r = *this;
    r.lo[axis] += amount;
    r.hi[axis] -= amount;
    return r;
}

std::array<int, 3> ChartGrid::multi_index(std::size_t p) const noexcept {
    const auto i2 = static_cast<int>(p % shape_[2]);
    p /= shape_[2];
    const auto i1 = static_cast<int>(p % shape_[1]);
    const auto i0 = static_cast<int>(p / shape_[1]);
    return {i0, i1, i2};
}

std::array<double, 3> ChartGrid::position(std::size_t p) const noexcept {
    const auto idx = multi_index(p);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) x[a] = coordinate(a, idx[a]);
    return x;
}

double ChartGrid::min_spacing() const noexcept {
    double h = spacing_[0];
    for (int a = 1; a < dim_; ++a) h = std::min(h, spacing_[a]);
    return h;
}

Region ChartGrid::full_region() const noexcept {
    Region r;
    r.hi = shape_;
    return r;
}

Region ChartGrid::interior() const noexcept {
    Region r = full_region();
    if (mode_ == BoundaryMode::InteriorPatch)
        for (int a = 0; a < dim_; ++a) r = r.shrink(a, margin_);
    return r;
}

ChartGrid build_grid(int dim, const std::vector<int>& shape, const std::vector<double>& spacing,
                     BoundaryMode mode, int margin, const std::vector<double>& origin) {
    if (dim != 2 && dim != 3) throw Error(ErrorKind::InvalidGrid, "dimension must be 2 or 3");
    if (static_cast<int>(shape.size()) != dim || static_cast<int>(spacing.size()) != dim)
        throw Error(ErrorKind::InvalidGrid, "shape and spacing need one entry per axis");
    if (!origin.empty() && static_cast<int>(origin.size()) != dim)
        throw Error(ErrorKind::InvalidGrid, "origin needs one entry per axis");

    ChartGrid g;
    g.dim_ = dim;
    g.mode_ = mode;
    g.margin_ = mode == BoundaryMode::InteriorPatch ? margin : 0;
    for (int a = 0; a < dim; ++a) {
        if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
            throw Error(ErrorKind::InvalidGrid, "spacing along axis " + std::to_string(a) + " must be positive");
        if (shape[a] < 2 * kStencilRadius + 1)
            throw Error(ErrorKind::InvalidGrid, "axis " + std::to_string(a) + " has fewer than 2*radius+1 points");
        g.shape_[a] = shape[a];
        g.spacing_[a] = spacing[a];
        g.origin_[a] = origin.empty() ? 0.0 : origin[a];
    }
    if (mode == BoundaryMode::InteriorPatch) {
        if (margin < 2 * kStencilRadius)
            throw Error(ErrorKind::InvalidGrid, "interior margin must be at least twice the stencil radius");
        for (int a = 0; a < dim; ++a)
            if (2 * margin >= shape[a])
                throw Error(ErrorKind::InvalidGrid, "interior margin exceeds half the extent of axis " + std::to_string(a));
    }
    return g;
}

ChartGrid resample(const ChartGrid& grid, int points) {
    std::vector<int> shape(grid.dim(), points);
    std::vector<double> spacing(grid.dim()), origin(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) {
        spacing[a] = grid.spacing()[a] * grid.shape()[a] / points;
        origin[a] = grid.origin()[a];
    }
    return build_grid(grid.dim(), shape, spacing, grid.mode(), grid.margin(), origin);
}

}  // namespace hgf
