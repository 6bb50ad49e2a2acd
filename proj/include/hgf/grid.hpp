#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace hgf {

/// Half-width of the 4th-order centered stencils.
inline constexpr int kStencilRadius = 2;

enum class BoundaryMode { Periodic, InteriorPatch };

/// Box of grid indices [lo, hi) per axis. Unused axes of a 2D grid span [0, 1).
struct Region {
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{0, 0, 0};

    bool empty() const noexcept;
    std::size_t size() const noexcept;
    bool contains(int i0, int i1, int i2) const noexcept;
    Region intersect(const Region& other) const noexcept;
    Region shrink(int axis, int amount) const noexcept;

    friend bool operator==(const Region&, const Region&) = default;
};

/// Uniform tensor-product coordinate chart. Always addressed with three
/// indices; a 2D grid has shape[2] == 1. Point indices are row-major with
/// axis 0 slowest.
class ChartGrid {
public:
    ChartGrid() = default;

    int dim() const noexcept { return dim_; }
    const std::array<int, 3>& shape() const noexcept { return shape_; }
    const std::array<double, 3>& spacing() const noexcept { return spacing_; }
    const std::array<double, 3>& origin() const noexcept { return origin_; }
    BoundaryMode mode() const noexcept { return mode_; }
    int margin() const noexcept { return margin_; }
    bool periodic() const noexcept { return mode_ == BoundaryMode::Periodic; }

    std::size_t size() const noexcept {
        return static_cast<std::size_t>(shape_[0]) * shape_[1] * shape_[2];
    }
    std::size_t index(int i0, int i1, int i2) const noexcept {
        return (static_cast<std::size_t>(i0) * shape_[1] + i1) * shape_[2] + i2;
    }
    std::array<int, 3> multi_index(std::size_t p) const noexcept;

    /// Coordinate of point i along axis: origin + i * spacing.
    double coordinate(int axis, int i) const noexcept { return origin_[axis] + i * spacing_[axis]; }
    std::array<double, 3> position(std::size_t p) const noexcept;

    double min_spacing() const noexcept;

    Region full_region() const noexcept;
    /// Region on which results are reported: everything for periodic charts,
    /// the margin-shrunk box for interior patches.
    Region interior() const noexcept;

    friend bool operator==(const ChartGrid&, const ChartGrid&) = default;

private:
    friend ChartGrid build_grid(int, const std::vector<int>&, const std::vector<double>&, BoundaryMode,
                                int, const std::vector<double>&);

    int dim_ = 0;
    std::array<int, 3> shape_{1, 1, 1};
    std::array<double, 3> spacing_{1.0, 1.0, 1.0};
    std::array<double, 3> origin_{0.0, 0.0, 0.0};
    BoundaryMode mode_ = BoundaryMode::Periodic;
    int margin_ = 0;
};

/// Validates and builds a chart. Throws Error(InvalidGrid) when dim is not 2
/// or 3, a spacing is not positive, an axis has fewer than 2*radius+1 points,
/// or an interior margin is below 2*radius or reaches half the extent.
ChartGrid build_grid(int dim, const std::vector<int>& shape, const std::vector<double>& spacing,
                     BoundaryMode mode, int margin = 0, const std::vector<double>& origin = {});

/// Same chart geometry (origin, extent = shape*spacing, mode, margin) resampled
/// with `points` per axis.
ChartGrid resample(const ChartGrid& grid, int points);

}  // namespace hgf
