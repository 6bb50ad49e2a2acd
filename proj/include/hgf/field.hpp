#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hgf/grid.hpp"

namespace hgf {

/// Number of components of a rank-r tensor in n dimensions (n^r).
constexpr int tensor_components(int dim, int rank) noexcept {
    int c = 1;
    for (int s = 0; s < rank; ++s) c *= dim;
    return c;
}

/// Multi-component grid field. Storage is point-major: the dim^rank
/// components of one point are contiguous, flattened row-major over the
/// tensor slots in the order the indices are written (so Γ^k_ij is (k,i,j)).
/// Bit s of `upper_mask` marks slot s as contravariant.
///
/// Values outside `valid()` are zero and carry no meaning; every operation
/// intersects the valid regions of its inputs.
class Field {
public:
    Field() = default;
    Field(const ChartGrid& grid, int rank, std::uint32_t upper_mask = 0);

    const ChartGrid& grid() const noexcept { return grid_; }
    int dim() const noexcept { return grid_.dim(); }
    int rank() const noexcept { return rank_; }
    int components() const noexcept { return ncomp_; }
    std::uint32_t upper_mask() const noexcept { return upper_mask_; }
    int upper_count() const noexcept;

    const Region& valid() const noexcept { return valid_; }
    void set_valid(const Region& r) noexcept { valid_ = r; }

    /// Set when the buffer may hold non-finite values on purpose.
    bool degenerate() const noexcept { return degenerate_; }
    void set_degenerate(bool d) noexcept { degenerate_ = d; }

    std::span<double> at(std::size_t point) noexcept {
        return {data_.data() + point * ncomp_, static_cast<std::size_t>(ncomp_)};
    }
    std::span<const double> at(std::size_t point) const noexcept {
        return {data_.data() + point * ncomp_, static_cast<std::size_t>(ncomp_)};
    }
    double& operator()(std::size_t point, int comp) noexcept { return data_[point * ncomp_ + comp]; }
    double operator()(std::size_t point, int comp) const noexcept { return data_[point * ncomp_ + comp]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    /// True when every value inside the valid region is finite.
    bool all_finite() const noexcept;

    /// Same grid, rank, mask and region; values zeroed.
    Field zeros_like() const;

private:
    ChartGrid grid_;
    int rank_ = 0;
    int ncomp_ = 1;
    std::uint32_t upper_mask_ = 0;
    Region valid_;
    bool degenerate_ = false;
    std::vector<double> data_;
};

/// Throws Error(RegionExhausted) when the region is empty.
void require_nonempty(const Region& r, const char* what);

/// a*x + b*y on the intersection of both valid regions.
Field axpby(double a, const Field& x, double b, const Field& y);
Field scaled(double a, const Field& x);

/// Replaces each rank-2 point block by (T + T^T)/2.
void symmetrize_rank2(Field& t);

}  // namespace hgf
