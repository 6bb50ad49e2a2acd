#pragma once

#include <cstddef>
#include <span>

#include "hgf/field.hpp"

namespace hgf {

/// Leaves of the summation tree. Fixed so that the tree shape, and hence the
/// rounding, depends only on the input length.
inline constexpr std::size_t kSumLeaf = 256;

/// Sum over a fixed pairwise tree: sequential sums over leaves of kSumLeaf
/// values, combined by balanced halving over leaf indices. Leaves are summed
/// in parallel; the result is bitwise identical for any thread count.
double pairwise_sum(std::span<const double> xs);

/// Max |value| over all components inside region (0 for an empty region).
double field_max_abs(const Field& f, const Region& region);
/// sqrt(mean of squares) over all components inside region.
double field_rms(const Field& f, const Region& region);

namespace serial {
/// Same tree as hgf::pairwise_sum evaluated by plain recursion.
double pairwise_sum(std::span<const double> xs);
}  // namespace serial

}  // namespace hgf
