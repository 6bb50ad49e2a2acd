#include "hgf/kernels/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hgf/kernels/parallel.hpp"

namespace hgf {

namespace {

double leaf_sum(std::span<const double> xs, std::size_t leaf) {
    const std::size_t b = leaf * kSumLeaf;
    const std::size_t e = std::min(xs.size(), b + kSumLeaf);
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += xs[i];
    return s;
}

double combine(std::span<const double> leaves, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return leaves[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return combine(leaves, lo, mid) + combine(leaves, mid, hi);
}

std::size_t leaf_count(std::size_t n) { return (n + kSumLeaf - 1) / kSumLeaf; }

}  // namespace

double pairwise_sum(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    const std::size_t nl = leaf_count(xs.size());
    std::vector<double> leaves(nl);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t l = 0; l < static_cast<std::ptrdiff_t>(nl); ++l)
        leaves[l] = leaf_sum(xs, static_cast<std::size_t>(l));
    return combine(leaves, 0, nl);
}

namespace serial {

namespace {
double tree(std::span<const double> xs, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return leaf_sum(xs, lo);
    const std::size_t mid = lo + (hi - lo) / 2;
    return tree(xs, lo, mid) + tree(xs, mid, hi);
}
}  // namespace

double pairwise_sum(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return tree(xs, 0, leaf_count(xs.size()));
}

}  // namespace serial

double field_max_abs(const Field& f, const Region& region) {
    double m = 0.0;
    const Region r = region.intersect(f.grid().full_region());
    for_each_point(f.grid(), r, [&](std::size_t p) {
        for (double v : f.at(p)) m = std::max(m, std::abs(v));
    }, /*parallel=*/false);
    return m;
}

double field_rms(const Field& f, const Region& region) {
    const Region r = region.intersect(f.grid().full_region());
    if (r.empty()) return 0.0;
    const std::size_t nc = static_cast<std::size_t>(f.components());
    std::vector<double> sq;
    sq.reserve(r.size() * nc);
    for_each_point(f.grid(), r, [&](std::size_t p) {
        for (double v : f.at(p)) sq.push_back(v * v);
    }, /*parallel=*/false);
    return std::sqrt(pairwise_sum(sq) / static_cast<double>(sq.size()));
}

}  // namespace hgf
