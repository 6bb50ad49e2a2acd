#pragma once

#include <span>

namespace hgf {

/// Row-major flattening of tensor indices in dimension n.
struct Idx {
    int n;
    constexpr int operator()(int i, int j) const noexcept { return i * n + j; }
    constexpr int operator()(int i, int j, int k) const noexcept { return (i * n + j) * n + k; }
    constexpr int operator()(int i, int j, int k, int l) const noexcept { return ((i * n + j) * n + k) * n + l; }
    constexpr int operator()(int i, int j, int k, int l, int m) const noexcept {
        return (((i * n + j) * n + k) * n + l) * n + m;
    }
};

/// Smallest eigenvalue of a symmetric n×n matrix (n = 2 or 3), row-major.
double min_eigenvalue(std::span<const double> a, int n) noexcept;
/// Largest eigenvalue of a symmetric n×n matrix (n = 2 or 3), row-major.
double max_eigenvalue(std::span<const double> a, int n) noexcept;
/// Inverse of an n×n matrix (n = 2 or 3), row-major, symmetrized on output.
void invert_symmetric(std::span<const double> a, int n, std::span<double> out) noexcept;

}  // namespace hgf
