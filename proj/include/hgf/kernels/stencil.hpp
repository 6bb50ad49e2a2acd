#pragma once

#include <span>

#include "hgf/field.hpp"

namespace hgf {

// 4th-order centered differences. Serial and parallel kernels call these
// same expressions so their results agree bit for bit.
inline double fd1(double fm2, double fm1, double fp1, double fp2, double h) noexcept {
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
}
inline double fd2(double fm2, double fm1, double f0, double fp1, double fp2, double h) noexcept {
    return (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
}

/// Region on which a derivative along `axis` of a field valid on `in` can be
/// evaluated: unchanged on periodic charts, shrunk by the stencil radius on
/// interior patches.
Region derivative_region(const ChartGrid& grid, const Region& in, int axis);

/// ∂f/∂x^axis (order 1) or ∂²f/∂(x^axis)² (order 2), componentwise.
/// Throws Error(RegionExhausted) when nothing remains evaluable.
Field partial_derivative(const Field& f, int axis, int order);

/// Derivative of every component of f at one point, written into out
/// (size f.components()). Used by fused kernels that avoid materializing
/// per-axis derivative fields. The point must lie in derivative_region.
void point_derivative(const Field& f, int i0, int i1, int i2, int axis, std::span<double> out) noexcept;

namespace serial {
/// Reference implementation of partial_derivative: one component at a time,
/// no threading, explicit wraparound arithmetic.
Field partial_derivative(const Field& f, int axis, int order);
}  // namespace serial

}  // namespace hgf
