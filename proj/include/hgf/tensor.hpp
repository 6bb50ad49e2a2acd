#pragma once

#include <cstddef>
#include <span>

#include "hgf/field.hpp"

namespace hgf {

inline constexpr double kDefaultSpdFloor = 1e-10;

/// Symmetric covariant metric g_ij.
struct MetricField {
    Field g;
    double spd_floor = kDefaultSpdFloor;
};

/// Metric velocity h_ij = ∂g_ij/∂t.
struct VelocityField {
    Field h;
};

/// Christoffel symbols Γ^k_ij stored (k, i, j).
struct ConnectionField {
    Field gamma;
};

/// Curvature of one metric snapshot. Sign convention:
///   R(X,Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z,  R(X,Y,Z,W) = -g(R(X,Y)Z, W),
/// so that Ric_jl = g^ik R_ijkl, Scal = g^jl Ric_jl and the unit sphere has
/// R(u,v,u,v) > 0 and Scal = n(n-1).
struct CurvatureBundle {
    Field ginv;
    Field riemann;
    Field ricci;
    Field scalar;
};

/// B^k_ij = ∂Γ^k_ij/∂t, stored (k, i, j).
struct ConnectionVelocityField {
    Field b;
};

/// A^k_ij = ∂²Γ^k_ij/∂t², stored (k, i, j).
struct ConnectionAccelField {
    Field a;
};

/// Quadratic curvature terms: q = r2 + rsharp.
struct QTensorField {
    Field r2;
    Field rsharp;
    Field q;
};

/// Pointwise g^ij. Throws Error(MetricDegenerate) at the first point whose
/// smallest eigenvalue is <= spd_floor (or whose entries are not finite).
Field inverse_metric(const MetricField& g);

/// Smallest eigenvalue of g over its valid region.
double min_metric_eigenvalue(const MetricField& g);

ConnectionField christoffel(const MetricField& g, const Field& ginv);
ConnectionField christoffel(const MetricField& g);

/// Riemann part of the bundle (riemann + ginv). Assembled from the metric
/// Hessian and Γ·Γ products on canonical index pairs and filled by symmetry,
/// so R_ijkl = -R_jikl = -R_ijlk = R_klij hold exactly.
CurvatureBundle riemann(const MetricField& g, const ConnectionField& gamma);
CurvatureBundle riemann(const MetricField& g, const ConnectionField& gamma, const Field& ginv);

/// Fills ricci (symmetrized g^ik R_ijkl) and scalar.
CurvatureBundle ricci_and_scalar(CurvatureBundle bundle);

/// inverse_metric -> christoffel -> riemann -> ricci_and_scalar.
CurvatureBundle curvature(const MetricField& g);

/// (D_a T)_{...}: prepends a covariant derivative slot. Handles mixed
/// variance through T.upper_mask().
Field covariant_derivative(const Field& t, const ConnectionField& gamma);

/// (D²T)_{a b ...} = D_a (DT)_{b ...} = (D²_{a,b} T)(...).
Field second_covariant_derivative(const Field& t, const ConnectionField& gamma);

/// g^{xy} (D dt)_{...} contracted over two lower slots of the rank+1 tensor
/// D(dt), where dt is itself a covariant derivative. The rank+1 tensor is
/// built one point at a time and never stored. slot_a < slot_b.
Field contracted_derivative(const Field& dt, const ConnectionField& gamma, const Field& ginv, int slot_a,
                            int slot_b);

/// ΔT = g^ab D²_{a,b} T.
Field rough_laplacian(const Field& t, const Field& ginv, const ConnectionField& gamma);

/// B^k_ij = ½ g^kl (D_i h_jl + D_j h_il - D_l h_ij), the first variation of
/// the Levi-Civita connection along velocity h.
ConnectionVelocityField connection_velocity(const MetricField& g, const VelocityField& h, const Field& ginv,
                                            const ConnectionField& gamma);
ConnectionVelocityField connection_velocity(const MetricField& g, const VelocityField& h);

/// A^k_ij = g^kl [ -D_i Ric_jl - D_j Ric_il + D_l Ric_ij - 2 h_lm B^m_ij ].
/// Uses ∂²g/∂t² = -2 Ric, so only meaningful when (g, h) is a phase point of
/// the plain hyperbolic flow.
ConnectionAccelField connection_acceleration(const MetricField& g, const VelocityField& h,
                                             const CurvatureBundle& bundle, const ConnectionField& gamma,
                                             const ConnectionVelocityField& b);
ConnectionAccelField connection_acceleration(const MetricField& g, const VelocityField& h,
                                             const CurvatureBundle& bundle);

/// B_ijkl = g^pr g^qs R_piqj R_rksl.
Field quad_contraction_B(const CurvatureBundle& bundle);

/// R²_ijkl = g^pa g^qb R_ijpq R_abkl,
/// R#_ijkl = 2 g^pa g^qb (R_ipkq R_jalb - R_iplq R_jakb).
QTensorField q_tensor(const CurvatureBundle& bundle);

/// K(u,v) = R(u,v,u,v) / (|u|²|v|² - g(u,v)²) at one grid point.
/// Throws Error(DegeneratePlane) when the denominator is below
/// 1e-12 |u|²|v|².
double sectional_curvature(const CurvatureBundle& bundle, const MetricField& g, std::size_t point,
                           std::span<const double> u, std::span<const double> v);

/// Symmetric rank-2 covariant field lowered/raised helpers used by the flows
/// and the verifier.
Field trace(const Field& t2, const Field& ginv);

}  // namespace hgf
