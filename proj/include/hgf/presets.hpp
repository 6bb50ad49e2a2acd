#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "hgf/grid.hpp"
#include "hgf/tensor.hpp"

namespace hgf {

enum class BaseKind { Flat, SphereBand, ConformalTorus, RandomSmooth };
enum class FamilyKind { None, Conformal, Quadratic };
enum class VelocityKind { Zero, Conformal, RandomSmooth };

struct VelocitySpec {
    VelocityKind kind = VelocityKind::Zero;
    double amplitude = 0.0;  // c for Conformal (h = c g0), scale for RandomSmooth
    std::uint64_t seed = 0;
};

/// Initial metric description.
///
///   Flat            g0 = δ
///   SphereBand      g0 = r² (dθ² + sin²θ dφ²) in 2D,
///                   r² (dχ² + sin²χ (dθ² + sin²θ dφ²)) in 3D
///   ConformalTorus  g0 = u δ,  u = 1 + ε cos(m·x + phase(seed))
///   RandomSmooth    g0 = δ + ε S(x), S a symmetric sum of low modes
///
/// A family multiplies the base by a factor of t:
///   Conformal  ρ(t) = -λ t² + v t + 1       (base Einstein with Ric = λ g0)
///   Quadratic  ρ(t) = -2κ t² + c1 t + c2    (base Einstein with Ric = 2κ g0)
struct MetricPreset {
    BaseKind base = BaseKind::Flat;
    double radius = 1.0;
    double epsilon = 0.05;
    std::array<int, 3> mode{1, 1, 0};
    std::uint64_t seed = 0;

    FamilyKind family = FamilyKind::None;
    double lambda = 0.0;
    double v = 0.0;
    double kappa = 0.0;
    double c1 = 0.0;
    double c2 = 1.0;

    VelocitySpec velocity;
};

struct PresetState {
    MetricField g;
    VelocityField h;
};

/// Metric and velocity at time t. Throws Error(MetricDegenerate) when the
/// family factor is at or below the SPD floor, Error(ConfigError) when a
/// family is put on a non-Einstein base or declares the wrong constant.
PresetState instantiate(const MetricPreset& preset, const ChartGrid& grid, double t = 0.0);

/// Family factor ρ(t) and its derivative (1 and 0 without a family).
double family_factor(const MetricPreset& preset, double t) noexcept;
double family_rate(const MetricPreset& preset, double t) noexcept;

/// Einstein constant of the base (0 for Flat, (n-1)/r² for SphereBand).
/// Throws Error(ConfigError) for bases that are not Einstein.
double einstein_constant(const MetricPreset& preset, int dim);

/// max |Ric(g0) - λ g0| over the reported interior, computed numerically.
double einstein_residual(const MetricPreset& preset, const ChartGrid& grid);

/// [0, 2π)^n periodic chart with `points` per axis.
ChartGrid torus_grid(int dim, int points);

/// Interior-patch chart on the sphere: θ (and χ in 3D) over [0.3π, 0.7π),
/// φ over [0, 2π), `points` per axis.
ChartGrid sphere_band_grid(int dim, int points, int margin = 2 * kStencilRadius);

std::string_view to_string(BaseKind k) noexcept;
std::string_view to_string(FamilyKind k) noexcept;
std::string_view to_string(VelocityKind k) noexcept;
BaseKind parse_base_kind(std::string_view s);
FamilyKind parse_family_kind(std::string_view s);
VelocityKind parse_velocity_kind(std::string_view s);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw. Used
/// instead of std::uniform_real_distribution so values do not depend on the
/// standard library implementation.
double unit_draw(std::uint64_t bits) noexcept;

}  // namespace hgf
