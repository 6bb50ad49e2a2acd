#include "hgf/presets.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hgf/errors.hpp"
#include "hgf/index.hpp"
#include "hgf/kernels/parallel.hpp"
#include "hgf/kernels/reduce.hpp"

namespace hgf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kModesPerComponent = 3;

struct Mode {
    std::array<int, 3> k{0, 0, 0};
    double amplitude = 0.0;
    double phase = 0.0;
};

// Low-frequency modes for each component i <= j, flattened as (i, j, mode).
std::vector<Mode> random_modes(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Mode> modes;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int m = 0; m < kModesPerComponent; ++m) {
                Mode md;
                bool zero = true;
                for (int a = 0; a < n; ++a) {
                    md.k[a] = static_cast<int>(rng() % 5) - 2;
                    zero = zero && md.k[a] == 0;
                }
                if (zero) md.k[0] = 1;
                md.amplitude = (2.0 * unit_draw(rng()) - 1.0) / kModesPerComponent;
                md.phase = 2.0 * kPi * unit_draw(rng());
                modes.push_back(md);
            }
    return modes;
}

void fill_random_symmetric(Field& f, double scale, std::uint64_t seed, bool add_identity) {
    const int n = f.dim();
    const Idx ix{n};
    const auto modes = random_modes(n, seed);
    const ChartGrid& grid = f.grid();
    for_each_point(grid, grid.full_region(), [&](std::size_t p) {
        const auto x = grid.position(p);
        auto out = f.at(p);
        int m0 = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int m = 0; m < kModesPerComponent; ++m) {
                    const Mode& md = modes[m0 + m];
                    double arg = md.phase;
                    for (int a = 0; a < n; ++a) arg += md.k[a] * x[a];
                    s += md.amplitude * std::cos(arg);
                }
                m0 += kModesPerComponent;
                const double v = scale * s + (add_identity && i == j ? 1.0 : 0.0);
                out[ix(i, j)] = v;
                out[ix(j, i)] = v;
            }
    });
}

double conformal_phase(std::uint64_t seed) {
    if (seed == 0) return 0.0;
    std::mt19937_64 rng(seed);
    return 2.0 * kPi * unit_draw(rng());
}

Field base_metric(const MetricPreset& p, const ChartGrid& grid) {
    const int n = grid.dim();
    const Idx ix{n};
    Field g(grid, 2);
    g.set_valid(grid.full_region());
    switch (p.base) {
        case BaseKind::Flat:
            for_each_point(grid, grid.full_region(), [&](std::size_t q) {
                for (int i = 0; i < n; ++i) g(q, ix(i, i)) = 1.0;
            });
            break;
        case BaseKind::SphereBand: {
            if (!(p.radius > 0.0)) throw Error(ErrorKind::ConfigError, "sphere radius must be positive");
            const double r2 = p.radius * p.radius;
            for_each_point(grid, grid.full_region(), [&](std::size_t q) {
                const auto x = grid.position(q);
                if (n == 2) {
                    const double s = std::sin(x[0]);
                    g(q, ix(0, 0)) = r2;
                    g(q, ix(1, 1)) = r2 * s * s;
                } else {
                    const double s1 = std::sin(x[0]);
                    const double s2 = std::sin(x[1]);
                    g(q, ix(0, 0)) = r2;
                    g(q, ix(1, 1)) = r2 * s1 * s1;
                    g(q, ix(2, 2)) = r2 * s1 * s1 * s2 * s2;
                }
            });
            break;
        }
        case BaseKind::ConformalTorus: {
            const double phase = conformal_phase(p.seed);
            for_each_point(grid, grid.full_region(), [&](std::size_t q) {
                const auto x = grid.position(q);
                double arg = phase;
                for (int a = 0; a < n; ++a) arg += p.mode[a] * x[a];
                const double u = 1.0 + p.epsilon * std::cos(arg);
                for (int i = 0; i < n; ++i) g(q, ix(i, i)) = u;
            });
            break;
        }
        case BaseKind::RandomSmooth:
            fill_random_symmetric(g, p.epsilon, p.seed, true);
            break;
    }
    return g;
}

void check_family(const MetricPreset& p, int dim) {
    if (p.family == FamilyKind::None) return;
    const double lam = einstein_constant(p, dim);
    const double declared = p.family == FamilyKind::Conformal ? p.lambda : 2.0 * p.kappa;
    if (std::abs(declared - lam) > 1e-12 * (1.0 + std::abs(lam)))
        throw Error(ErrorKind::ConfigError, "family constant does not match the Einstein constant of the base");
    if (p.velocity.kind != VelocityKind::Zero)
        throw Error(ErrorKind::ConfigError, "a metric family fixes its own velocity");
}

}  // namespace

double unit_draw(std::uint64_t bits) noexcept { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

double family_factor(const MetricPreset& p, double t) noexcept {
    switch (p.family) {
        case FamilyKind::Conformal: return -p.lambda * t * t + p.v * t + 1.0;
        case FamilyKind::Quadratic: return -2.0 * p.kappa * t * t + p.c1 * t + p.c2;
        case FamilyKind::None: break;
    }
    return 1.0;
}

double family_rate(const MetricPreset& p, double t) noexcept {
    switch (p.family) {
        case FamilyKind::Conformal: return -2.0 * p.lambda * t + p.v;
        case FamilyKind::Quadratic: return -4.0 * p.kappa * t + p.c1;
        case FamilyKind::None: break;
    }
    return 0.0;
}

double einstein_constant(const MetricPreset& p, int dim) {
    switch (p.base) {
        case BaseKind::Flat: return 0.0;
        case BaseKind::SphereBand: return (dim - 1) / (p.radius * p.radius);
        default: break;
    }
    throw Error(ErrorKind::ConfigError, std::string("base '") + std::string(to_string(p.base)) + "' is not Einstein");
}

PresetState instantiate(const MetricPreset& p, const ChartGrid& grid, double t) {
    check_family(p, grid.dim());
    Field g0 = base_metric(p, grid);
    const double rho = family_factor(p, t);
    if (!(rho > kDefaultSpdFloor))
        throw Error(ErrorKind::MetricDegenerate, "family factor is at or below the SPD floor", 0);

    PresetState s{MetricField{scaled(rho, g0)}, VelocityField{g0.zeros_like()}};
    if (p.family != FamilyKind::None) {
        s.h.h = scaled(family_rate(p, t), g0);
        return s;
    }
    switch (p.velocity.kind) {
        case VelocityKind::Zero: break;
        case VelocityKind::Conformal: s.h.h = scaled(p.velocity.amplitude, g0); break;
        case VelocityKind::RandomSmooth:
            fill_random_symmetric(s.h.h, p.velocity.amplitude, p.velocity.seed ^ 0x9e3779b97f4a7c15ULL, false);
            break;
    }
    return s;
}

double einstein_residual(const MetricPreset& p, const ChartGrid& grid) {
    MetricPreset base = p;
    base.family = FamilyKind::None;
    base.velocity = {};
    const double lam = einstein_constant(base, grid.dim());
    const PresetState s = instantiate(base, grid, 0.0);
    const CurvatureBundle c = curvature(s.g);
    const Field diff = axpby(1.0, c.ricci, -lam, s.g.g);
    return field_max_abs(diff, diff.valid().intersect(grid.interior()));
}

ChartGrid torus_grid(int dim, int points) {
    const double h = 2.0 * kPi / points;
    return build_grid(dim, std::vector<int>(dim, points), std::vector<double>(dim, h), BoundaryMode::Periodic);
}

ChartGrid sphere_band_grid(int dim, int points, int margin) {
    std::vector<double> spacing(dim, 0.4 * kPi / points);
    std::vector<double> origin(dim, 0.3 * kPi);
    spacing[dim - 1] = 2.0 * kPi / points;
    origin[dim - 1] = 0.0;
    return build_grid(dim, std::vector<int>(dim, points), spacing, BoundaryMode::InteriorPatch, margin, origin);
}

std::string_view to_string(BaseKind k) noexcept {
    switch (k) {
        case BaseKind::Flat: return "flat";
        case BaseKind::SphereBand: return "sphere_band";
        case BaseKind::ConformalTorus: return "conformal_torus";
        case BaseKind::RandomSmooth: return "random_smooth";
    }
    return "?";
}

std::string_view to_string(FamilyKind k) noexcept {
    switch (k) {
        case FamilyKind::None: return "none";
        case FamilyKind::Conformal: return "conformal";
        case FamilyKind::Quadratic: return "quadratic";
    }
    return "?";
}

std::string_view to_string(VelocityKind k) noexcept {
    switch (k) {
        case VelocityKind::Zero: return "zero";
        case VelocityKind::Conformal: return "conformal";
        case VelocityKind::RandomSmooth: return "random_smooth";
    }
    return "?";
}

BaseKind parse_base_kind(std::string_view s) {
    for (auto k : {BaseKind::Flat, BaseKind::SphereBand, BaseKind::ConformalTorus, BaseKind::RandomSmooth})
        if (to_string(k) == s) return k;
    throw Error(ErrorKind::ConfigError, "unknown preset '" + std::string(s) + "'");
}

FamilyKind parse_family_kind(std::string_view s) {
    for (auto k : {FamilyKind::None, FamilyKind::Conformal, FamilyKind::Quadratic})
        if (to_string(k) == s) return k;
    throw Error(ErrorKind::ConfigError, "unknown family '" + std::string(s) + "'");
}

VelocityKind parse_velocity_kind(std::string_view s) {
    for (auto k : {VelocityKind::Zero, VelocityKind::Conformal, VelocityKind::RandomSmooth})
        if (to_string(k) == s) return k;
    throw Error(ErrorKind::ConfigError, "unknown velocity '" + std::string(s) + "'");
}

}  // namespace hgf
