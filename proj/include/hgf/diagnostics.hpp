#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hgf/flow.hpp"
#include "hgf/tensor.hpp"

namespace hgf {

/// max over the region of |Ric|_g = sqrt(Ric_ij Ric_kl g^ik g^jl).
double ricci_sup_norm(const CurvatureBundle& c, const Region& region);
double ricci_sup_norm(const Snapshot& s);

enum class BlowUpKind { Bounded, Growing, Degenerate };

struct BlowUpOptions {
    double window_fraction = 0.25;
    std::size_t min_window = 8;
    double min_r2 = 0.95;
    double min_growth = 2.0;  // last/first sup value across the window
    std::optional<double> t_blowup;  // known singular time; estimated otherwise
};

struct BlowUpStatus {
    std::vector<std::pair<double, double>> series;  // (t, sup|Ric|)
    BlowUpKind kind = BlowUpKind::Bounded;
    double exponent = 0.0;  // fitted p in sup|Ric| ~ C (T - t)^p
    double t_blowup = 0.0;
    double r2 = 0.0;
    double degenerate_t = 0.0;
    std::ptrdiff_t degenerate_point = -1;
};

/// Fits log sup|Ric| against log(T - t) over the trailing window. When the
/// series is shorter than min_window the whole series is used. Needs at
/// least 3 samples (fewer gives Bounded).
BlowUpStatus blowup_monitor(const std::vector<std::pair<double, double>>& series, const BlowUpOptions& o = {});
BlowUpStatus blowup_monitor(const Trajectory& traj, const BlowUpOptions& o = {});

struct PlaneSampling {
    int random_planes = 4;  // per point, on top of the coordinate planes
    std::uint64_t seed = 0;
};

struct Pinching {
    double k_max = 0.0;
    double k_min = 0.0;
    std::optional<double> ratio;  // K_min / K_max when K_max > tolerance
};

inline constexpr double kPinchingTolerance = 1e-10;

/// Sectional curvature extrema over the coordinate planes and the sampled
/// random planes at every point of the region.
Pinching pinching_ratio(const CurvatureBundle& c, const MetricField& g, const Region& region,
                        const PlaneSampling& sampling = {});

}  // namespace hgf
