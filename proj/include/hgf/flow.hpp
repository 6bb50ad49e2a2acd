#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hgf/tensor.hpp"

namespace hgf {

/// Phase point of the second-order flow. For Surface2D, g and h hold the
/// rank-0 conformal factor u and its rate u_t instead of rank-2 tensors.
struct FlowState {
    double t = 0.0;
    MetricField g;
    VelocityField h;
    long step_count = 0;
};

enum class FlowKind { Hgf, Einstein, Dissipative, Surface2D };

struct FlowVariant {
    FlowKind kind = FlowKind::Hgf;
    double d = 1.0;  // dissipation constant, Dissipative only
};

struct StepControl {
    double cfl = 0.25;
    double dt_max = std::numeric_limits<double>::infinity();
    double dt_min = 1e-10;
    double t_end = 1.0;
    int snapshot_stride = 1;
    /// When positive, every step uses this dt (clipped at t_end) instead of
    /// the CFL estimate. Used by convergence ladders.
    double fixed_dt = 0.0;
    bool record_curvature = true;
};

/// ∂²g/∂t² = -2 Ric(g).
Field hgf_rhs(const FlowState& s);

/// -2 Ric - ½ g^pq h_ij h_pq + g^pq h_ip h_jq.
Field einstein_hgf_rhs(const FlowState& s);

/// -2 Ric + 2 g^pq h_ip h_jq - (d + 2 g^pq h_pq) h_ij
///   + 1/(n-1) ((g^pq h_pq)² + (∂t g^pq) h_pq) g_ij,  ∂t g^pq = -g^pa g^qb h_ab.
Field dissipative_hgf_rhs(const FlowState& s, double d);

/// Δ log u with the flat coordinate Laplacian. Throws
/// Error(NonPositiveConformalFactor) at the first point with u <= 0.
Field surface_rhs(const Field& u);

Field variant_rhs(const FlowState& s, const FlowVariant& v);

/// cfl · min spacing · sqrt(min eigenvalue of g), i.e. min spacing over the
/// largest eigenvalue of g^ij, capped by dt_max (or fixed_dt when set).
double cfl_dt(const FlowState& s, const StepControl& c, const FlowVariant& v = {});

/// One classical RK4 step of (g' = h, h' = rhs). Stages are re-symmetrized.
/// Throws Error(BlowUpDetected) when a stage or the result loses SPD or
/// finiteness, Error(StepUnderflow) when dt does not advance t.
FlowState step(const FlowState& s, const FlowVariant& v, double dt);

struct Snapshot {
    double t = 0.0;
    long step = 0;
    MetricField g;
    VelocityField h;
    std::optional<CurvatureBundle> curvature;
};

enum class TerminationReason { Completed, BlowUpDetected, StepUnderflow };
std::string_view to_string(TerminationReason r) noexcept;

struct Trajectory {
    std::vector<Snapshot> snapshots;
    TerminationReason reason = TerminationReason::Completed;
    FlowState final_state;
    std::string message;
    std::ptrdiff_t point = -1;  // grid point of the failure, if any
};

/// Integrates from `initial` to c.t_end. Snapshots at step 0, every
/// snapshot_stride steps, and at termination. Periodic charts only.
Trajectory simulate(const FlowState& initial, const FlowVariant& v, const StepControl& c);

/// g = u δ from a rank-0 field, and the reverse (reads g_00).
MetricField conformal_metric(const Field& u);
Field conformal_factor(const Field& g);

}  // namespace hgf
