#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hgf/flow.hpp"
#include "hgf/grid.hpp"
#include "hgf/presets.hpp"

namespace hgf {

enum class Status { Pass, Flag, Fail };
std::string_view to_string(Status s) noexcept;

/// Absolute roundoff level for unit-scale fields.
inline constexpr double kRoundoffTol = 1e-10;
/// Residuals below this are treated as converged to roundoff.
inline constexpr double kSaturationFloor = 1e-13;
/// PASS needs an observed order of at least this fraction of the theory.
inline constexpr double kOrderFraction = 0.85;

struct ResidualEntry {
    double dx = 0.0;
    double dt = 0.0;
    double max_norm = 0.0;
    double rms = 0.0;
};

/// Residual max/rms norms per resolution, coarsest first.
struct ResidualSeries {
    std::string id;
    std::vector<ResidualEntry> entries;
};

/// log2(coarse/fine) of the max norms for two entries; least-squares slope
/// of log(max) against log(dx) for more. Throws Error(DegenerateSeries)
/// when the finest residual is below kSaturationFloor, Error(InvalidState)
/// with fewer than two entries.
double convergence_order(const ResidualSeries& s);

struct OrderEstimate {
    bool saturated = false;
    bool available = false;
    double order = 0.0;
};
OrderEstimate estimate_order(const ResidualSeries& s);

struct ReportEntry {
    std::string id;
    Status status = Status::Pass;
    ResidualSeries series;
    OrderEstimate order;
    double order_threshold = 0.0;  // 0 for roundoff-level checks
    double tolerance = 0.0;
    std::string notes;
};

struct VerificationReport {
    std::vector<ReportEntry> entries;

    bool any_fail() const noexcept;
    const ReportEntry* find(std::string_view id) const noexcept;
    void append(const VerificationReport& other);
    /// Orders entries by id.
    void sort();
};

/// How a check reacts to a mismatch: Oracle checks (flat data, closed-form
/// solutions) FAIL; Measured checks FLAG.
enum class CheckMode { Measured, Oracle };

struct StaticOptions {
    CheckMode mode = CheckMode::Measured;
    double tolerance = 1e-3;  // finest residual bound for convergence checks
    bool inject_q_sign_error = false;
};

/// Static curvature identities on one metric over a resolution ladder:
///   bianchi1.riemann, bianchi1.q  first Bianchi identity (roundoff)
///   bianchi2.div_ric              g^ij D_i Ric_jk = ½ ∂_k Scal
///   bianchi2.contracted           D²_{ik}Ric_jl - D²_{il}Ric_jk = g^ab (D²R)_{i a b j k l}
///   d2ric.laplacian               D²_{ik}Ric_jl - D²_{il}Ric_jk - D²_{jk}Ric_il + D²_{jl}Ric_ik
///                                   = ΔR + Q - Ric(X,R_ZW Y) + Ric(Y,R_ZW X)
///   ricci_identity.plus           (D²_ij - D²_ji)Ric_kl = +Ric(R(i,j)k,l) + Ric(R(i,j)l,k)
///   ricci_identity.minus          same with both terms negated
VerificationReport check_static_identities(const MetricPreset& preset, const std::vector<ChartGrid>& ladder,
                                           const StaticOptions& o = {});

struct DynamicOptions {
    CheckMode mode = CheckMode::Measured;
    double t_check = 0.0;     // snapshot time at which both sides are compared
    double tolerance = 1e-2;  // finest residual bound for convergence checks
    bool inject_q_sign_error = false;
};

/// Dynamic checks on HGF trajectories, one per ladder rung, each holding at
/// least two consecutive snapshots on both sides of t_check. The left side
/// uses centered time differences of stored snapshots; the right side is
/// assembled spatially at the middle snapshot.
///
/// Local:   evolution.riemann, evolution.ricci, evolution.scalar
/// Global:  global.riemann.literal, global.riemann.corrected,
///          global.reaction.literal, global.reaction.corrected,
///          global.ricci_frame, global.scalar_frame
/// Connection: connection.velocity, connection.acceleration
VerificationReport check_local_evolution(const std::vector<Trajectory>& ladder, const DynamicOptions& o);
VerificationReport check_global_evolution(const std::vector<Trajectory>& ladder, const DynamicOptions& o);
VerificationReport check_connection_acceleration(const std::vector<Trajectory>& ladder, const DynamicOptions& o);
/// All three at once (shares the spatial assembly).
VerificationReport check_dynamic(const std::vector<Trajectory>& ladder, const DynamicOptions& o);

/// HGF runs for a dynamic ladder: fixed dt = t_check / m with m doubling per
/// rung, m chosen on the coarsest rung so that dt ≈ dt_over_dx · dx.
/// Integrates to t_check + 2 dt with every step kept.
std::vector<Trajectory> run_ladder(const MetricPreset& preset, const std::vector<ChartGrid>& ladder,
                                   double t_check, double dt_over_dx = 0.25, const FlowVariant& v = {});

/// Conformal family ρ(t) g0 (or the quadratic family) on an Einstein base:
/// residual of ρ'' g0 + 2 Ric(ρ g0) at each sample time over the ladder, plus
/// the sub-check Ric(ρ g0) = Ric(g0). Entries:
///   conformal.hgf@t=<t>, conformal.ricci_invariance@t=<t>
/// Throws Error(MetricDegenerate) when ρ(t) reaches the SPD floor.
VerificationReport conformal_residual(const MetricPreset& family, const std::vector<ChartGrid>& ladder,
                                      const std::vector<double>& t_samples, double tolerance = 1e-3);

/// Closed-form global checks on a conformal family: the left side
/// ∂²R = ρ'' K (g0_ik g0_jl - g0_il g0_jk) is exact, the right side is the
/// spatial assembly at (ρ g0, ρ' g0). Entries:
///   closed_form.riemann.literal@t, closed_form.riemann.corrected@t,
///   closed_form.reaction.literal@t, closed_form.reaction.corrected@t,
///   closed_form.connection_acceleration@t
VerificationReport check_global_closed_form(const MetricPreset& family, const std::vector<ChartGrid>& ladder,
                                            const std::vector<double>& t_samples, double tolerance = 1e-3);

/// Scheme checks on the integrator and the 2D reduction.
///
/// reduction.surface_vs_tensor  g = u δ under the tensor flow against u under
///                              u_tt = Δ log u, same (dt, dx), relative max
///                              difference after `steps` steps (≤ 1e-8).
/// reduction.linear_wave        u = 1 + ε cos x, u_t = 0 against
///                              1 + ε cos x cos t for ε in eps; the error
///                              should scale like ε² (order in ε ≥ 1.7).
VerificationReport check_surface_reduction(const MetricPreset& conformal, const ChartGrid& grid, int steps,
                                           double dt_over_dx, const std::vector<double>& eps = {1e-3, 2e-3, 4e-3});

/// integrator.time_reversal   `steps` forward, flip h, `steps` back, flip h;
///                            relative max difference to the start (≤ 1e-8).
/// integrator.temporal_order  runs to t_end with m, 2m steps against a 4m
///                            reference; order ≥ 3.7.
VerificationReport check_integrator(const MetricPreset& preset, const ChartGrid& grid, int steps, double dt_over_dx,
                                    double t_end, int m);

/// Builds the rungs of a ladder from a base chart.
std::vector<ChartGrid> make_ladder(const ChartGrid& base, const std::vector<int>& points);

}  // namespace hgf
