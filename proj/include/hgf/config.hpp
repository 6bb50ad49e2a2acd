#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hgf/flow.hpp"
#include "hgf/presets.hpp"
#include "hgf/verify.hpp"

namespace hgf {

enum class Command { Simulate, Verify, Oracle, Diagnose };
std::string_view to_string(Command c) noexcept;

enum class ChartKind { Torus, SphereBand };

/// Verify check groups.
enum class CheckSet : unsigned {
    Static = 1u << 0,
    Dynamic = 1u << 1,
    ClosedForm = 1u << 2,
    Reduction = 1u << 3,
    Integrator = 1u << 4,
};

struct RunConfig {
    Command command = Command::Simulate;

    ChartKind chart = ChartKind::Torus;
    int dim = 2;
    int points = 32;
    int margin = 2 * kStencilRadius;

    MetricPreset preset;
    FlowVariant variant;
    StepControl step;

    std::string out_dir = "out";
    bool write_snapshots = true;
    std::optional<std::uint64_t> seed;

    std::vector<int> ladder{32, 64};
    unsigned checks = static_cast<unsigned>(CheckSet::Static);
    CheckMode mode = CheckMode::Measured;
    double t_check = 0.25;
    double dt_over_dx = 0.25;
    double static_tolerance = 1e-3;
    double dynamic_tolerance = 1e-2;
    bool inject_q_sign_error = false;
    int scheme_steps = 100;
    int integrator_m = 8;
    double integrator_t_end = 0.5;

    std::vector<double> t_samples{0.0};
    double oracle_tolerance = 1e-3;

    bool sample_family = false;  // diagnose the exact family instead of simulating
    int family_samples = 100;
    int random_planes = 4;
    std::optional<double> t_blowup;
};

/// Parses the flat `key = value` format. Blank lines and lines starting with
/// '#' are skipped. Throws Error(ConfigError) on unknown or repeated keys and
/// malformed values.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text of every key, in schema order; parse_config(to_text(c))
/// reproduces c.
std::string to_text(const RunConfig& c);

/// Applies a master seed: preset, velocity and plane sampling seeds derive
/// from it.
void apply_seed(RunConfig& c, std::uint64_t seed);

/// The chart named by the grid keys, at `points` per axis.
ChartGrid make_chart(const RunConfig& c, int points);

}  // namespace hgf
