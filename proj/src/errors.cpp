#include "hgf/errors.hpp"

namespace hgf {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidGrid: return "InvalidGrid";
        case ErrorKind::RegionExhausted: return "RegionExhausted";
        case ErrorKind::MetricDegenerate: return "MetricDegenerate";
        case ErrorKind::DegeneratePlane: return "DegeneratePlane";
        case ErrorKind::NonPositiveConformalFactor: return "NonPositiveConformalFactor";
        case ErrorKind::BlowUpDetected: return "BlowUpDetected";
        case ErrorKind::StepUnderflow: return "StepUnderflow";
        case ErrorKind::InsufficientSnapshots: return "InsufficientSnapshots";
        case ErrorKind::DegenerateSeries: return "DegenerateSeries";
        case ErrorKind::InvalidState: return "InvalidState";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what, std::ptrdiff_t point)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), point_(point) {}

}  // namespace hgf
