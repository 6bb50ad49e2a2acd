#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hgf {

enum class ErrorKind {
    InvalidGrid,
    RegionExhausted,
    MetricDegenerate,
    DegeneratePlane,
    NonPositiveConformalFactor,
    BlowUpDetected,
    StepUnderflow,
    InsufficientSnapshots,
    DegenerateSeries,
    InvalidState,
    ConfigError,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Typed failure raised by every module. `point()` is the flat grid index
/// where the failure was detected, or -1 when it is not point-specific.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::ptrdiff_t point = -1);

    ErrorKind kind() const noexcept { return kind_; }
    std::ptrdiff_t point() const noexcept { return point_; }

private:
    ErrorKind kind_;
    std::ptrdiff_t point_;
};

}  // namespace hgf
