#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hgf/flow.hpp"
#include "hgf/verify.hpp"

namespace hgf::io {

/// Format tag at the start of every snapshot file.
inline constexpr char kSnapshotTag[8] = {'H', 'G', 'F', 'S', 'N', 'P', '0', '1'};

/// Snapshot file layout, all little-endian:
///   char[8]  tag "HGFSNP01"
///   u32      dim, shape[3], boundary mode, margin
///   f64      spacing[3], origin[3], t
///   i64      step
///   u32      field count
///   per field: u32 rank, u32 upper mask, u32 name length, name bytes,
///              f64 payload (points × components, point-major)
/// Fields are written in the order g, h, then ricci and scalar when the
/// snapshot carries curvature.
void write_snapshot(const std::filesystem::path& path, const Snapshot& s);

struct SnapshotFile {
    ChartGrid grid;
    double t = 0.0;
    long step = 0;
    std::vector<std::pair<std::string, Field>> fields;
};
SnapshotFile read_snapshot(const std::filesystem::path& path);

/// Two-column whitespace-separated series, one "x y" line per sample.
void write_series(const std::filesystem::path& path, const std::vector<std::pair<double, double>>& xy);

/// Shortest round-trip decimal form; identical inputs give identical text.
std::string format_double(double v);

/// One JSON object per line.
class NdjsonWriter {
public:
    explicit NdjsonWriter(const std::filesystem::path& path);
    ~NdjsonWriter();
    NdjsonWriter(const NdjsonWriter&) = delete;
    NdjsonWriter& operator=(const NdjsonWriter&) = delete;

    /// `json_object` is a serialized JSON object without a trailing newline.
    void write(const std::string& json_object);

private:
    std::unique_ptr<std::ofstream> out_;
};

/// JSON text of one report entry (id, status, order, thresholds, series).
std::string to_json(const ReportEntry& e);

/// Writes report.ndjson and series/<id>.dat (dx against max residual).
void write_report(const std::filesystem::path& dir, const VerificationReport& r);

}  // namespace hgf::io
