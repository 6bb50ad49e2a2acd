#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hgf/config.hpp"

namespace hgf::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // FAIL verdict, blow-up, or runtime error
inline constexpr int kExitConfig = 2;   // unreadable or invalid configuration

/// Command-line overrides on top of a config file.
struct Invocation {
    std::filesystem::path config;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::vector<int>> ladder;
    bool quiet = false;
};

/// Runs one configured command and writes its outputs under c.out_dir.
///
///   simulate  config.txt, snapshots/step_<n>.bin, index.txt,
///             diagnostics.ndjson, ricci_sup.dat, summary.json
///   verify    config.txt, report.ndjson, series/<id>.dat, summary.json
///   oracle    same layout as verify
///   diagnose  config.txt, diagnostics.ndjson, ricci_sup.dat, pinching.dat,
///             blowup.json
///
/// Returns the exit code; library errors propagate.
int run(const RunConfig& c, std::ostream& log);

/// Loads the config, applies overrides and calls run(). Errors are mapped to
/// exit codes and, when the output directory is known, written to
/// error.json.
int execute(const Invocation& inv, std::ostream& log);

}  // namespace hgf::cli
