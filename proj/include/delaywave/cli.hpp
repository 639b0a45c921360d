#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "delaywave/config.hpp"

namespace delaywave {

/// Files produced by a command, in write order, with their full contents.
struct Artifacts {
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<std::string> summary;  // lines for stdout
    int exit_code = 0;

    const std::string& file(const std::string& name) const;
};

struct RunOptions {
    bool allow_incompatible = false;
};

/// Series solution: eta.csv, modes.csv, report.json.
Artifacts cmd_solve(const RunConfig& cfg, const RunOptions& opts = {});
/// Method of steps on the equation as posed: eta.csv, report.json.
Artifacts cmd_oracle(const RunConfig& cfg, const RunOptions& opts = {});
/// Compares eta.csv of two runs (directories or CSV files): compare.json.
/// exit_code is 4 when tol > 0 and l_inf exceeds it.
Artifacts cmd_compare(const std::filesystem::path& run_a, const std::filesystem::path& run_b,
                      bool resample = false, double tol = 0.0);
/// Ill-posedness table and energy trace: probe.csv, energy.csv, report.json.
Artifacts cmd_probe(const RunConfig& cfg, const RunOptions& opts = {});
/// Compatibility, transform, decay conditions and tail: decay.csv, report.json.
Artifacts cmd_diagnose(const RunConfig& cfg, const RunOptions& opts = {});

/// Writes every file to a temporary name in dir, then renames them into
/// place; on failure the temporaries are removed.
void write_artifacts(const std::filesystem::path& dir, const Artifacts& artifacts);

/// Exit codes: 0 success, 1 other errors, 2 configuration / grid /
/// oscillation-condition errors, 3 compatibility failure, 4 comparison
/// above tolerance.
int exit_code_for(const std::exception& e);

/// Entry point of the delaywave executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace delaywave
