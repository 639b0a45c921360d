#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "delaywave/oracle.hpp"
#include "delaywave/problem.hpp"
#include "delaywave/spectral.hpp"

namespace delaywave {

struct ProblemConfig {
    double a = 1.0;
    double b = 0.0;
    double d = 0.0;
    double l = 1.0;
    double tau = 1.0;
    double T = 1.0;
    std::string psi = "0";
    std::string theta1 = "0";
    std::string theta2 = "0";
    std::string g = "0";
};

struct SolverConfig {
    int modes = 40;
    QuadratureRule analysis_rule = QuadratureRule::gauss_legendre_panels;
    int analysis_panels = 64;
    QuadratureRule time_rule = QuadratureRule::gauss_legendre_panels;
    int time_panels = 12;
    int history_points = 33;
    int forcing_points = 33;
    double tail_tolerance = 1e-6;
};

/// Output grid shared by the series and the oracle: times k dt from -tau,
/// nx interior points plus both ends in x.
struct GridConfig {
    double dt = 0.0025;
    int nx = 127;
};

struct OracleConfig {
    SpatialScheme scheme = SpatialScheme::central_2nd_order;
};

struct DiagnosticsConfig {
    double alpha = 0.5;
    int xnorm_modes = 64;
    /// 0 selects tau / 2.
    double probe_t_star = 0.0;
    int probe_modes = 64;
    double compatibility_tolerance = 1e-9;
};

struct OutputConfig {
    std::string directory = "out";
};

struct RunConfig {
    ProblemConfig problem;
    SolverConfig solver;
    GridConfig grid;
    OracleConfig oracle;
    DiagnosticsConfig diagnostics;
    OutputConfig output;

    /// Range checks on every setting and a parse of every expression.
    /// Throws ConfigError.
    void validate() const;

    ProblemSpec problem_spec() const;
    SpectralSettings spectral_settings() const;
    StepGrid step_grid() const;
    double probe_t_star() const;

    /// Canonical INI text; parse_config(to_ini()) reproduces the config.
    std::string to_ini() const;
};

/// Sections [problem] [solver] [grid] [oracle] [diagnostics] [output] of
/// key = value lines; ';' starts a comment line; expressions may be quoted.
/// Unknown sections or keys, duplicates and malformed values throw
/// ConfigError. The result is validated.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig parse_config_text(std::string_view text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Names of the shipped presets.
std::vector<std::string> preset_names();
/// INI text of a preset; throws ConfigError for an unknown name.
std::string preset_text(std::string_view name);
RunConfig load_preset(std::string_view name);

}  // namespace delaywave
