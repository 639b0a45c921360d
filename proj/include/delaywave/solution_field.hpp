#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace delaywave {

/// Samples of a solution on a rectangular (t, x) grid, stored t-major:
/// values[i * x_grid.size() + j] belongs to (t_grid[i], x_grid[j]).
struct SolutionField {
    std::vector<double> t_grid;
    std::vector<double> x_grid;
    std::vector<double> values;
    /// Number of Fourier modes behind the values; 0 for grid methods.
    int truncation_N = 0;
    std::string method;
    std::string settings;
    std::vector<std::string> warnings;

    SolutionField() = default;
    SolutionField(std::vector<double> t, std::vector<double> x);

    double& at(std::size_t i, std::size_t j) { return values[i * x_grid.size() + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * x_grid.size() + j]; }
    double max_abs() const;

    /// Throws InvalidArgument unless both grids are strictly increasing and
    /// the value count matches.
    void validate() const;
};

/// "t,x,eta" header, one row per grid point, t-major, shortest round-trip
/// floats, LF line endings.
void write_field_csv(std::ostream& out, const SolutionField& field,
                     const std::string& value_column = "eta");

/// Reads what write_field_csv wrote. Rows must form a full t-major grid.
SolutionField read_field_csv(std::istream& in);

/// Uniform grid of n points on [a, b] with exact endpoints.
std::vector<double> uniform_grid(double a, double b, int n);

/// Times k tau / steps_per_tau for k = -steps_per_tau .. K, where K tau /
/// steps_per_tau is the first grid time >= T (up to rounding). Shared by the
/// series and the oracle so their grids coincide bit for bit.
std::vector<double> delay_time_grid(double tau, int steps_per_tau, double T);

}  // namespace delaywave
