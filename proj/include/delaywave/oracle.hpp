#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "delaywave/delay_ode.hpp"
#include "delaywave/problem.hpp"
#include "delaywave/solution_field.hpp"

namespace delaywave {

enum class SpatialScheme { central_2nd_order, sine_spectral };

SpatialScheme parse_spatial_scheme(std::string_view name);
std::string_view to_string(SpatialScheme scheme);

/// nx interior points (spacing l / (nx + 1)) and a time step that divides
/// tau exactly.
struct StepGrid {
    int nx = 127;
    double dt = 0.0025;
    SpatialScheme scheme = SpatialScheme::central_2nd_order;

    /// tau / dt; throws GridError unless it is an integer >= 2 (relative
    /// slack 1e-9) and nx >= 16.
    int steps_per_tau(double tau) const;
};

/// u_tt = a^2 u_xx(t - tau) + b u_x(t - tau) + d u(t - tau) + forcing with
/// Dirichlet data left(t), right(t) and history on [-tau, 0].
struct StepProblem {
    double a = 1.0;
    double b = 0.0;
    double d = 0.0;
    double l = 1.0;
    double tau = 1.0;
    double T = 1.0;
    DataFunction left;
    DataFunction right;
    DataFunction history;
    DataFunction forcing;

    /// The equation for eta as posed.
    static StepProblem original(const ProblemSpec& spec);
    /// The self-adjoint equation for xi (b = 0, d = c).
    static StepProblem transformed(const TransformedProblem& tp);
    /// The equation for w = xi - G: zero Dirichlet data, history Phi,
    /// forcing F.
    static StepProblem homogenized(const TransformedProblem& tp, const LiftedData& lifted);
};

struct StepResult {
    SolutionField field;  // u on delay_time_grid x spatial grid
    SolutionField rates;  // u_t; on [-tau, 0] taken from the history
    std::vector<std::string> notes;
};

/// Method of steps. On each delay interval the right-hand side
/// r = a^2 u_xx + b u_x + d u (at t - tau) + forcing is known from stored
/// states, and u(t_i) = u(t0) + u_t(t0) (t_i - t0) + int_{t0}^{t_i} (t_i - s) r(s) ds
/// is evaluated with Simpson's rule (3/8 rule for an odd remainder). The
/// history is copied; u_t(0+) is seeded from the history's t-derivative.
StepResult steps_solve(const StepProblem& problem, const StepGrid& grid);

/// Scalar method of steps for x'' + w^2 x(t - tau) = f with history beta;
/// values at k tau / steps_per_tau for k = -steps_per_tau .. covering T.
std::vector<double> steps_solve_scalar(double omega, double tau, const HistoryFunction& beta,
                                       const ScalarFunction& f, int steps_per_tau, double T);

struct CompareReport {
    double l_inf = 0.0;
    double l2 = 0.0;       // root mean square over compared points
    double rel_l_inf = 0.0;  // l_inf / max |B|
    double worst_t = 0.0;
    double worst_x = 0.0;
    std::size_t points = 0;
    bool resampled = false;
};

/// Difference A - B. Grids must coincide unless resample is set; then both
/// fields are compared at the common t values (exact matches) and linearly
/// interpolated in x onto the coarser x grid over the common range. Throws
/// GridError on mismatched grids without resample and on disjoint grids.
CompareReport compare(const SolutionField& a, const SolutionField& b, bool resample = false);

}  // namespace delaywave
