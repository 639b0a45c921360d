#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "delaywave/chebyshev.hpp"
#include "delaywave/delay_trig.hpp"
#include "delaywave/problem.hpp"
#include "delaywave/quadrature.hpp"
#include "delaywave/solution_field.hpp"

namespace delaywave {

/// Precomputed quadrature nodes and sine table for the coefficients
/// (2 / l) int_0^l u(s) sin(pi n s / l) ds, n = first .. last.
class SineAnalyzer {
public:
    /// Uses max(q.panels, 8 last) panels of q's rule.
    SineAnalyzer(double l, int first, int last, const QuadratureSpec& q);

    std::vector<double> analyze(const std::function<double(double)>& u) const;
    const std::vector<double>& nodes() const { return nodes_; }
    /// Coefficients from values at nodes().
    std::vector<double> analyze_samples(const std::vector<double>& samples) const;
    int first() const { return first_; }
    int last() const { return last_; }

private:
    double l_;
    int first_;
    int last_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> table_;  // (n - first) * nodes + k
};

/// Coefficients 1..N of func on [0, l].
std::vector<double> sine_coefficients(const std::function<double(double)>& func, double l, int N,
                                      const QuadratureSpec& q);

/// sum_n coeffs[n - 1] sin(pi n x / l).
double sine_synthesis(const std::vector<double>& coeffs, double l, double x);

struct SpectralSettings {
    int modes = 40;
    /// Rule for the sine analysis in x; panels are raised to >= 8 N.
    QuadratureSpec analysis{QuadratureRule::gauss_legendre_panels, 64};
    /// Rule for the delay integrals defining T_n.
    QuadratureSpec time{QuadratureRule::gauss_legendre_panels, 12};
    /// Chebyshev points for Phi_n'' on [-tau, 0] and for F_n on each
    /// delay interval of [0, T].
    int history_points = 33;
    int forcing_points = 33;
    /// Warn when the truncation-tail estimate exceeds this.
    double tail_tolerance = 1e-6;
};

/// Fourier data and solved coefficient of one mode.
struct ModeSolution {
    int n = 0;
    double omega = 0.0;
    double tau = 1.0;
    double phi_minus_tau = 0.0;
    double dphi_minus_tau = 0.0;
    ChebyshevInterpolant ddphi;  // on [-tau, 0]
    PiecewiseChebyshev forcing;  // on [0, T], one piece per delay interval
    QuadratureSpec time_quadrature;

    DelayKernelParams kernel() const { return DelayKernelParams::make(omega, tau); }
    /// T_n(t) for t >= -tau.
    double coefficient(double t, QuadratureReport* report = nullptr) const;
    /// T_n at every grid point. When the grid is k tau / M for consecutive
    /// integers k, the delay integrals are split into cells of one grid step
    /// and the kernel samples are shared by all points; any other grid falls
    /// back to coefficient() per point.
    std::vector<double> coefficients(const std::vector<double>& t_grid,
                                     QuadratureReport* report = nullptr) const;
};

ModeSolution build_mode(const TransformedProblem& tp, const LiftedData& lifted, int n,
                        const SpectralSettings& settings);

/// Modes 1..settings.modes; the sine analyses of all sample times run in
/// parallel.
std::vector<ModeSolution> build_modes(const TransformedProblem& tp, const LiftedData& lifted,
                                      const SpectralSettings& settings);

struct AssemblyReport {
    double max_tail_estimate = 0.0;
    bool quadrature_underresolved = false;
};

/// eta = back_factor(x) (sum_n T_n(t) sin(pi n x / l) + G(t, x)) on the grid.
SolutionField assemble_solution(const std::vector<ModeSolution>& modes, const LiftedData& lifted,
                                const std::function<double(double)>& back_factor,
                                const std::vector<double>& t_grid, const std::vector<double>& x_grid,
                                const SpectralSettings& settings, AssemblyReport* report = nullptr);

/// Crude bound on the omitted modes at time t: N times the magnitude bound
/// of the last computed T_N from its data and the delay-trig absolute sums.
double tail_estimate(const ModeSolution& last, double t);

struct DecayFit {
    double exponent = 0.0;   // fitted slope of log magnitude vs log n
    double std_error = 0.0;
    double required = 0.0;   // -(2m + 3 + alpha), or -(2k + 3 + alpha) for F
    int points = 0;          // modes above the noise floor used in the fit
    bool underflow = false;  // fewer than 3 modes above the floor
    bool pass = true;
};

struct DecayReport {
    int m = 0;
    double alpha = 0.0;
    std::vector<double> history_magnitude;     // |Phi_n(-tau)| + |Phi_n'(-tau)|
    std::vector<double> ddphi_magnitude;       // max |Phi_n''| over samples
    std::vector<std::vector<double>> forcing_magnitude;  // [k - 1][n - 1], k = 1..m
    DecayFit history;
    DecayFit ddphi;
    std::vector<DecayFit> forcing;             // per delay interval k = 1..m
    bool pass = true;
};

/// Fits each magnitude sequence over its upper half of modes. Forcing
/// maxima are taken over [(k - 1) tau, min(k tau, T)]. Requires >= 8 modes.
DecayReport decay_diagnostics(const std::vector<ModeSolution>& modes, double T, double alpha);

/// Least-squares fit of log |c_n| against log n over the maxima of blocks of
/// up to 4 modes in the upper half, used by decay_diagnostics; exposed for
/// testing.
DecayFit fit_decay(const std::vector<double>& magnitudes, double required);

}  // namespace delaywave
