#pragma once

#include <span>
#include <vector>

#include "delaywave/oracle.hpp"
#include "delaywave/problem.hpp"

namespace delaywave {

/// Truncation and eigenvalues lambda_n = pi n / l for X-norm evaluation.
struct XNormConfig {
    int modes = 64;
    double l = 1.0;

    /// Throws InvalidArgument unless modes >= 16 and l > 0.
    void validate() const;
    std::vector<double> lambda() const;
};

/// ||u||_X^2 = sum_n |u_n|^2 (1 + lambda_n^2) / lambda_n^2, the closed form of
/// sum_k ||u||_{-k,2}^2 with ||u||_{-k,2}^2 = sum_n |u_n|^2 (1 + lambda_n^2)^-k.
double x_norm_squared(std::span<const double> coeffs, double l);
double x_norm(std::span<const double> coeffs, double l);

/// a^2 + |b| + |d|.
double operator_norm_surrogate(double a, double b, double d);

/// Sine coefficients of a homogenized solution w, its rate w_t and the
/// forcing f on a uniform time grid starting at -tau.
struct ModalTrajectory {
    double l = 1.0;
    double tau = 1.0;
    std::vector<double> t;
    std::vector<std::vector<double>> w;
    std::vector<std::vector<double>> w_t;
    std::vector<std::vector<double>> f;
};

/// Discrete sine transform of the oracle's interior values (first `modes`
/// coefficients) for w and w_t, and of the forcing sampled at the grid.
ModalTrajectory modal_trajectory(const StepResult& homogenized, const DataFunction& forcing,
                                 double l, double tau, int modes);

struct EnergyTrace {
    std::vector<double> t;
    std::vector<double> energy;
    std::vector<double> bound;
    double C_A = 0.0;
    /// min of bound - energy over samples with t > 0 (bound(0) = E(0)).
    double min_margin = 0.0;
    bool pass = true;
};

/// E(t) = ||w||_X^2 + ||w_t||_X^2 + int_{-tau}^0 ||w(t + s)||_X^2 ds and
/// bound(t) = exp((2 + C_A) t) (E(0) + int_0^t ||f||_X^2 ds), both integrals
/// by the trapezoid rule over stored states, for samples t >= 0.
EnergyTrace energy_trace(const ModalTrajectory& traj, double C_A);

struct ProbeRow {
    int n = 0;
    double omega = 0.0;
    double amplification = 0.0;   // |cos_tau(omega_n, t_star)|
    double classical_term = 0.0;  // lambda^2 amp^2 u_n^2
    double x_term = 0.0;          // (1 + lambda^2) / lambda^2 amp^2 u_n^2
    double damped_x_term = 0.0;   // x_term weight times lambda^-(2m + 4) amp^2
};

struct ProbeTable {
    double t_star = 0.0;
    int m = 0;
    std::vector<ProbeRow> rows;
    bool truncated = false;  // the delay-trig magnitude guard stopped the table
    int truncated_at = 0;
    /// First n from which the amplification is non-decreasing to the end.
    int monotone_from = 0;
    double classical_sum = 0.0;
    double x_sum = 0.0;
    double contrast = 0.0;  // classical_sum / x_sum
};

/// Response at t_star in (0, 2 tau] of unit-history single-mode inputs,
/// weighted by the reference datum u_n (default 1 / n).
ProbeTable illposedness_probe(const TransformedProblem& tp, double t_star, int n_max,
                              std::span<const double> reference = {});

}  // namespace delaywave
