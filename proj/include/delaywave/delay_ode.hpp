#pragma once

#include <functional>

#include "delaywave/delay_trig.hpp"
#include "delaywave/quadrature.hpp"

namespace delaywave {

using ScalarFunction = std::function<double(double)>;

/// History of the scalar delay oscillator on [-tau, 0] with its first two
/// derivatives.
class HistoryFunction {
public:
    HistoryFunction(ScalarFunction value, ScalarFunction first, ScalarFunction second);

    /// Derivatives by central differences (h = 1e-5) when only values exist.
    static HistoryFunction from_values(ScalarFunction value, double h = 1e-5);
    static HistoryFunction constant(double c);

    double value(double s) const { return value_(s); }
    double first_derivative(double s) const { return first_(s); }
    double second_derivative(double s) const { return second_(s); }

    /// Largest relative mismatch between the supplied derivatives and central
    /// differences of the value on `probes` points of [-tau, 0].
    double derivative_mismatch(double tau, int probes = 33) const;

private:
    ScalarFunction value_;
    ScalarFunction first_;
    ScalarFunction second_;
};

/// Solution of x'' + w^2 x(t - tau) = 0 with x = beta on [-tau, 0]:
///   beta(-tau) cos_tau(w,t) + beta'(-tau) sin_tau(w,t)/w
///     + (1/w) int_{-tau}^{0} sin_tau(w, t - tau - s) beta''(s) ds.
/// Requires w > 0 and t >= -tau. The delay integrals here and below use
/// q.panels panels per interval of length tau, split at every kernel node.
double solve_homogeneous(const DelayKernelParams& p, const HistoryFunction& beta, double t,
                         const QuadratureSpec& q, QuadratureReport* report = nullptr);

/// Solution of x'' + w^2 x(t - tau) = f with zero history:
///   (1/w) int_0^t sin_tau(w, t - tau - s) f(s) ds.
double solve_forced(const DelayKernelParams& p, const ScalarFunction& f, double t,
                    const QuadratureSpec& q, QuadratureReport* report = nullptr);

/// Superposition of the two: the Fourier coefficient T_n(t) of one mode,
/// given its history data phi(-tau), phi'(-tau), phi''(s) and forcing F_n.
double solve_mode(const DelayKernelParams& p, double phi_minus_tau, double dphi_minus_tau,
                  const ScalarFunction& ddphi, const ScalarFunction& forcing, double t,
                  const QuadratureSpec& q, QuadratureReport* report = nullptr);

}  // namespace delaywave
