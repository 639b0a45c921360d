#include "delaywave/delay_ode.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "delaywave/error.hpp"

namespace delaywave {

HistoryFunction::HistoryFunction(ScalarFunction value, ScalarFunction first, ScalarFunction second)
    : value_(std::move(value)), first_(std::move(first)), second_(std::move(second)) {
    if (!value_ || !first_ || !second_) {
        throw InvalidArgument("HistoryFunction: all three evaluators are required");
    }
}

HistoryFunction HistoryFunction::from_values(ScalarFunction value, double h) {
    auto first = [value, h](double s) { return (value(s + h) - value(s - h)) / (2.0 * h); };
    auto second = [value, h](double s) {
        return (value(s + h) - 2.0 * value(s) + value(s - h)) / (h * h);
    };
    return HistoryFunction(value, first, second);
}

HistoryFunction HistoryFunction::constant(double c) {
    return HistoryFunction([c](double) { return c; }, [](double) { return 0.0; },
                           [](double) { return 0.0; });
}

double HistoryFunction::derivative_mismatch(double tau, int probes) const {
    const double h = 1e-4 * tau;
    double worst = 0.0;
    for (int i = 0; i < probes; ++i) {
        // Stay h away from the interval ends so the stencil never leaves it.
        const double s = -tau + h + (tau - 2.0 * h) * i / (probes - 1);
        const double fd1 = (value(s + h) - value(s - h)) / (2.0 * h);
        const double fd2 = (first_derivative(s + h) - first_derivative(s - h)) / (2.0 * h);
        const double d1 = first_derivative(s);
        const double d2 = second_derivative(s);
        worst = std::max(worst, std::abs(fd1 - d1) / std::max(1.0, std::abs(d1)));
        worst = std::max(worst, std::abs(fd2 - d2) / std::max(1.0, std::abs(d2)));
    }
    return worst;
}

namespace {

void require_positive_omega(const DelayKernelParams& p) {
    if (!(p.omega > 0.0)) {
        throw InvalidArgument("delay oscillator: formula requires omega > 0");
    }
}

// Points where s -> sin_tau(w, t - tau - s) switches polynomial segment:
// t - tau - s = j tau for j >= -1.
std::vector<double> kernel_breakpoints(double t, double tau, double lo, double hi) {
    std::vector<double> cuts;
    for (int i = 0;; ++i) {
        const double s = t - i * tau;
        if (s <= lo) {
            break;
        }
        if (s < hi) {
            cuts.push_back(s);
        }
    }
    return cuts;
}

// q.panels counts panels per delay length, so the resolution of each
// polynomial piece of the kernel does not depend on t.
QuadratureSpec per_delay(const QuadratureSpec& q, double length, double tau) {
    q.validate();
    QuadratureSpec out = q;
    const double panels = std::ceil(q.panels * length / tau - 1e-9);
    out.panels = static_cast<int>(std::clamp(panels, 4.0, 1e6));
    return out;
}

}  // namespace

double solve_homogeneous(const DelayKernelParams& p, const HistoryFunction& beta, double t,
                         const QuadratureSpec& q, QuadratureReport* report) {
    require_positive_omega(p);
    if (t < -p.tau) {
        throw InvalidArgument("solve_homogeneous: t must be >= -tau");
    }
    const double tau = p.tau;
    const auto cuts = kernel_breakpoints(t, tau, -tau, 0.0);
    auto integrand = [&](double s) {
        return delay_sin(p, t - tau - s) * beta.second_derivative(s);
    };
    const double convolution = integrate(integrand, -tau, 0.0, cuts, per_delay(q, tau, tau), report);
    return beta.value(-tau) * delay_cos(p, t) +
           (beta.first_derivative(-tau) * delay_sin(p, t) + convolution) / p.omega;
}

double solve_forced(const DelayKernelParams& p, const ScalarFunction& f, double t,
                    const QuadratureSpec& q, QuadratureReport* report) {
    require_positive_omega(p);
    if (t <= 0.0 || !f) {
        return 0.0;
    }
    const double tau = p.tau;
    const auto cuts = kernel_breakpoints(t, tau, 0.0, t);
    auto integrand = [&](double s) { return delay_sin(p, t - tau - s) * f(s); };
    return integrate(integrand, 0.0, t, cuts, per_delay(q, t, tau), report) / p.omega;
}

double solve_mode(const DelayKernelParams& p, double phi_minus_tau, double dphi_minus_tau,
                  const ScalarFunction& ddphi, const ScalarFunction& forcing, double t,
                  const QuadratureSpec& q, QuadratureReport* report) {
    require_positive_omega(p);
    double value = 0.0;
    if (phi_minus_tau != 0.0 || dphi_minus_tau != 0.0 || ddphi) {
        // Only the endpoint data and the second derivative enter the formula.
        auto zero = [](double) { return 0.0; };
        const HistoryFunction history(
            [phi_minus_tau](double) { return phi_minus_tau; },
            [dphi_minus_tau](double) { return dphi_minus_tau; },
            ddphi ? ddphi : ScalarFunction(zero));
        value += solve_homogeneous(p, history, t, q, report);
    }
    if (forcing) {
        value += solve_forced(p, forcing, t, q, report);
    }
    return value;
}

}  // namespace delaywave
