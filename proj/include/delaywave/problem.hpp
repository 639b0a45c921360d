#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace delaywave {

using SpaceTimeFunction = std::function<double(double t, double x)>;

/// A data function of (t, x) together with its first two t-derivatives.
/// Boundary data are DataFunctions that ignore x.
class DataFunction {
public:
    /// Identically zero.
    DataFunction();
    DataFunction(SpaceTimeFunction value, SpaceTimeFunction dt, SpaceTimeFunction dtt,
                 std::string description = "<callable>", bool depends_on_x = true);

    static DataFunction zero() { return DataFunction(); }
    static DataFunction constant(double c);
    /// Parses an expression in t and x; derivatives are symbolic.
    static DataFunction from_expression(std::string_view source);
    /// Derivatives by central differences with step h.
    static DataFunction from_values(SpaceTimeFunction value, double h = 1e-5,
                                    std::string description = "<callable>");

    double operator()(double t, double x) const { return value_(t, x); }
    double dt(double t, double x) const { return dt_(t, x); }
    double dtt(double t, double x) const { return dtt_(t, x); }

    const std::string& description() const { return description_; }
    bool is_zero() const { return zero_; }
    bool depends_on_x() const { return depends_on_x_; }
    /// True when an abs() was differentiated through sign().
    bool abs_differentiated() const { return abs_differentiated_; }

    /// weight(x) * this, derivatives included.
    DataFunction times_weight(std::function<double(double)> weight, std::string description) const;
    /// k * this.
    DataFunction scaled(double k) const;

private:
    SpaceTimeFunction value_;
    SpaceTimeFunction dt_;
    SpaceTimeFunction dtt_;
    std::string description_;
    bool zero_ = false;
    bool depends_on_x_ = true;
    bool abs_differentiated_ = false;
};

/// eta_tt = a^2 eta_xx(t - tau) + b eta_x(t - tau) + d eta(t - tau) + g on (0, T) x (0, l),
/// eta(t, 0) = theta1(t), eta(t, l) = theta2(t), eta = psi on [-tau, 0] x [0, l].
struct ProblemSpec {
    double a = 1.0;
    double b = 0.0;
    double d = 0.0;
    double l = 1.0;
    double tau = 1.0;
    double T = 1.0;
    DataFunction psi;
    DataFunction theta1;
    DataFunction theta2;
    DataFunction g;

    /// Throws InvalidArgument on non-positive a, l, tau, T, non-finite
    /// coefficients, or boundary data that depend on x.
    void validate() const;
};

struct CompatibilityReport {
    double max_violation_left = 0.0;
    double max_violation_right = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

/// Samples psi(t, 0) - theta1(t) and psi(t, l) - theta2(t) on [-tau, 0].
CompatibilityReport check_compatibility(const ProblemSpec& spec, double tol = 1e-9,
                                        int samples = 101);

/// The self-adjoint form xi_tt = a^2 xi_xx(t - tau) + c xi(t - tau) + f obtained
/// with xi = exp(beta x) eta, beta = b / (2 a^2).
struct TransformedProblem {
    double a = 1.0;
    double l = 1.0;
    double tau = 1.0;
    double T = 1.0;
    double beta = 0.0;
    double c = 0.0;
    DataFunction mu1;
    DataFunction mu2;
    DataFunction phi;
    DataFunction f;

    /// Multiplier turning xi back into eta: exp(-beta x).
    double back_factor(double x) const;
};

TransformedProblem to_selfadjoint(const ProblemSpec& spec);

/// G is the affine-in-x lifting of (mu1, mu2); Phi = phi - G is the
/// homogenized history and F the forcing seen by xi - G.
struct LiftedData {
    double l = 1.0;
    double tau = 1.0;
    double T = 1.0;
    double c = 0.0;
    DataFunction G;
    DataFunction Phi;
    DataFunction F;
};

/// Throws InvalidArgument when the boundary data cannot be evaluated on
/// [-tau, T] (F needs mu(t - tau) for t in [0, T]).
LiftedData build_lifting(const TransformedProblem& tp);

/// omega_n = sqrt((pi n a / l)^2 - c). Throws OscillationConditionError when
/// (pi a / l)^2 <= c.
double mode_frequency(const TransformedProblem& tp, int n);
void require_oscillation_condition(const TransformedProblem& tp);

}  // namespace delaywave
