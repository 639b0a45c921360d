#include "delaywave/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "delaywave/error.hpp"
#include "delaywave/exprlang.hpp"
#include "delaywave/format.hpp"

namespace delaywave {

namespace {

SpaceTimeFunction zero_function() {
    return [](double, double) { return 0.0; };
}

}  // namespace

DataFunction::DataFunction()
    : value_(zero_function()),
      dt_(zero_function()),
      dtt_(zero_function()),
      description_("0"),
      zero_(true),
      depends_on_x_(false) {}

DataFunction::DataFunction(SpaceTimeFunction value, SpaceTimeFunction dt, SpaceTimeFunction dtt,
                           std::string description, bool depends_on_x)
    : value_(std::move(value)),
      dt_(std::move(dt)),
      dtt_(std::move(dtt)),
      description_(std::move(description)),
      depends_on_x_(depends_on_x) {
    if (!value_ || !dt_ || !dtt_) {
        throw InvalidArgument("DataFunction: value and both t-derivatives are required");
    }
}

DataFunction DataFunction::constant(double c) {
    if (c == 0.0) {
        return zero();
    }
    return DataFunction([c](double, double) { return c; }, zero_function(), zero_function(),
                        format_double(c), false);
}

DataFunction DataFunction::from_expression(std::string_view source) {
    const auto d = expr::DiffExpr::from_source(source);
    auto eval = [](expr::Expr e) {
        return [e = std::move(e)](double t, double x) { return expr::evaluate(e, t, x); };
    };
    const bool is_zero = d.expr.node().kind == expr::NodeKind::number && d.expr.node().value == 0.0;
    DataFunction out(eval(d.expr), eval(d.dt), eval(d.dtt), std::string(source),
                     expr::depends_on(d.expr, expr::Variable::x));
    out.zero_ = is_zero;
    out.abs_differentiated_ = d.abs_differentiated;
    return out;
}

DataFunction DataFunction::from_values(SpaceTimeFunction value, double h, std::string description) {
    auto dt = [value, h](double t, double x) { return (value(t + h, x) - value(t - h, x)) / (2.0 * h); };
    auto dtt = [value, h](double t, double x) {
        return (value(t + h, x) - 2.0 * value(t, x) + value(t - h, x)) / (h * h);
    };
    return DataFunction(value, dt, dtt, std::move(description));
}

DataFunction DataFunction::times_weight(std::function<double(double)> weight,
                                        std::string description) const {
    if (zero_) {
        return zero();
    }
    DataFunction out(
        [w = weight, f = value_](double t, double x) { return w(x) * f(t, x); },
        [w = weight, f = dt_](double t, double x) { return w(x) * f(t, x); },
        [w = weight, f = dtt_](double t, double x) { return w(x) * f(t, x); },
        std::move(description));
    out.abs_differentiated_ = abs_differentiated_;
    return out;
}

DataFunction DataFunction::scaled(double k) const {
    if (zero_ || k == 0.0) {
        return zero();
    }
    DataFunction out([k, f = value_](double t, double x) { return k * f(t, x); },
                     [k, f = dt_](double t, double x) { return k * f(t, x); },
                     [k, f = dtt_](double t, double x) { return k * f(t, x); },
                     format_double(k) + " * (" + description_ + ")", depends_on_x_);
    out.abs_differentiated_ = abs_differentiated_;
    return out;
}

void ProblemSpec::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InvalidArgument(std::string("problem: ") + name + " must be finite and > 0");
        }
    };
    positive(a, "a");
    positive(l, "l");
    positive(tau, "tau");
    positive(T, "T");
    if (!std::isfinite(b) || !std::isfinite(d)) {
        throw InvalidArgument("problem: b and d must be finite");
    }
    if (theta1.depends_on_x() || theta2.depends_on_x()) {
        throw InvalidArgument("problem: boundary data theta1, theta2 must not depend on x");
    }
}

CompatibilityReport check_compatibility(const ProblemSpec& spec, double tol, int samples) {
    samples = std::max(samples, 101);
    CompatibilityReport r;
    r.tolerance = tol;
    for (int i = 0; i < samples; ++i) {
        const double t = -spec.tau + spec.tau * i / (samples - 1);
        r.max_violation_left =
            std::max(r.max_violation_left, std::abs(spec.psi(t, 0.0) - spec.theta1(t, 0.0)));
        r.max_violation_right =
            std::max(r.max_violation_right, std::abs(spec.psi(t, spec.l) - spec.theta2(t, spec.l)));
    }
    r.pass = r.max_violation_left <= tol && r.max_violation_right <= tol;
    return r;
}

double TransformedProblem::back_factor(double x) const { return std::exp(-beta * x); }

TransformedProblem to_selfadjoint(const ProblemSpec& spec) {
    spec.validate();
    TransformedProblem tp;
    tp.a = spec.a;
    tp.l = spec.l;
    tp.tau = spec.tau;
    tp.T = spec.T;
    tp.beta = spec.b / (2.0 * spec.a * spec.a);
    tp.c = spec.d - spec.b * spec.b / (4.0 * spec.a * spec.a);
    tp.mu1 = spec.theta1;
    if (tp.beta == 0.0) {
        tp.mu2 = spec.theta2;
        tp.phi = spec.psi;
        tp.f = spec.g;
        return tp;
    }
    const double beta = tp.beta;
    tp.mu2 = spec.theta2.scaled(std::exp(beta * spec.l));
    auto weight = [beta](double x) { return std::exp(beta * x); };
    tp.phi = spec.psi.times_weight(weight, "exp(beta x) * (" + spec.psi.description() + ")");
    tp.f = spec.g.times_weight(weight, "exp(beta x) * (" + spec.g.description() + ")");
    return tp;
}

namespace {

void require_boundary_evaluable(const TransformedProblem& tp) {
    const int samples = 201;
    const double lo = -tp.tau;
    const double hi = tp.T;
    for (int i = 0; i < samples; ++i) {
        const double t = lo + (hi - lo) * i / (samples - 1);
        try {
            const double v = tp.mu1(t, 0.0) + tp.mu2(t, tp.l) + tp.mu1.dtt(t, 0.0) + tp.mu2.dtt(t, tp.l);
            if (!std::isfinite(v)) {
                throw Error("non-finite value");
            }
        } catch (const Error& e) {
            throw InvalidArgument("lifting: boundary data not evaluable at t = " + format_double(t) +
                                  " (needed as t - tau for the forcing): " + e.what());
        }
    }
}

}  // namespace

LiftedData build_lifting(const TransformedProblem& tp) {
    require_boundary_evaluable(tp);
    LiftedData out;
    out.l = tp.l;
    out.tau = tp.tau;
    out.T = tp.T;
    out.c = tp.c;
    const double l = tp.l;
    const double tau = tp.tau;
    const double c = tp.c;
    const DataFunction mu1 = tp.mu1;
    const DataFunction mu2 = tp.mu2;
    const DataFunction phi = tp.phi;
    const DataFunction f = tp.f;

    if (mu1.is_zero() && mu2.is_zero()) {
        out.G = DataFunction::zero();
        out.Phi = phi;
        out.F = f;
        return out;
    }

    auto G = [=](double t, double x) { return mu1(t, 0.0) + x / l * (mu2(t, l) - mu1(t, 0.0)); };
    auto G_t = [=](double t, double x) {
        return mu1.dt(t, 0.0) + x / l * (mu2.dt(t, l) - mu1.dt(t, 0.0));
    };
    auto G_tt = [=](double t, double x) {
        return mu1.dtt(t, 0.0) + x / l * (mu2.dtt(t, l) - mu1.dtt(t, 0.0));
    };
    out.G = DataFunction(G, G_t, G_tt, "mu1 + (x / l) (mu2 - mu1)");
    out.Phi = DataFunction([=](double t, double x) { return phi(t, x) - G(t, x); },
                           [=](double t, double x) { return phi.dt(t, x) - G_t(t, x); },
                           [=](double t, double x) { return phi.dtt(t, x) - G_tt(t, x); },
                           "phi - G");
    out.F = DataFunction::from_values(
        [=](double t, double x) { return f(t, x) + c * G(t - tau, x) - G_tt(t, x); }, 1e-5,
        "f + c G(t - tau) - G_tt");
    return out;
}

void require_oscillation_condition(const TransformedProblem& tp) {
    const double k = std::numbers::pi * tp.a / tp.l;
    if (!(k * k > tp.c)) {
        throw OscillationConditionError(
            "oscillation condition violated; series construction inapplicable ((pi a / l)^2 = " +
            format_double(k * k) + " <= c = " + format_double(tp.c) + ")");
    }
}

double mode_frequency(const TransformedProblem& tp, int n) {
    if (n < 1) {
        throw InvalidArgument("mode_frequency: n must be >= 1");
    }
    require_oscillation_condition(tp);
    const double k = std::numbers::pi * n * tp.a / tp.l;
    return std::sqrt(k * k - tp.c);
}

}  // namespace delaywave
