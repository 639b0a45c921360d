#include "delaywave/delay_trig.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "delaywave/compensated_sum.hpp"
#include "delaywave/error.hpp"
#include "delaywave/format.hpp"

namespace delaywave {

namespace {

constexpr double kMagnitudeGuard = 1e290;

void require_finite(double t) {
    if (!std::isfinite(t)) {
        throw InvalidArgument("delay trig: non-finite time argument");
    }
}

[[noreturn]] void overflow(int segment) {
    throw OverflowError(segment, "delay trig: term magnitude exceeded 1e290 on segment " +
                                     std::to_string(segment) +
                                     " (high-mode amplification; reduce modes or horizon)");
}

// (w u)^m / m!, built factor by factor so neither the power nor the
// factorial is ever formed on its own.
double scaled_power(double wu, int m, int segment) {
    double term = 1.0;
    for (int i = 1; i <= m; ++i) {
        term *= wu / i;
        if (std::abs(term) > kMagnitudeGuard) {
            overflow(segment);
        }
    }
    return term;
}

double omega_power(double omega, int order) {
    double r = 1.0;
    for (int i = 0; i < order; ++i) {
        r *= omega;
    }
    return r;
}

// Term j of segment polynomial (which, order): (-1)^j w^P u^(P-r)/(P-r)! with
// P = 2j (+1 for sine) and u = t - (j-1) tau.
double segment_term(const DelayKernelParams& p, DelayTrig which, int j, double t, int order,
                    int segment) {
    const int power = 2 * j + (which == DelayTrig::sin ? 1 : 0);
    if (power < order) {
        return 0.0;
    }
    const double u = t - (j - 1) * p.tau;
    double term = omega_power(p.omega, order) * scaled_power(p.omega * u, power - order, segment);
    if (std::abs(term) > kMagnitudeGuard) {
        overflow(segment);
    }
    return (j % 2 == 0) ? term : -term;
}

}  // namespace

DelayKernelParams DelayKernelParams::make(double omega, double tau) {
    if (!std::isfinite(omega) || omega < 0.0) {
        throw InvalidArgument("delay trig: omega must be finite and non-negative");
    }
    if (!std::isfinite(tau) || tau <= 0.0) {
        throw InvalidArgument("delay trig: tau must be finite and positive");
    }
    return DelayKernelParams{omega, tau};
}

SegmentIndex segment_index(double t, double tau) {
    require_finite(t);
    if (!(tau > 0.0)) {
        throw InvalidArgument("segment_index: tau must be positive");
    }
    if (t < -tau) {
        return SegmentIndex{-1};
    }
    if (t / tau > 1e6) {
        throw InvalidArgument("segment_index: t/tau beyond supported range");
    }
    int k = static_cast<int>(std::floor(t / tau)) + 1;
    // The division can land one ulp on the wrong side of a node; settle the
    // index against the node positions the evaluator itself uses.
    while (k > 0 && t < (k - 1) * tau) {
        --k;
    }
    while (t >= k * tau) {
        ++k;
    }
    return SegmentIndex{k};
}

double delay_trig_segment(const DelayKernelParams& p, DelayTrig which, SegmentIndex segment,
                          double t, int order) {
    require_finite(t);
    if (segment.value < 0) {
        return 0.0;
    }
    CompensatedSum sum;
    for (int j = 0; j <= segment.value; ++j) {
        sum += segment_term(p, which, j, t, order, segment.value);
    }
    return sum.value();
}

double delay_trig(const DelayKernelParams& p, DelayTrig which, double t) {
    return delay_trig_segment(p, which, segment_index(t, p.tau), t, 0);
}

double delay_cos(const DelayKernelParams& p, double t) {
    return delay_trig(p, DelayTrig::cos, t);
}

double delay_sin(const DelayKernelParams& p, double t) {
    return delay_trig(p, DelayTrig::sin, t);
}

double delay_trig_derivative(const DelayKernelParams& p, double t, DelayTrig which, int order) {
    if (order != 1 && order != 2) {
        throw InvalidArgument("delay_trig_derivative: order must be 1 or 2");
    }
    if (which == DelayTrig::cos && order == 2 && t == 0.0) {
        throw InvalidArgument(
            "delay_trig_derivative: second derivative of the delay cosine is discontinuous at "
            "the node t = 0");
    }
    return delay_trig_segment(p, which, segment_index(t, p.tau), t, order);
}

double delay_trig_abs_bound(const DelayKernelParams& p, DelayTrig which, double t) {
    const SegmentIndex segment = segment_index(t, p.tau);
    double bound = 0.0;
    for (int j = 0; j <= segment.value; ++j) {
        bound += std::abs(segment_term(p, which, j, t, 0, segment.value));
    }
    return bound;
}

void write_delay_trig_csv(std::ostream& out, const DelayKernelParams& p, double t0, double t1,
                          int samples) {
    if (samples < 2 || !(t1 > t0)) {
        throw InvalidArgument("write_delay_trig_csv: need samples >= 2 and t1 > t0");
    }
    out << "t,cos_tau,sin_tau\n";
    for (int i = 0; i < samples; ++i) {
        const double t = t0 + (t1 - t0) * i / (samples - 1);
        out << format_double(t) << ',' << format_double(delay_cos(p, t)) << ','
            << format_double(delay_sin(p, t)) << '\n';
    }
}

}  // namespace delaywave
