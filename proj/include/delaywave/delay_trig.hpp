#pragma once

#include <compare>
#include <iosfwd>

namespace delaywave {

/// Parameters of the delay cosine / delay sine pair: angular frequency
/// omega >= 0 and delay tau > 0.
struct DelayKernelParams {
    double omega = 0.0;
    double tau = 1.0;

    /// Validating constructor; throws InvalidArgument on tau <= 0, omega < 0
    /// or non-finite input.
    static DelayKernelParams make(double omega, double tau);
};

/// Index of the polynomial segment containing a time point. Segment k >= 0
/// covers [(k-1) tau, k tau); -1 marks t < -tau.
struct SegmentIndex {
    int value = -1;
    auto operator<=>(const SegmentIndex&) const = default;
};

enum class DelayTrig { cos, sin };

/// A node t = k tau belongs to the segment that starts there.
SegmentIndex segment_index(double t, double tau);

double delay_cos(const DelayKernelParams& p, double t);
double delay_sin(const DelayKernelParams& p, double t);

/// Evaluates one delay function. Equivalent to delay_cos / delay_sin.
double delay_trig(const DelayKernelParams& p, DelayTrig which, double t);

/// First or second time derivative, taken term-wise on the active segment.
/// The second derivative of the delay cosine jumps at t = 0; asking for it
/// exactly there throws InvalidArgument.
double delay_trig_derivative(const DelayKernelParams& p, double t, DelayTrig which, int order);

/// Evaluates the polynomial of a fixed segment (and derivative order) at an
/// arbitrary t. Used for one-sided limits at the nodes.
double delay_trig_segment(const DelayKernelParams& p, DelayTrig which, SegmentIndex segment,
                          double t, int order = 0);

/// Sum of the absolute values of the active segment's terms: an upper bound
/// for |cos_tau| or |sin_tau| at t, used as an amplification estimate.
double delay_trig_abs_bound(const DelayKernelParams& p, DelayTrig which, double t);

/// CSV dump "t,cos_tau,sin_tau" on a uniform grid of `samples` points over
/// [t0, t1].
void write_delay_trig_csv(std::ostream& out, const DelayKernelParams& p, double t0, double t1,
                          int samples);

}  // namespace delaywave
