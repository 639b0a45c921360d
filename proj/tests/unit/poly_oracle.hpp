#pragma once

// Test-only ground truth for the delay oscillator x'' = -w^2 x(t - tau) + f:
// the method of steps carried out on exact monomial polynomials in long
// double. It never touches the closed-form delay-trig sums.

#include <cstddef>
#include <vector>

namespace delaywave::testing {

using Poly = std::vector<long double>;  // coefficients of t^0, t^1, ...

inline long double poly_eval(const Poly& p, long double t) {
    long double r = 0.0L;
    for (std::size_t i = p.size(); i-- > 0;) {
        r = r * t + p[i];
    }
    return r;
}

inline Poly poly_derivative(const Poly& p) {
    Poly d;
    for (std::size_t i = 1; i < p.size(); ++i) {
        d.push_back(p[i] * static_cast<long double>(i));
    }
    if (d.empty()) {
        d.push_back(0.0L);
    }
    return d;
}

// p(t - shift)
inline Poly poly_shift(const Poly& p, long double shift) {
    Poly out(p.size(), 0.0L);
    // Expand sum p_i (t - shift)^i with binomial coefficients.
    for (std::size_t i = 0; i < p.size(); ++i) {
        long double binom = 1.0L;
        long double pw = 1.0L;  // (-shift)^(i-k)
        for (std::size_t k = i + 1; k-- > 0;) {
            out[k] += p[i] * binom * pw;
            binom = binom * static_cast<long double>(k) / static_cast<long double>(i - k + 1);
            pw *= -shift;
        }
    }
    return out;
}

// Antiderivative vanishing at t0.
inline Poly poly_integral(const Poly& p, long double t0) {
    Poly out(p.size() + 1, 0.0L);
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i + 1] = p[i] / static_cast<long double>(i + 1);
    }
    out[0] = -poly_eval(out, t0);
    return out;
}

// Segment polynomials of the solution with polynomial history on [-tau, 0]
// and zero forcing; segments[k] is valid on [(k-1) tau, k tau).
inline std::vector<Poly> steps_segments(const Poly& history, long double omega, long double tau,
                                        int segments) {
    std::vector<Poly> out{history};
    for (int k = 1; k <= segments; ++k) {
        const long double t0 = (k - 1) * tau;
        const Poly& prev = out.back();
        Poly rhs = poly_shift(prev, tau);
        for (auto& c : rhs) {
            c *= -omega * omega;
        }
        Poly next = poly_integral(poly_integral(rhs, t0), t0);
        next[0] += poly_eval(prev, t0) - poly_eval(poly_derivative(prev), t0) * t0;
        if (next.size() < 2) {
            next.resize(2, 0.0L);
        }
        next[1] += poly_eval(poly_derivative(prev), t0);
        out.push_back(next);
    }
    return out;
}

inline long double steps_value(const std::vector<Poly>& segments, long double tau, long double t) {
    if (t < -tau) {
        return 0.0L;
    }
    int k = 0;
    while (k + 1 < static_cast<int>(segments.size()) && t >= k * tau) {
        ++k;
    }
    return poly_eval(segments[static_cast<std::size_t>(k)], t);
}

}  // namespace delaywave::testing
