#pragma once

#include <functional>
#include <vector>

namespace delaywave {

/// Polynomial interpolant through Chebyshev points of the second kind
/// (endpoints included), stored as a Chebyshev series and evaluated with
/// the Clenshaw recurrence.
class ChebyshevInterpolant {
public:
    ChebyshevInterpolant() = default;
    ChebyshevInterpolant(double a, double b, std::vector<double> values);

    /// Nodes of an n-point interpolant on [a, b], ascending. n >= 2.
    static std::vector<double> nodes(double a, double b, int n);

    double operator()(double x) const;
    double lower() const { return a_; }
    double upper() const { return b_; }
    const std::vector<double>& values() const { return values_; }
    double max_abs_sample() const;
    bool empty() const { return values_.empty(); }

private:
    double a_ = 0.0;
    double b_ = 0.0;
    std::vector<double> values_;
    std::vector<double> coeffs_;  // Chebyshev series on [a, b]
};

/// Chebyshev interpolants on consecutive pieces of an interval. A point on a
/// shared boundary is evaluated on the piece to its right.
class PiecewiseChebyshev {
public:
    PiecewiseChebyshev() = default;
    explicit PiecewiseChebyshev(std::vector<ChebyshevInterpolant> pieces);

    double operator()(double x) const;
    const std::vector<ChebyshevInterpolant>& pieces() const { return pieces_; }
    bool empty() const { return pieces_.empty(); }
    double max_abs_sample() const;

private:
    std::vector<ChebyshevInterpolant> pieces_;
};

}  // namespace delaywave
