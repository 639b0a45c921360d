#include "delaywave/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "delaywave/error.hpp"

namespace delaywave {

std::vector<double> ChebyshevInterpolant::nodes(double a, double b, int n) {
    if (n < 2) {
        throw InvalidArgument("Chebyshev interpolant needs at least 2 nodes");
    }
    std::vector<double> out(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int j = 0; j < n; ++j) {
        // Ascending: cos(pi (n - 1 - j) / (n - 1)) runs from -1 to 1.
        out[j] = mid + half * std::cos(std::numbers::pi * (n - 1 - j) / (n - 1));
    }
    out.front() = a;
    out.back() = b;
    return out;
}

ChebyshevInterpolant::ChebyshevInterpolant(double a, double b, std::vector<double> values)
    : a_(a), b_(b), values_(std::move(values)) {
    if (!(b > a)) {
        throw InvalidArgument("Chebyshev interpolant needs a < b");
    }
    const std::size_t n = values_.size();
    if (n < 2) {
        throw InvalidArgument("Chebyshev interpolant needs at least 2 nodes");
    }
    // Discrete cosine transform of the samples; values_[j] sits at
    // cos(pi (n - 1 - j) / (n - 1)) on [-1, 1].
    const std::size_t m = n - 1;
    coeffs_.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double f = values_[m - i];
            const double w = (i == 0 || i == m) ? 0.5 : 1.0;
            sum += w * f * std::cos(std::numbers::pi * static_cast<double>((i * k) % (2 * m)) / m);
        }
        coeffs_[k] = sum * 2.0 / m;
    }
    coeffs_.front() *= 0.5;
    coeffs_.back() *= 0.5;
}

double ChebyshevInterpolant::operator()(double x) const {
    // Clenshaw recurrence in the mapped variable.
    const double y = (2.0 * x - a_ - b_) / (b_ - a_);
    const double y2 = 2.0 * y;
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = coeffs_.size() - 1; k > 0; --k) {
        const double t = y2 * b1 - b2 + coeffs_[k];
        b2 = b1;
        b1 = t;
    }
    return y * b1 - b2 + coeffs_[0];
}

double ChebyshevInterpolant::max_abs_sample() const {
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

PiecewiseChebyshev::PiecewiseChebyshev(std::vector<ChebyshevInterpolant> pieces)
    : pieces_(std::move(pieces)) {}

double PiecewiseChebyshev::operator()(double x) const {
    if (pieces_.empty()) {
        return 0.0;
    }
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const ChebyshevInterpolant& p) { return v < p.lower(); });
    if (it != pieces_.begin()) {
        --it;
    }
    return (*it)(x);
}

double PiecewiseChebyshev::max_abs_sample() const {
    double m = 0.0;
    for (const auto& p : pieces_) {
        m = std::max(m, p.max_abs_sample());
    }
    return m;
}

}  // namespace delaywave
