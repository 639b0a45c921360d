#include "delaywave/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "delaywave/error.hpp"

namespace delaywave {

QuadratureRule parse_quadrature_rule(std::string_view name) {
    if (name == "composite-simpson") {
        return QuadratureRule::composite_simpson;
    }
    if (name == "gauss-legendre-panels") {
        return QuadratureRule::gauss_legendre_panels;
    }
    throw InvalidArgument("unknown quadrature rule '" + std::string(name) +
                          "' (expected composite-simpson or gauss-legendre-panels)");
}

std::string_view to_string(QuadratureRule rule) {
    return rule == QuadratureRule::composite_simpson ? "composite-simpson"
                                                     : "gauss-legendre-panels";
}

void QuadratureSpec::validate() const {
    if (panels < 4) {
        throw InvalidArgument("quadrature: panels must be >= 4, got " + std::to_string(panels));
    }
    if (!(tolerance >= 0.0)) {
        throw InvalidArgument("quadrature: tolerance must be non-negative");
    }
}

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        QuadratureRule rule, int panels) {
    if (b == a) {
        return 0.0;
    }
    const double h = (b - a) / panels;
    double sum = 0.0;
    if (rule == QuadratureRule::composite_simpson) {
        double ends = f(a) + f(b);
        double mids = 0.0;
        double inner = 0.0;
        for (int i = 0; i < panels; ++i) {
            mids += f(a + (i + 0.5) * h);
            if (i > 0) {
                inner += f(a + i * h);
            }
        }
        sum = h / 6.0 * (ends + 4.0 * mids + 2.0 * inner);
    } else {
        using Gauss = boost::math::quadrature::gauss<double, 10>;
        for (int i = 0; i < panels; ++i) {
            const double lo = a + i * h;
            const double hi = (i + 1 == panels) ? b : lo + h;
            sum += Gauss::integrate(f, lo, hi);
        }
    }
    return sum;
}

namespace {

double integrate_split(const std::function<double(double)>& f, const std::vector<double>& cuts,
                       QuadratureRule rule, int panels) {
    const double length = cuts.back() - cuts.front();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double piece = cuts[i + 1] - cuts[i];
        const int n = std::max(1, static_cast<int>(std::lround(panels * piece / length)));
        sum += integrate_panels(f, cuts[i], cuts[i + 1], rule, n);
    }
    return sum;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, const QuadratureSpec& q,
                 QuadratureReport* report) {
    q.validate();
    if (b < a) {
        return -integrate(f, b, a, breakpoints, q, report);
    }
    if (b == a) {
        return 0.0;
    }
    std::vector<double> cuts{a};
    for (double p : breakpoints) {
        if (p > a && p < b) {
            cuts.push_back(p);
        }
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    // Slivers shorter than a few ulps of the interval only cost evaluations.
    const double eps = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
    std::vector<double> merged{cuts.front()};
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        if (cuts[i] - merged.back() > eps) {
            merged.push_back(cuts[i]);
        } else if (i + 1 == cuts.size()) {
            merged.back() = cuts[i];
        }
    }
    if (merged.size() < 2) {
        return 0.0;
    }
    const double value = integrate_split(f, merged, q.rule, q.panels);
    if (q.tolerance > 0.0 && report != nullptr) {
        const double coarse = integrate_split(f, merged, q.rule, std::max(1, q.panels / 2));
        const double estimate = std::abs(value - coarse);
        report->max_error_estimate = std::max(report->max_error_estimate, estimate);
        if (estimate > q.tolerance) {
            report->underresolved = true;
        }
    }
    return value;
}

}  // namespace delaywave
