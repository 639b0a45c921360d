#pragma once

#include <functional>
#include <span>
#include <string_view>

namespace delaywave {

enum class QuadratureRule { composite_simpson, gauss_legendre_panels };

QuadratureRule parse_quadrature_rule(std::string_view name);
std::string_view to_string(QuadratureRule rule);

/// Panel-based quadrature. A Simpson panel is one three-point Simpson cell;
/// a Gauss-Legendre panel is one 10-point Gauss rule.
struct QuadratureSpec {
    QuadratureRule rule = QuadratureRule::gauss_legendre_panels;
    int panels = 64;
    /// When > 0, integrate() also evaluates with half the panels and flags
    /// the result as under-resolved if the two differ by more than this.
    double tolerance = 0.0;

    void validate() const;
};

struct QuadratureReport {
    bool underresolved = false;
    double max_error_estimate = 0.0;
};

/// Integrates a piecewise-smooth integrand over [a, b]. Every breakpoint
/// strictly inside (a, b) becomes a panel boundary; the panel budget is
/// shared between the resulting pieces in proportion to their length, with
/// at least one panel per piece.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, const QuadratureSpec& q,
                 QuadratureReport* report = nullptr);

/// Fixed rule on a single interval, no splitting.
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        QuadratureRule rule, int panels);

}  // namespace delaywave
