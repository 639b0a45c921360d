#include "delaywave/solution_field.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "delaywave/error.hpp"
#include "delaywave/format.hpp"

namespace delaywave {

SolutionField::SolutionField(std::vector<double> t, std::vector<double> x)
    : t_grid(std::move(t)), x_grid(std::move(x)), values(t_grid.size() * x_grid.size(), 0.0) {}

double SolutionField::max_abs() const {
    double m = 0.0;
    for (double v : values) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

void SolutionField::validate() const {
    auto increasing = [](const std::vector<double>& g) {
        return !g.empty() && std::adjacent_find(g.begin(), g.end(), std::greater_equal<>()) == g.end();
    };
    if (!increasing(t_grid) || !increasing(x_grid)) {
        throw InvalidArgument("solution field: grids must be non-empty and strictly increasing");
    }
    if (values.size() != t_grid.size() * x_grid.size()) {
        throw InvalidArgument("solution field: value count does not match the grid");
    }
}

void write_field_csv(std::ostream& out, const SolutionField& field, const std::string& value_column) {
    out << "t,x," << value_column << '\n';
    for (std::size_t i = 0; i < field.t_grid.size(); ++i) {
        const std::string t = format_double(field.t_grid[i]);
        for (std::size_t j = 0; j < field.x_grid.size(); ++j) {
            out << t << ',' << format_double(field.x_grid[j]) << ',' << format_double(field.at(i, j))
                << '\n';
        }
    }
}

namespace {

double parse_number(std::string_view s, int line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw InvalidArgument("field csv: malformed number '" + std::string(s) + "' on line " +
                              std::to_string(line));
    }
    return v;
}

}  // namespace

SolutionField read_field_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw InvalidArgument("field csv: empty input");
    }
    std::vector<double> ts, xs, vs;
    int number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw InvalidArgument("field csv: expected 3 columns on line " + std::to_string(number));
        }
        const std::string_view view(line);
        ts.push_back(parse_number(view.substr(0, c1), number));
        xs.push_back(parse_number(view.substr(c1 + 1, c2 - c1 - 1), number));
        vs.push_back(parse_number(view.substr(c2 + 1), number));
    }
    if (ts.empty()) {
        throw InvalidArgument("field csv: no data rows");
    }
    std::size_t nx = 1;
    while (nx < ts.size() && ts[nx] == ts[0]) {
        ++nx;
    }
    if (ts.size() % nx != 0) {
        throw InvalidArgument("field csv: rows do not form a rectangular grid");
    }
    SolutionField field;
    field.x_grid.assign(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(nx));
    for (std::size_t r = 0; r < ts.size(); r += nx) {
        field.t_grid.push_back(ts[r]);
        for (std::size_t j = 0; j < nx; ++j) {
            if (ts[r + j] != ts[r] || xs[r + j] != field.x_grid[j]) {
                throw InvalidArgument("field csv: rows do not form a rectangular t-major grid");
            }
        }
    }
    field.values = std::move(vs);
    field.validate();
    return field;
}

std::vector<double> uniform_grid(double a, double b, int n) {
    if (n < 2) {
        return {a};
    }
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        g[i] = a + (b - a) * i / (n - 1);
    }
    g.back() = b;
    return g;
}

std::vector<double> delay_time_grid(double tau, int steps_per_tau, double T) {
    if (steps_per_tau < 1 || !(tau > 0.0) || !(T >= 0.0)) {
        throw InvalidArgument("time grid: need tau > 0, T >= 0 and steps_per_tau >= 1");
    }
    const double steps = T / tau * steps_per_tau;
    const double nearest = std::round(steps);
    const long last = std::abs(steps - nearest) <= 1e-9 * std::max(1.0, steps)
                          ? static_cast<long>(nearest)
                          : static_cast<long>(std::ceil(steps));
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(last + steps_per_tau + 1));
    for (long k = -steps_per_tau; k <= last; ++k) {
        g.push_back(static_cast<double>(k) * tau / steps_per_tau);
    }
    return g;
}

}  // namespace delaywave
