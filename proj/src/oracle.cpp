#include "delaywave/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>

#include "delaywave/error.hpp"
#include "delaywave/format.hpp"

namespace delaywave {

SpatialScheme parse_spatial_scheme(std::string_view name) {
    if (name == "central-2nd-order") {
        return SpatialScheme::central_2nd_order;
    }
    if (name == "sine-spectral") {
        return SpatialScheme::sine_spectral;
    }
    throw InvalidArgument("unknown spatial scheme '" + std::string(name) +
                          "' (expected central-2nd-order or sine-spectral)");
}

std::string_view to_string(SpatialScheme scheme) {
    return scheme == SpatialScheme::central_2nd_order ? "central-2nd-order" : "sine-spectral";
}

int StepGrid::steps_per_tau(double tau) const {
    if (nx < 16) {
        throw GridError("oracle grid: nx must be >= 16, got " + std::to_string(nx));
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw GridError("oracle grid: dt must be finite and > 0");
    }
    const double ratio = tau / dt;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) > 1e-9 * std::max(1.0, ratio)) {
        throw GridError("oracle grid: dt = " + format_double(dt) + " does not divide tau = " +
                        format_double(tau) + " (tau / dt = " + format_double(ratio) +
                        "); delayed states would need interpolation");
    }
    if (nearest < 2.0) {
        throw GridError("oracle grid: need at least 2 steps per delay interval");
    }
    return static_cast<int>(nearest);
}

StepProblem StepProblem::original(const ProblemSpec& spec) {
    spec.validate();
    StepProblem p;
    p.a = spec.a;
    p.b = spec.b;
    p.d = spec.d;
    p.l = spec.l;
    p.tau = spec.tau;
    p.T = spec.T;
    p.left = spec.theta1;
    p.right = spec.theta2;
    p.history = spec.psi;
    p.forcing = spec.g;
    return p;
}

StepProblem StepProblem::transformed(const TransformedProblem& tp) {
    StepProblem p;
    p.a = tp.a;
    p.d = tp.c;
    p.l = tp.l;
    p.tau = tp.tau;
    p.T = tp.T;
    p.left = tp.mu1;
    p.right = tp.mu2;
    p.history = tp.phi;
    p.forcing = tp.f;
    return p;
}

StepProblem StepProblem::homogenized(const TransformedProblem& tp, const LiftedData& lifted) {
    StepProblem p = transformed(tp);
    p.left = DataFunction::zero();
    p.right = DataFunction::zero();
    p.history = lifted.Phi;
    p.forcing = lifted.F;
    return p;
}

namespace {

// Weights of int_{t0}^{t_i} (t_i - s) r(s) ds and int_{t0}^{t_i} r(s) ds on
// the samples r_0 .. r_i (r_0 .. r_2 for i = 1).
struct StepWeights {
    std::vector<double> position;
    std::vector<double> velocity;
};

std::vector<double> simpson_weights(int i, double h) {
    std::vector<double> w(static_cast<std::size_t>(i + 1), 0.0);
    const int simpson_end = (i % 2 == 0) ? i : i - 3;
    for (int j = 0; j + 2 <= simpson_end; j += 2) {
        w[j] += h / 3.0;
        w[j + 1] += 4.0 * h / 3.0;
        w[j + 2] += h / 3.0;
    }
    if (i % 2 == 1) {
        const int j = i - 3;
        w[j] += 3.0 * h / 8.0;
        w[j + 1] += 9.0 * h / 8.0;
        w[j + 2] += 9.0 * h / 8.0;
        w[j + 3] += 3.0 * h / 8.0;
    }
    return w;
}

StepWeights step_weights(int i, double h) {
    StepWeights sw;
    if (i == 1) {
        // Integrate the quadratic through r_0, r_1, r_2.
        sw.position = {h * h * 7.0 / 24.0, h * h / 4.0, -h * h / 24.0};
        sw.velocity = {h * 5.0 / 12.0, h * 8.0 / 12.0, -h / 12.0};
        return sw;
    }
    sw.velocity = simpson_weights(i, h);
    sw.position.resize(sw.velocity.size());
    for (int j = 0; j <= i; ++j) {
        sw.position[j] = sw.velocity[j] * (i - j) * h;
    }
    return sw;
}

using State = std::vector<std::vector<double>>;

// Shared stepping loop. Index q covers times (q - S) tau / S; q = 0 .. S is
// the history (already filled in u and v). rhs(q_delayed, t, r) fills the
// right-hand side at time t from the state at q_delayed; impose(t, u, v)
// overwrites boundary entries.
void march(int S, std::size_t total, double tau, State& u, State& v,
           const std::function<void(std::size_t, double, std::vector<double>&)>& rhs,
           const std::function<void(double, std::vector<double>&, std::vector<double>&)>& impose) {
    const double h = tau / S;
    const std::size_t m = u[static_cast<std::size_t>(S)].size();
    std::vector<StepWeights> weights(static_cast<std::size_t>(S + 1));
    for (int i = 1; i <= S; ++i) {
        weights[i] = step_weights(i, h);
    }
    auto time_of = [&](std::size_t q) {
        return static_cast<double>(static_cast<long>(q) - S) * tau / S;
    };
    std::vector<std::vector<double>> r(static_cast<std::size_t>(S + 1), std::vector<double>(m));
    for (std::size_t q0 = static_cast<std::size_t>(S); q0 < total - 1; q0 += static_cast<std::size_t>(S)) {
        const std::size_t last = std::min(total - 1, q0 + static_cast<std::size_t>(S));
        const std::size_t r_count = std::max<std::size_t>(last - q0, 2) + 1;
        for (std::size_t j = 0; j < r_count; ++j) {
            rhs(q0 + j - static_cast<std::size_t>(S), time_of(q0 + j), r[j]);
        }
        for (std::size_t q = q0 + 1; q <= last; ++q) {
            const int i = static_cast<int>(q - q0);
            const auto& w = weights[i];
            const double span = i * h;
            auto& uq = u[q];
            auto& vq = v[q];
            uq.assign(m, 0.0);
            vq.assign(m, 0.0);
            for (std::size_t k = 0; k < m; ++k) {
                double pos = u[q0][k] + v[q0][k] * span;
                double vel = v[q0][k];
                for (std::size_t j = 0; j < w.position.size(); ++j) {
                    pos += w.position[j] * r[j][k];
                    vel += w.velocity[j] * r[j][k];
                }
                uq[k] = pos;
                vq[k] = vel;
            }
            impose(time_of(q), uq, vq);
        }
    }
}

// Dirichlet sine transform on nx interior points.
class SineTransform {
public:
    SineTransform(int nx, double l) : nx_(nx), table_(static_cast<std::size_t>(nx) * nx) {
        for (int n = 1; n <= nx; ++n) {
            for (int j = 1; j <= nx; ++j) {
                table_[static_cast<std::size_t>(n - 1) * nx + (j - 1)] =
                    std::sin(std::numbers::pi * n * j / (nx + 1));
            }
        }
        for (int n = 1; n <= nx; ++n) {
            lambda_.push_back(std::numbers::pi * n / l);
        }
        cos_table_.resize(static_cast<std::size_t>(nx) * nx);
        for (int n = 1; n <= nx; ++n) {
            for (int j = 1; j <= nx; ++j) {
                cos_table_[static_cast<std::size_t>(n - 1) * nx + (j - 1)] =
                    std::cos(std::numbers::pi * n * j / (nx + 1));
            }
        }
    }

    // out[j] for interior j = 1..nx of a^2 u_xx + b u_x + d u.
    void apply(const std::vector<double>& u, double a2, double b, double d, std::vector<double>& out) const {
        std::vector<double> coeff(static_cast<std::size_t>(nx_), 0.0);
        for (int n = 0; n < nx_; ++n) {
            double sum = 0.0;
            const double* row = &table_[static_cast<std::size_t>(n) * nx_];
            for (int j = 0; j < nx_; ++j) {
                sum += row[j] * u[j + 1];
            }
            coeff[n] = 2.0 / (nx_ + 1) * sum;
        }
        for (int j = 0; j < nx_; ++j) {
            double value = 0.0;
            for (int n = 0; n < nx_; ++n) {
                const double s = table_[static_cast<std::size_t>(n) * nx_ + j];
                const double c = cos_table_[static_cast<std::size_t>(n) * nx_ + j];
                value += coeff[n] * ((d - a2 * lambda_[n] * lambda_[n]) * s + b * lambda_[n] * c);
            }
            out[j + 1] = value;
        }
    }

private:
    int nx_;
    std::vector<double> table_;
    std::vector<double> cos_table_;
    std::vector<double> lambda_;
};

}  // namespace

StepResult steps_solve(const StepProblem& problem, const StepGrid& grid) {
    const int S = grid.steps_per_tau(problem.tau);
    const int nx = grid.nx;
    if (grid.scheme == SpatialScheme::sine_spectral && (!problem.left.is_zero() || !problem.right.is_zero())) {
        throw InvalidArgument(
            "oracle: the sine-spectral scheme needs homogeneous Dirichlet data; "
            "solve the homogenized formulation (w = xi - G) instead");
    }
    const auto t_grid = delay_time_grid(problem.tau, S, problem.T);
    const auto x_grid = uniform_grid(0.0, problem.l, nx + 2);
    const std::size_t m = x_grid.size();
    const std::size_t total = t_grid.size();

    State u(total), v(total);
    for (std::size_t q = 0; q <= static_cast<std::size_t>(S); ++q) {
        u[q].resize(m);
        v[q].resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            u[q][j] = problem.history(t_grid[q], x_grid[j]);
            v[q][j] = problem.history.dt(t_grid[q], x_grid[j]);
        }
    }

    const double h = problem.l / (nx + 1);
    const double a2 = problem.a * problem.a;
    const double b = problem.b;
    const double d = problem.d;
    std::optional<SineTransform> transform;
    if (grid.scheme == SpatialScheme::sine_spectral) {
        transform.emplace(nx, problem.l);
    }
    const bool forced = !problem.forcing.is_zero();
    auto rhs = [&](std::size_t q_delayed, double t, std::vector<double>& r) {
        const auto& w = u[q_delayed];
        r.assign(m, 0.0);
        if (transform) {
            transform->apply(w, a2, b, d, r);
        } else {
            for (std::size_t j = 1; j + 1 < m; ++j) {
                const double uxx = (w[j + 1] - 2.0 * w[j] + w[j - 1]) / (h * h);
                const double ux = (w[j + 1] - w[j - 1]) / (2.0 * h);
                r[j] = a2 * uxx + b * ux + d * w[j];
            }
        }
        if (forced) {
            for (std::size_t j = 1; j + 1 < m; ++j) {
                r[j] += problem.forcing(t, x_grid[j]);
            }
        }
    };
    auto impose = [&](double t, std::vector<double>& uq, std::vector<double>& vq) {
        uq.front() = problem.left(t, 0.0);
        uq.back() = problem.right(t, problem.l);
        vq.front() = problem.left.dt(t, 0.0);
        vq.back() = problem.right.dt(t, problem.l);
    };
    march(S, total, problem.tau, u, v, rhs, impose);

    StepResult result;
    result.field = SolutionField(t_grid, x_grid);
    result.rates = SolutionField(t_grid, x_grid);
    for (std::size_t q = 0; q < total; ++q) {
        for (std::size_t j = 0; j < m; ++j) {
            result.field.at(q, j) = u[q][j];
            result.rates.at(q, j) = v[q][j];
        }
    }
    result.field.method = "method-of-steps";
    result.field.settings = "nx=" + std::to_string(nx) + " dt=" + format_double(problem.tau / S) +
                            " scheme=" + std::string(to_string(grid.scheme));
    result.rates.method = result.field.method;
    result.rates.settings = result.field.settings;
    result.notes.push_back("u_t(0+) seeded from the history derivative d/dt psi(0-)");
    return result;
}

std::vector<double> steps_solve_scalar(double omega, double tau, const HistoryFunction& beta,
                                       const ScalarFunction& f, int steps_per_tau, double T) {
    if (steps_per_tau < 2) {
        throw GridError("scalar steps: need at least 2 steps per delay interval");
    }
    const int S = steps_per_tau;
    const auto t_grid = delay_time_grid(tau, S, T);
    const std::size_t total = t_grid.size();
    State u(total), v(total);
    for (std::size_t q = 0; q <= static_cast<std::size_t>(S); ++q) {
        u[q] = {beta.value(t_grid[q])};
        v[q] = {beta.first_derivative(t_grid[q])};
    }
    const double w2 = omega * omega;
    auto rhs = [&](std::size_t q_delayed, double t, std::vector<double>& r) {
        r.assign(1, -w2 * u[q_delayed][0] + (f ? f(t) : 0.0));
    };
    auto impose = [](double, std::vector<double>&, std::vector<double>&) {};
    march(S, total, tau, u, v, rhs, impose);
    std::vector<double> out(total);
    for (std::size_t q = 0; q < total; ++q) {
        out[q] = u[q][0];
    }
    return out;
}

namespace {

bool same_grid(const std::vector<double>& a, const std::vector<double>& b) { return a == b; }

double interpolate(const std::vector<double>& xs, const double* row, double x) {
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) {
        return row[xs.size() - 1];
    }
    const std::size_t k = static_cast<std::size_t>(it - xs.begin());
    if (*it == x || k == 0) {
        return row[k];
    }
    const double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return (1.0 - w) * row[k - 1] + w * row[k];
}

}  // namespace

CompareReport compare(const SolutionField& a, const SolutionField& b, bool resample) {
    a.validate();
    b.validate();
    CompareReport r;
    double max_b = 0.0;
    double sum_sq = 0.0;
    auto accumulate = [&](double diff, double vb, double t, double x) {
        const double e = std::abs(diff);
        if (e > r.l_inf || r.points == 0) {
            r.l_inf = std::max(r.l_inf, e);
            r.worst_t = t;
            r.worst_x = x;
        }
        max_b = std::max(max_b, std::abs(vb));
        sum_sq += diff * diff;
        ++r.points;
    };
    if (same_grid(a.t_grid, b.t_grid) && same_grid(a.x_grid, b.x_grid)) {
        for (std::size_t i = 0; i < a.t_grid.size(); ++i) {
            for (std::size_t j = 0; j < a.x_grid.size(); ++j) {
                accumulate(a.at(i, j) - b.at(i, j), b.at(i, j), a.t_grid[i], a.x_grid[j]);
            }
        }
    } else {
        if (!resample) {
            throw GridError("compare: grids differ (t: " + std::to_string(a.t_grid.size()) + " vs " +
                            std::to_string(b.t_grid.size()) + " points, x: " +
                            std::to_string(a.x_grid.size()) + " vs " + std::to_string(b.x_grid.size()) +
                            "); pass --resample to compare on the common grid");
        }
        r.resampled = true;
        const double x_lo = std::max(a.x_grid.front(), b.x_grid.front());
        const double x_hi = std::min(a.x_grid.back(), b.x_grid.back());
        const auto& coarse = a.x_grid.size() <= b.x_grid.size() ? a.x_grid : b.x_grid;
        std::vector<double> xs;
        for (double x : coarse) {
            if (x >= x_lo && x <= x_hi) {
                xs.push_back(x);
            }
        }
        std::vector<std::pair<std::size_t, std::size_t>> rows;
        for (std::size_t i = 0, k = 0; i < a.t_grid.size() && k < b.t_grid.size();) {
            const double ta = a.t_grid[i];
            const double tb = b.t_grid[k];
            const double slack = 1e-12 * std::max({1.0, std::abs(ta), std::abs(tb)});
            if (std::abs(ta - tb) <= slack) {
                rows.emplace_back(i++, k++);
            } else if (ta < tb) {
                ++i;
            } else {
                ++k;
            }
        }
        if (xs.empty() || rows.empty()) {
            throw GridError("compare: the two grids are disjoint");
        }
        for (const auto& [i, k] : rows) {
            const double* row_a = &a.values[i * a.x_grid.size()];
            const double* row_b = &b.values[k * b.x_grid.size()];
            for (double x : xs) {
                const double va = interpolate(a.x_grid, row_a, x);
                const double vb = interpolate(b.x_grid, row_b, x);
                accumulate(va - vb, vb, a.t_grid[i], x);
            }
        }
    }
    r.l2 = std::sqrt(sum_sq / static_cast<double>(r.points));
    r.rel_l_inf = max_b > 0.0 ? r.l_inf / max_b : r.l_inf;
    return r;
}

}  // namespace delaywave
