#include "delaywave/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "delaywave/delay_trig.hpp"
#include "delaywave/error.hpp"
#include "delaywave/format.hpp"

namespace delaywave {

void XNormConfig::validate() const {
    if (modes < 16) {
        throw InvalidArgument("X-norm: at least 16 modes are required, got " + std::to_string(modes));
    }
    if (!(l > 0.0)) {
        throw InvalidArgument("X-norm: l must be > 0");
    }
}

std::vector<double> XNormConfig::lambda() const {
    std::vector<double> out;
    for (int n = 1; n <= modes; ++n) {
        out.push_back(std::numbers::pi * n / l);
    }
    return out;
}

double x_norm_squared(std::span<const double> coeffs, double l) {
    double sum = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double lam = std::numbers::pi * static_cast<double>(i + 1) / l;
        const double lam2 = lam * lam;
        sum += coeffs[i] * coeffs[i] * (1.0 + lam2) / lam2;
    }
    return sum;
}

double x_norm(std::span<const double> coeffs, double l) { return std::sqrt(x_norm_squared(coeffs, l)); }

double operator_norm_surrogate(double a, double b, double d) { return a * a + std::abs(b) + std::abs(d); }

namespace {

std::vector<double> dst(const double* interior, int nx, int modes) {
    std::vector<double> out(static_cast<std::size_t>(modes), 0.0);
    for (int n = 1; n <= modes; ++n) {
        double sum = 0.0;
        for (int j = 1; j <= nx; ++j) {
            sum += interior[j - 1] * std::sin(std::numbers::pi * n * j / (nx + 1));
        }
        out[n - 1] = 2.0 / (nx + 1) * sum;
    }
    return out;
}

}  // namespace

ModalTrajectory modal_trajectory(const StepResult& homogenized, const DataFunction& forcing,
                                 double l, double tau, int modes) {
    const auto& field = homogenized.field;
    const int nx = static_cast<int>(field.x_grid.size()) - 2;
    if (modes > nx) {
        throw InvalidArgument("modal trajectory: " + std::to_string(modes) +
                              " modes exceed the " + std::to_string(nx) + " interior points");
    }
    ModalTrajectory traj;
    traj.l = l;
    traj.tau = tau;
    traj.t = field.t_grid;
    std::vector<double> f_row(static_cast<std::size_t>(nx));
    for (std::size_t i = 0; i < field.t_grid.size(); ++i) {
        const std::size_t base = i * field.x_grid.size() + 1;
        traj.w.push_back(dst(&field.values[base], nx, modes));
        traj.w_t.push_back(dst(&homogenized.rates.values[base], nx, modes));
        const double t = field.t_grid[i];
        if (t >= 0.0 && !forcing.is_zero()) {
            for (int j = 1; j <= nx; ++j) {
                f_row[j - 1] = forcing(t, field.x_grid[j]);
            }
            traj.f.push_back(dst(f_row.data(), nx, modes));
        } else {
            traj.f.push_back(std::vector<double>(static_cast<std::size_t>(modes), 0.0));
        }
    }
    return traj;
}

EnergyTrace energy_trace(const ModalTrajectory& traj, double C_A) {
    const std::size_t nt = traj.t.size();
    if (nt < 2 || traj.w.size() != nt || traj.w_t.size() != nt || traj.f.size() != nt) {
        throw InvalidArgument("energy trace: trajectory arrays are inconsistent");
    }
    const double dt = traj.t[1] - traj.t[0];
    const auto zero_it = std::find_if(traj.t.begin(), traj.t.end(), [&](double t) { return t >= -1e-12 * dt; });
    const std::size_t i0 = static_cast<std::size_t>(zero_it - traj.t.begin());
    const std::size_t history = static_cast<std::size_t>(std::llround(traj.tau / dt));
    if (zero_it == traj.t.end() || i0 < history) {
        throw InvalidArgument("energy trace: missing history states on [-tau, 0]");
    }
    std::vector<double> w2(nt), f2(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        w2[i] = x_norm_squared(traj.w[i], traj.l);
        f2[i] = x_norm_squared(traj.f[i], traj.l);
    }
    EnergyTrace out;
    out.C_A = C_A;
    double forcing_integral = 0.0;
    double e0 = 0.0;
    out.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = i0; i < nt; ++i) {
        double hist = 0.0;
        for (std::size_t k = i - history; k < i; ++k) {
            hist += 0.5 * dt * (w2[k] + w2[k + 1]);
        }
        const double e = w2[i] + x_norm_squared(traj.w_t[i], traj.l) + hist;
        if (i == i0) {
            e0 = e;
        } else {
            forcing_integral += 0.5 * dt * (f2[i - 1] + f2[i]);
        }
        const double t = traj.t[i];
        const double bound = std::exp((2.0 + C_A) * t) * (e0 + forcing_integral);
        out.t.push_back(t);
        out.energy.push_back(e);
        out.bound.push_back(bound);
        if (i > i0) {
            out.min_margin = std::min(out.min_margin, bound - e);
        }
        out.pass = out.pass && e <= bound;
    }
    if (!std::isfinite(out.min_margin)) {
        out.min_margin = 0.0;
    }
    return out;
}

ProbeTable illposedness_probe(const TransformedProblem& tp, double t_star, int n_max,
                              std::span<const double> reference) {
    if (!(t_star > 0.0) || t_star > 2.0 * tp.tau) {
        throw InvalidArgument("probe: t_star must lie in (0, 2 tau], got " + format_double(t_star));
    }
    if (n_max < 1) {
        throw InvalidArgument("probe: n_max must be >= 1");
    }
    ProbeTable table;
    table.t_star = t_star;
    table.m = static_cast<int>(std::ceil(t_star / tp.tau * (1.0 - 1e-12)));
    for (int n = 1; n <= n_max; ++n) {
        ProbeRow row;
        row.n = n;
        row.omega = mode_frequency(tp, n);
        try {
            row.amplification = std::abs(delay_cos(DelayKernelParams::make(row.omega, tp.tau), t_star));
        } catch (const OverflowError&) {
            table.truncated = true;
            table.truncated_at = n;
            break;
        }
        const double u = static_cast<std::size_t>(n) <= reference.size() ? reference[n - 1] : 1.0 / n;
        const double lam = std::numbers::pi * n / tp.l;
        const double lam2 = lam * lam;
        const double amp2 = row.amplification * row.amplification;
        row.classical_term = lam2 * amp2 * u * u;
        row.x_term = (1.0 + lam2) / lam2 * amp2 * u * u;
        row.damped_x_term = (1.0 + lam2) / lam2 * std::pow(lam, -(2.0 * table.m + 4.0)) * amp2;
        table.classical_sum += row.classical_term;
        table.x_sum += row.x_term;
        table.rows.push_back(row);
    }
    table.contrast = table.x_sum > 0.0 ? table.classical_sum / table.x_sum : 0.0;
    table.monotone_from = table.rows.empty() ? 0 : table.rows.back().n;
    for (std::size_t i = table.rows.size(); i-- > 1;) {
        if (table.rows[i - 1].amplification > table.rows[i].amplification) {
            break;
        }
        table.monotone_from = table.rows[i - 1].n;
    }
    return table;
}

}  // namespace delaywave
