#include "delaywave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include <boost/math/quadrature/gauss.hpp>

#include "delaywave/delay_ode.hpp"
#include "delaywave/error.hpp"
#include "delaywave/format.hpp"
#include "delaywave/parallel.hpp"

namespace delaywave {

SineAnalyzer::SineAnalyzer(double l, int first, int last, const QuadratureSpec& q)
    : l_(l), first_(first), last_(last) {
    q.validate();
    if (first < 1 || last < first) {
        throw InvalidArgument("sine analysis: need 1 <= first <= last");
    }
    if (!(l > 0.0)) {
        throw InvalidArgument("sine analysis: l must be > 0");
    }
    const int panels = std::max(q.panels, 8 * last);
    const double h = l / panels;
    if (q.rule == QuadratureRule::gauss_legendre_panels) {
        using Gauss = boost::math::quadrature::gauss<double, 10>;
        const auto& abscissa = Gauss::abscissa();
        const auto& weights = Gauss::weights();
        for (int p = 0; p < panels; ++p) {
            const double mid = (p + 0.5) * h;
            for (std::size_t k = abscissa.size(); k-- > 0;) {
                if (abscissa[k] == 0.0) {
                    continue;
                }
                nodes_.push_back(mid - 0.5 * h * abscissa[k]);
                weights_.push_back(0.5 * h * weights[k]);
            }
            for (std::size_t k = 0; k < abscissa.size(); ++k) {
                nodes_.push_back(mid + 0.5 * h * abscissa[k]);
                weights_.push_back(0.5 * h * weights[k]);
            }
        }
    } else {
        // Simpson cells [p h, (p + 1) h] with midpoints; shared ends merged.
        for (int p = 0; p <= panels; ++p) {
            nodes_.push_back(p * h);
            weights_.push_back((p == 0 || p == panels) ? h / 6.0 : h / 3.0);
            if (p < panels) {
                nodes_.push_back((p + 0.5) * h);
                weights_.push_back(4.0 * h / 6.0);
            }
        }
        nodes_.back() = l;
    }
    const std::size_t m = nodes_.size();
    table_.resize(static_cast<std::size_t>(last - first + 1) * m);
    for (int n = first; n <= last; ++n) {
        const double k = std::numbers::pi * n / l;
        for (std::size_t j = 0; j < m; ++j) {
            table_[static_cast<std::size_t>(n - first) * m + j] = std::sin(k * nodes_[j]) * weights_[j];
        }
    }
}

std::vector<double> SineAnalyzer::analyze_samples(const std::vector<double>& samples) const {
    const std::size_t m = nodes_.size();
    if (samples.size() != m) {
        throw InvalidArgument("sine analysis: sample count does not match the nodes");
    }
    std::vector<double> out(static_cast<std::size_t>(last_ - first_ + 1));
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double* row = &table_[i * m];
        double sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            sum += row[j] * samples[j];
        }
        out[i] = 2.0 / l_ * sum;
    }
    return out;
}

std::vector<double> SineAnalyzer::analyze(const std::function<double(double)>& u) const {
    std::vector<double> samples(nodes_.size());
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        samples[j] = u(nodes_[j]);
    }
    return analyze_samples(samples);
}

std::vector<double> sine_coefficients(const std::function<double(double)>& func, double l, int N,
                                      const QuadratureSpec& q) {
    if (N < 1) {
        throw InvalidArgument("sine_coefficients: N must be >= 1");
    }
    return SineAnalyzer(l, 1, N, q).analyze(func);
}

double sine_synthesis(const std::vector<double>& coeffs, double l, double x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        sum += coeffs[i] * std::sin(std::numbers::pi * static_cast<double>(i + 1) * x / l);
    }
    return sum;
}

double ModeSolution::coefficient(double t, QuadratureReport* report) const {
    const ScalarFunction dd = ddphi.empty() ? ScalarFunction()
                                            : ScalarFunction([this](double s) { return ddphi(s); });
    const ScalarFunction f = forcing.empty() ? ScalarFunction()
                                             : ScalarFunction([this](double s) { return forcing(s); });
    return solve_mode(kernel(), phi_minus_tau, dphi_minus_tau, dd, f, t, time_quadrature, report);
}

namespace {

// Grid t_i = (k0 + i) tau / M, bit for bit as delay_time_grid builds it.
struct AlignedGrid {
    long k0 = 0;
    long M = 0;
};

std::optional<AlignedGrid> aligned_grid(const std::vector<double>& t, double tau) {
    if (t.size() < 2 || !(t[1] > t[0])) {
        return std::nullopt;
    }
    const double steps = tau / (t[1] - t[0]);
    if (!(steps >= 1.0) || steps > 1e7) {
        return std::nullopt;
    }
    AlignedGrid g;
    g.M = std::lround(steps);
    g.k0 = std::lround(t[0] / tau * static_cast<double>(g.M));
    if (g.k0 < -g.M) {
        return std::nullopt;
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] != static_cast<double>(g.k0 + static_cast<long>(i)) * tau / static_cast<double>(g.M)) {
            return std::nullopt;
        }
    }
    return g;
}

// Gauss-Legendre nodes on [0, 1] with weights summing to 1, over `panels`
// equal sub-panels.
void unit_cell_rule(int panels, std::vector<double>& nodes, std::vector<double>& weights) {
    using Gauss = boost::math::quadrature::gauss<double, 10>;
    const auto& x = Gauss::abscissa();
    const auto& w = Gauss::weights();
    for (int p = 0; p < panels; ++p) {
        for (std::size_t k = 0; k < x.size(); ++k) {
            for (double sign : {-1.0, 1.0}) {
                if (x[k] == 0.0 && sign > 0.0) {
                    continue;
                }
                nodes.push_back((p + 0.5 * (1.0 + sign * x[k])) / panels);
                weights.push_back(0.5 * w[k] / panels);
            }
        }
    }
}

// Four fixed partial sums: faster than one running sum and still the same
// bits on every run.
double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) {
        s0 += a[i] * b[i];
    }
    return (s0 + s1) + (s2 + s3);
}

}  // namespace

std::vector<double> ModeSolution::coefficients(const std::vector<double>& t_grid,
                                               QuadratureReport* report) const {
    const auto g = aligned_grid(t_grid, tau);
    std::vector<double> out(t_grid.size());
    if (!g) {
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            out[i] = coefficient(t_grid[i], report);
        }
        return out;
    }
    time_quadrature.validate();
    const auto p = kernel();
    const long M = g->M;
    const double h = tau / static_cast<double>(M);
    const long last = g->k0 + static_cast<long>(t_grid.size()) - 1;
    const int panels = std::max(1, static_cast<int>(std::ceil(time_quadrature.panels / static_cast<double>(M) - 1e-9)));
    std::vector<double> xi;
    std::vector<double> wt;
    unit_cell_rule(panels, xi, wt);
    const std::size_t Q = xi.size();

    // With s = (c + xi) h on cell c, the kernel argument t_i - tau - s is
    // (e - xi) h for an integer e, so one table serves every grid point.
    const long e_min = std::min(g->k0 - M + 1, 1 - M);
    std::vector<double> K(static_cast<std::size_t>(last - e_min + 1) * Q);
    for (long e = e_min; e <= last; ++e) {
        for (std::size_t q = 0; q < Q; ++q) {
            K[static_cast<std::size_t>(e - e_min) * Q + q] = delay_sin(p, (static_cast<double>(e) - xi[q]) * h);
        }
    }
    auto kernel_at = [&](long e) { return K.data() + static_cast<std::size_t>(e - e_min) * Q; };

    // Samples are stored with cells in reverse order, so each grid point is
    // one contiguous dot product against the kernel table.
    const bool homogeneous = phi_minus_tau != 0.0 || dphi_minus_tau != 0.0 || !ddphi.empty();
    std::vector<double> history;  // weighted Phi'' on the cells of [-tau, 0]
    if (!ddphi.empty()) {
        history.resize(static_cast<std::size_t>(M) * Q);
        for (long c = 0; c < M; ++c) {
            double* row = history.data() + static_cast<std::size_t>(M - 1 - c) * Q;
            for (std::size_t q = 0; q < Q; ++q) {
                row[q] = wt[q] * ddphi(-tau + (static_cast<double>(c) + xi[q]) * h);
            }
        }
    }
    std::vector<double> source;  // weighted F on the cells of [0, t_last]
    if (!forcing.empty() && last > 0) {
        source.resize(static_cast<std::size_t>(last) * Q);
        for (long c = 0; c < last; ++c) {
            double* row = source.data() + static_cast<std::size_t>(last - 1 - c) * Q;
            for (std::size_t q = 0; q < Q; ++q) {
                row[q] = wt[q] * forcing((static_cast<double>(c) + xi[q]) * h);
            }
        }
    }

    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const long k = g->k0 + static_cast<long>(i);
        const double t = t_grid[i];
        double value = 0.0;
        if (homogeneous) {
            // Cell c pairs with e = k - c.
            const double conv = history.empty() ? 0.0 : dot(kernel_at(k - M + 1), history.data(), history.size());
            value += phi_minus_tau * delay_cos(p, t) + (dphi_minus_tau * delay_sin(p, t) + h * conv) / omega;
        }
        if (!source.empty() && k > 0) {
            // Cell c < k pairs with e = k - M - c.
            const double* f = source.data() + static_cast<std::size_t>(last - k) * Q;
            value += h * dot(kernel_at(1 - M), f, static_cast<std::size_t>(k) * Q) / omega;
        }
        out[i] = value;
    }
    return out;
}

namespace {

// Delay intervals [(k - 1) tau, min(k tau, T)] covering [0, T].
std::vector<std::pair<double, double>> delay_intervals(double tau, double T) {
    std::vector<std::pair<double, double>> out;
    for (int k = 1;; ++k) {
        const double lo = (k - 1) * tau;
        if (lo >= T * (1.0 - 1e-12)) {
            break;
        }
        out.emplace_back(lo, std::min(k * tau, T));
    }
    return out;
}

struct AnalysisTask {
    enum Kind { phi, dphi, ddphi, forcing } kind;
    double t;
};

std::vector<ModeSolution> build_range(const TransformedProblem& tp, const LiftedData& lifted,
                                      int first, int last, const SpectralSettings& s) {
    require_oscillation_condition(tp);
    if (s.history_points < 2 || s.forcing_points < 2) {
        throw InvalidArgument("spectral: sample counts must be >= 2");
    }
    s.time.validate();
    const double tau = tp.tau;
    const SineAnalyzer analyzer(tp.l, first, last, s.analysis);

    std::vector<AnalysisTask> tasks;
    tasks.push_back({AnalysisTask::phi, -tau});
    tasks.push_back({AnalysisTask::dphi, -tau});
    const auto history_nodes = ChebyshevInterpolant::nodes(-tau, 0.0, s.history_points);
    for (double t : history_nodes) {
        tasks.push_back({AnalysisTask::ddphi, t});
    }
    const auto intervals = delay_intervals(tau, tp.T);
    std::vector<std::vector<double>> forcing_nodes;
    if (!lifted.F.is_zero()) {
        for (const auto& [lo, hi] : intervals) {
            forcing_nodes.push_back(ChebyshevInterpolant::nodes(lo, hi, s.forcing_points));
            for (double t : forcing_nodes.back()) {
                tasks.push_back({AnalysisTask::forcing, t});
            }
        }
    }

    std::vector<std::vector<double>> results(tasks.size());
    parallel_for(tasks.size(), [&](std::size_t i) {
        const auto& task = tasks[i];
        const double t = task.t;
        try {
            switch (task.kind) {
                case AnalysisTask::phi:
                    results[i] = analyzer.analyze([&](double x) { return lifted.Phi(t, x); });
                    break;
                case AnalysisTask::dphi:
                    results[i] = analyzer.analyze([&](double x) { return lifted.Phi.dt(t, x); });
                    break;
                case AnalysisTask::ddphi:
                    results[i] = analyzer.analyze([&](double x) { return lifted.Phi.dtt(t, x); });
                    break;
                case AnalysisTask::forcing:
                    results[i] = analyzer.analyze([&](double x) { return lifted.F(t, x); });
                    break;
            }
        } catch (const Error& e) {
            throw Error("sine analysis failed at t = " + format_double(t) + " (modes " +
                        std::to_string(first) + ".." + std::to_string(last) + "): " + e.what());
        }
        for (double v : results[i]) {
            if (!std::isfinite(v)) {
                throw Error("sine analysis produced a non-finite coefficient at t = " +
                            format_double(t));
            }
        }
    });

    std::vector<ModeSolution> modes;
    for (int n = first; n <= last; ++n) {
        const std::size_t idx = static_cast<std::size_t>(n - first);
        ModeSolution m;
        m.n = n;
        m.omega = mode_frequency(tp, n);
        m.tau = tau;
        m.time_quadrature = s.time;
        m.phi_minus_tau = results[0][idx];
        m.dphi_minus_tau = results[1][idx];
        std::size_t next = 2;
        std::vector<double> dd;
        bool any = false;
        for (std::size_t j = 0; j < history_nodes.size(); ++j, ++next) {
            dd.push_back(results[next][idx]);
            any = any || dd.back() != 0.0;
        }
        if (any) {
            m.ddphi = ChebyshevInterpolant(-tau, 0.0, std::move(dd));
        }
        std::vector<ChebyshevInterpolant> pieces;
        for (std::size_t k = 0; k < forcing_nodes.size(); ++k) {
            std::vector<double> values;
            for (std::size_t j = 0; j < forcing_nodes[k].size(); ++j, ++next) {
                values.push_back(results[next][idx]);
            }
            pieces.emplace_back(intervals[k].first, intervals[k].second, std::move(values));
        }
        if (!pieces.empty()) {
            m.forcing = PiecewiseChebyshev(std::move(pieces));
        }
        modes.push_back(std::move(m));
    }
    return modes;
}

}  // namespace

ModeSolution build_mode(const TransformedProblem& tp, const LiftedData& lifted, int n,
                        const SpectralSettings& settings) {
    if (n < 1) {
        throw InvalidArgument("build_mode: n must be >= 1");
    }
    return build_range(tp, lifted, n, n, settings).front();
}

std::vector<ModeSolution> build_modes(const TransformedProblem& tp, const LiftedData& lifted,
                                      const SpectralSettings& settings) {
    if (settings.modes < 1) {
        throw InvalidArgument("spectral: modes must be >= 1");
    }
    return build_range(tp, lifted, 1, settings.modes, settings);
}

double tail_estimate(const ModeSolution& last, double t) {
    const auto p = last.kernel();
    try {
        const double a_cos = delay_trig_abs_bound(p, DelayTrig::cos, t);
        const double a_sin = delay_trig_abs_bound(p, DelayTrig::sin, t);
        const double history = std::abs(last.phi_minus_tau) * a_cos +
                               (std::abs(last.dphi_minus_tau) +
                                last.tau * (last.ddphi.empty() ? 0.0 : last.ddphi.max_abs_sample())) *
                                   a_sin / last.omega;
        const double forced =
            std::max(t, 0.0) * (last.forcing.empty() ? 0.0 : last.forcing.max_abs_sample()) * a_sin /
            last.omega;
        return last.n * (history + forced);
    } catch (const OverflowError&) {
        return std::numeric_limits<double>::infinity();
    }
}

SolutionField assemble_solution(const std::vector<ModeSolution>& modes, const LiftedData& lifted,
                                const std::function<double(double)>& back_factor,
                                const std::vector<double>& t_grid, const std::vector<double>& x_grid,
                                const SpectralSettings& settings, AssemblyReport* report) {
    if (modes.empty()) {
        throw InvalidArgument("assemble_solution: at least one mode is required");
    }
    SolutionField field(t_grid, x_grid);
    field.validate();
    field.truncation_N = static_cast<int>(modes.size());
    field.method = "series";
    const std::size_t nt = t_grid.size();
    const std::size_t nx = x_grid.size();
    const std::size_t nm = modes.size();
    const double l = lifted.l;

    std::vector<double> coeff(nm * nt);
    std::vector<char> underresolved(nm, 0);
    parallel_for(nm, [&](std::size_t n) {
        QuadratureReport qr;
        const auto values = modes[n].coefficients(t_grid, &qr);
        std::copy(values.begin(), values.end(), coeff.begin() + static_cast<std::ptrdiff_t>(n * nt));
        underresolved[n] = qr.underresolved ? 1 : 0;
    });

    std::vector<double> sines(nm * nx);
    std::vector<double> weights(nx);
    for (std::size_t j = 0; j < nx; ++j) {
        weights[j] = back_factor ? back_factor(x_grid[j]) : 1.0;
        for (std::size_t n = 0; n < nm; ++n) {
            sines[n * nx + j] = std::sin(std::numbers::pi * modes[n].n * x_grid[j] / l);
        }
    }
    for (std::size_t i = 0; i < nt; ++i) {
        for (std::size_t j = 0; j < nx; ++j) {
            double sum = 0.0;
            for (std::size_t n = 0; n < nm; ++n) {
                sum += coeff[n * nt + i] * sines[n * nx + j];
            }
            field.at(i, j) = weights[j] * (sum + lifted.G(t_grid[i], x_grid[j]));
        }
    }

    const double max_weight = *std::max_element(weights.begin(), weights.end(),
                                                [](double a, double b) { return std::abs(a) < std::abs(b); });
    double max_tail = 0.0;
    for (double t : t_grid) {
        max_tail = std::max(max_tail, std::abs(max_weight) * tail_estimate(modes.back(), t));
    }
    const bool any_underresolved = std::any_of(underresolved.begin(), underresolved.end(),
                                               [](char c) { return c != 0; });
    if (max_tail > settings.tail_tolerance) {
        field.warnings.push_back("truncation tail estimate " + format_double(max_tail) +
                                 " exceeds tolerance " + format_double(settings.tail_tolerance));
    }
    if (any_underresolved) {
        field.warnings.push_back("delay-integral quadrature flagged as under-resolved");
    }
    field.settings = "N=" + std::to_string(nm) + " analysis=" +
                     std::string(to_string(settings.analysis.rule)) + "/" +
                     std::to_string(std::max(settings.analysis.panels, 8 * modes.back().n)) +
                     " time=" + std::string(to_string(settings.time.rule)) + "/" +
                     std::to_string(settings.time.panels);
    if (report != nullptr) {
        report->max_tail_estimate = max_tail;
        report->quadrature_underresolved = any_underresolved;
    }
    return field;
}

DecayFit fit_decay(const std::vector<double>& magnitudes, double required) {
    DecayFit fit;
    fit.required = required;
    const std::size_t N = magnitudes.size();
    double scale = 0.0;
    for (double v : magnitudes) {
        scale = std::max(scale, std::abs(v));
    }
    const double floor = 1e-12 * scale;
    // Block maxima over the upper half: the condition bounds magnitudes from
    // above, and parity patterns would otherwise inflate the scatter.
    const std::size_t first = N / 2;
    const std::size_t block = std::clamp<std::size_t>((N - first) / 5, 1, 4);
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t b = first; b < N; b += block) {
        std::size_t arg = b;
        for (std::size_t i = b; i < std::min(N, b + block); ++i) {
            if (std::abs(magnitudes[i]) > std::abs(magnitudes[arg])) {
                arg = i;
            }
        }
        const double v = std::abs(magnitudes[arg]);
        if (scale > 0.0 && v > floor) {
            xs.push_back(std::log(static_cast<double>(arg + 1)));
            ys.push_back(std::log(v));
        }
    }
    fit.points = static_cast<int>(xs.size());
    if (xs.size() < 3) {
        fit.underflow = true;
        fit.pass = true;
        fit.exponent = -std::numeric_limits<double>::infinity();
        return fit;
    }
    const double k = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.exponent = sxy / sxx;
    const double intercept = my - fit.exponent * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (intercept + fit.exponent * xs[i]);
        ssr += r * r;
    }
    fit.std_error = std::sqrt(ssr / std::max(1.0, k - 2.0) / sxx);
    fit.pass = fit.exponent <= required + fit.std_error;
    return fit;
}

DecayReport decay_diagnostics(const std::vector<ModeSolution>& modes, double T, double alpha) {
    if (modes.size() < 8) {
        throw InvalidArgument("decay diagnostics need at least 8 modes, got " +
                              std::to_string(modes.size()));
    }
    if (!(alpha > 0.0)) {
        throw InvalidArgument("decay diagnostics: alpha must be > 0");
    }
    const double tau = modes.front().tau;
    DecayReport r;
    r.alpha = alpha;
    r.m = static_cast<int>(std::ceil(T / tau * (1.0 - 1e-12)));
    r.m = std::max(r.m, 1);
    r.forcing_magnitude.assign(static_cast<std::size_t>(r.m), std::vector<double>(modes.size(), 0.0));
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const auto& mode = modes[i];
        r.history_magnitude.push_back(std::abs(mode.phi_minus_tau) + std::abs(mode.dphi_minus_tau));
        r.ddphi_magnitude.push_back(mode.ddphi.empty() ? 0.0 : mode.ddphi.max_abs_sample());
        if (!mode.forcing.empty()) {
            const auto& pieces = mode.forcing.pieces();
            for (std::size_t k = 0; k < pieces.size() && k < r.forcing_magnitude.size(); ++k) {
                r.forcing_magnitude[k][i] = pieces[k].max_abs_sample();
            }
        }
    }
    const double required = -(2.0 * r.m + 3.0 + alpha);
    r.history = fit_decay(r.history_magnitude, required);
    r.ddphi = fit_decay(r.ddphi_magnitude, required);
    r.pass = r.history.pass && r.ddphi.pass;
    for (int k = 1; k <= r.m; ++k) {
        r.forcing.push_back(
            fit_decay(r.forcing_magnitude[static_cast<std::size_t>(k - 1)], -(2.0 * k + 3.0 + alpha)));
        r.pass = r.pass && r.forcing.back().pass;
    }
    return r;
}

}  // namespace delaywave
