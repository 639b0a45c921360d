#include <doctest.h>

#include <cmath>
#include <numbers>

#include "delaywave/error.hpp"
#include "delaywave/oracle.hpp"
#include "delaywave/spectral.hpp"

using namespace delaywave;

namespace {

constexpr double pi = std::numbers::pi;

ProblemSpec mode1_spec() {
    ProblemSpec s;
    s.a = 1.0;
    s.l = pi;
    s.tau = 0.5;
    s.T = 1.0;
    s.psi = DataFunction::from_expression("sin(x)");
    return s;
}

ProblemSpec smooth_spec() {
    ProblemSpec s;
    s.a = 0.5;
    s.l = 1.0;
    s.tau = 0.5;
    s.T = 1.0;
    s.theta1 = DataFunction::from_expression("1 + 0.5 * t");
    s.theta2 = DataFunction::from_expression("1 - 0.25 * t");
    s.psi = DataFunction::from_expression(
        "(1 - x) * (1 + 0.5 * t) + x * (1 - 0.25 * t) + "
        "cos(t) * (x^8 - 4*x^7 + 14*x^5 - 28*x^3 + 17*x) / 5.41015625");
    return s;
}

double mode1_error(int nx) {
    const auto s = mode1_spec();
    const auto r = steps_solve(StepProblem::original(s), StepGrid{nx, s.tau / 200});
    const auto p = DelayKernelParams::make(1.0, s.tau);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.field.t_grid.size(); ++i) {
        const double c = delay_cos(p, r.field.t_grid[i]);
        for (std::size_t j = 0; j < r.field.x_grid.size(); ++j) {
            worst = std::max(worst, std::abs(r.field.at(i, j) - c * std::sin(r.field.x_grid[j])));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("grid validation") {
    auto steps = [](int nx, double dt) { return StepGrid{nx, dt}.steps_per_tau(0.5); };
    CHECK(steps(127, 0.0025) == 200);
    CHECK_THROWS_WITH_AS(steps(127, 0.003), doctest::Contains("does not divide"), GridError);
    CHECK_THROWS_AS(steps(8, 0.0025), GridError);
    CHECK_THROWS_AS(steps(127, 0.5), GridError);
    CHECK(parse_spatial_scheme("sine-spectral") == SpatialScheme::sine_spectral);
    CHECK_THROWS_AS(parse_spatial_scheme("upwind"), InvalidArgument);
}

TEST_CASE("zero data stay zero") {
    ProblemSpec s = mode1_spec();
    s.psi = DataFunction::zero();
    const auto r = steps_solve(StepProblem::original(s), StepGrid{31, 0.05});
    CHECK(r.field.max_abs() == 0.0);
    CHECK(r.field.t_grid.front() == -0.5);
    CHECK(r.field.t_grid.back() == 1.0);
}

TEST_CASE("history is copied") {
    const auto s = smooth_spec();
    const auto r = steps_solve(StepProblem::original(s), StepGrid{31, 0.05});
    for (std::size_t i = 0; r.field.t_grid[i] <= 0.0; ++i) {
        for (std::size_t j = 0; j < r.field.x_grid.size(); ++j) {
            CHECK(r.field.at(i, j) == s.psi(r.field.t_grid[i], r.field.x_grid[j]));
            CHECK(r.rates.at(i, j) == s.psi.dt(r.field.t_grid[i], r.field.x_grid[j]));
        }
    }
    for (std::size_t i = 0; i < r.field.t_grid.size(); ++i) {
        if (r.field.t_grid[i] > 0.0) {
            CHECK(r.field.at(i, 0) == s.theta1(r.field.t_grid[i], 0.0));
            CHECK(r.field.at(i, r.field.x_grid.size() - 1) == s.theta2(r.field.t_grid[i], 1.0));
        }
    }
}

TEST_CASE("single-mode preset follows the delay cosine") {
    CHECK(mode1_error(127) <= 1e-4);
}

TEST_CASE("central differences converge at second order in space") {
    const double e1 = mode1_error(31);
    const double e2 = mode1_error(63);
    const double e3 = mode1_error(127);
    CHECK(std::log2(e1 / e2) >= 1.9);
    CHECK(std::log2(e2 / e3) >= 1.9);
}

TEST_CASE("quadratic-in-t forcing is integrated exactly") {
    // Zero history, so on [0, tau] u_tt = (1 + t + t^2) sin(pi x) exactly and
    // u = (t^2/2 + t^3/6 + t^4/12) sin(pi x) at every grid point.
    ProblemSpec s;
    s.l = 1.0;
    s.tau = 0.6;
    s.T = 0.6;
    s.g = DataFunction::from_expression("(1 + t + t^2) * sin(pi * x)");
    for (double dt : {0.1, 0.2, 0.3}) {  // odd and even step counts
        const auto r = steps_solve(StepProblem::original(s), StepGrid{16, dt, SpatialScheme::sine_spectral});
        for (std::size_t i = 0; i < r.field.t_grid.size(); ++i) {
            const double t = std::max(r.field.t_grid[i], 0.0);
            const double amp = t * t / 2 + t * t * t / 6 + t * t * t * t / 12;
            for (std::size_t j = 0; j < r.field.x_grid.size(); ++j) {
                CHECK(std::abs(r.field.at(i, j) - amp * std::sin(pi * r.field.x_grid[j])) <= 1e-14);
            }
        }
    }
}

TEST_CASE("sine-spectral scheme requires homogeneous boundary data") {
    const auto s = smooth_spec();
    const StepGrid grid{31, 0.05, SpatialScheme::sine_spectral};
    CHECK_THROWS_WITH_AS(steps_solve(StepProblem::original(s), grid), doctest::Contains("homogenized"),
                         InvalidArgument);
}

TEST_CASE("schemes agree on the homogenized smooth problem") {
    const auto s = smooth_spec();
    const auto tp = to_selfadjoint(s);
    const auto lifted = build_lifting(tp);
    const auto problem = StepProblem::homogenized(tp, lifted);
    const auto central = steps_solve(problem, StepGrid{127, 0.0025});
    const auto spectral = steps_solve(problem, StepGrid{127, 0.0025, SpatialScheme::sine_spectral});
    const auto fine = steps_solve(problem, StepGrid{255, 0.0025});
    // The central error bound: its distance to the 4x more accurate fine run
    // with the error constant scaled back up.
    const auto fine_diff = compare(central.field, fine.field, true);
    const double central_bound = fine_diff.l_inf * 4.0 / 3.0 * 1.1;
    const auto agreement = compare(central.field, spectral.field);
    CHECK(agreement.l_inf <= central_bound);
    CHECK(agreement.l_inf > 0.0);
}

TEST_CASE("series and method of steps agree on the smooth problem") {
    const auto s = smooth_spec();
    const auto tp = to_selfadjoint(s);
    const auto lifted = build_lifting(tp);
    SpectralSettings settings;
    const auto modes = build_modes(tp, lifted, settings);
    const auto steps = steps_solve(StepProblem::original(s), StepGrid{127, s.tau / 200});
    const auto series = assemble_solution(modes, lifted, [&](double x) { return tp.back_factor(x); },
                                          steps.field.t_grid, steps.field.x_grid, settings);
    const auto r = compare(series, steps.field);
    CHECK(r.rel_l_inf <= 1e-4);
}

TEST_CASE("scalar method of steps") {
    const double tau = 1.0;
    auto values = steps_solve_scalar(2.0, tau, HistoryFunction::constant(1.0), nullptr, 20, 3.0);
    const auto p = DelayKernelParams::make(2.0, tau);
    for (std::size_t q = 0; q < values.size(); ++q) {
        const double t = (static_cast<double>(q) - 20.0) * tau / 20.0;
        // The right-hand side has degree <= 2 up to 2 tau, where Simpson is
        // exact; beyond that the error is O(h^4).
        const double tol = t <= 2.0 * tau ? 1e-12 : 1e-6;
        CHECK(std::abs(values[q] - delay_cos(p, t)) <= tol * std::max(1.0, std::abs(values[q])));
    }
    // Forced, zero history: x(1.5) = 1/2 + 1/2 + 1/8 - 1/96.
    values = steps_solve_scalar(2.0, tau, HistoryFunction::constant(0.0), [](double) { return 1.0; }, 20, 1.5);
    CHECK(values.back() == doctest::Approx(1.1145833333333333).epsilon(1e-13));
}

TEST_CASE("compare") {
    SolutionField a(uniform_grid(0.0, 1.0, 5), uniform_grid(0.0, 2.0, 9));
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        a.values[i] = std::sin(0.3 * static_cast<double>(i));
    }
    auto r = compare(a, a);
    CHECK(r.l_inf == 0.0);
    CHECK(r.l2 == 0.0);
    SolutionField b = a;
    for (auto& v : b.values) {
        v += 1.0;
    }
    r = compare(b, a);
    CHECK(r.l_inf == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.l2 == doctest::Approx(1.0).epsilon(1e-15));

    SolutionField c(uniform_grid(0.0, 1.0, 5), uniform_grid(0.0, 2.0, 17));
    for (std::size_t i = 0; i < c.t_grid.size(); ++i) {
        for (std::size_t j = 0; j < c.x_grid.size(); ++j) {
            c.at(i, j) = c.t_grid[i] + 3.0 * c.x_grid[j];
        }
    }
    SolutionField d(uniform_grid(0.0, 1.0, 9), uniform_grid(0.0, 2.0, 5));
    for (std::size_t i = 0; i < d.t_grid.size(); ++i) {
        for (std::size_t j = 0; j < d.x_grid.size(); ++j) {
            d.at(i, j) = d.t_grid[i] + 3.0 * d.x_grid[j];
        }
    }
    CHECK_THROWS_AS(compare(c, d), GridError);
    r = compare(c, d, true);
    CHECK(r.resampled);
    CHECK(r.points == 5 * 5);
    CHECK(r.l_inf <= 1e-15);

    SolutionField e(uniform_grid(5.0, 6.0, 3), uniform_grid(0.0, 2.0, 5));
    CHECK_THROWS_WITH_AS(compare(c, e, true), doctest::Contains("disjoint"), GridError);
}
