#include "delaywave/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <ostream>
#include <sstream>

#include "delaywave/error.hpp"
#include "delaywave/exprlang.hpp"
#include "delaywave/format.hpp"
#include "delaywave/oracle.hpp"
#include "delaywave/spectral.hpp"
#include "delaywave/stability.hpp"

namespace delaywave {

namespace {

using json = nlohmann::ordered_json;

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json config_json(const RunConfig& cfg) {
    json j;
    j["problem"] = {{"a", cfg.problem.a},           {"b", cfg.problem.b},
                    {"d", cfg.problem.d},           {"l", cfg.problem.l},
                    {"tau", cfg.problem.tau},       {"T", cfg.problem.T},
                    {"psi", cfg.problem.psi},       {"theta1", cfg.problem.theta1},
                    {"theta2", cfg.problem.theta2}, {"g", cfg.problem.g}};
    j["solver"] = {{"modes", cfg.solver.modes},
                   {"analysis_rule", to_string(cfg.solver.analysis_rule)},
                   {"analysis_panels", cfg.solver.analysis_panels},
                   {"time_rule", to_string(cfg.solver.time_rule)},
                   {"time_panels", cfg.solver.time_panels},
                   {"history_points", cfg.solver.history_points},
                   {"forcing_points", cfg.solver.forcing_points},
                   {"tail_tolerance", cfg.solver.tail_tolerance}};
    j["grid"] = {{"dt", cfg.grid.dt}, {"nx", cfg.grid.nx}};
    j["oracle"] = {{"scheme", to_string(cfg.oracle.scheme)}};
    j["diagnostics"] = {{"alpha", cfg.diagnostics.alpha},
                        {"xnorm_modes", cfg.diagnostics.xnorm_modes},
                        {"probe_t_star", cfg.probe_t_star()},
                        {"probe_modes", cfg.diagnostics.probe_modes},
                        {"compatibility_tolerance", cfg.diagnostics.compatibility_tolerance}};
    return j;
}

json compatibility_json(const CompatibilityReport& r) {
    return {{"max_violation_left", r.max_violation_left},
            {"max_violation_right", r.max_violation_right},
            {"tolerance", r.tolerance},
            {"pass", r.pass}};
}

json transform_json(const TransformedProblem& tp) {
    const double k = std::numbers::pi * tp.a / tp.l;
    return {{"beta", tp.beta}, {"c", tp.c}, {"oscillation_margin", k * k - tp.c}};
}

json fit_json(const DecayFit& f) {
    return {{"exponent", f.exponent}, {"std_error", f.std_error}, {"required", f.required},
            {"points", f.points},     {"underflow", f.underflow}, {"pass", f.pass}};
}

json decay_json(const DecayReport& r) {
    json forcing = json::array();
    for (const auto& f : r.forcing) {
        forcing.push_back(fit_json(f));
    }
    return {{"m", r.m},
            {"alpha", r.alpha},
            {"history", fit_json(r.history)},
            {"ddphi", fit_json(r.ddphi)},
            {"forcing", forcing},
            {"pass", r.pass}};
}

struct Prepared {
    ProblemSpec spec;
    CompatibilityReport compatibility;
    TransformedProblem tp;
    LiftedData lifted;
    std::vector<std::string> warnings;
};

Prepared prepare(const RunConfig& cfg, const RunOptions& opts, bool need_oscillation) {
    cfg.validate();
    Prepared p;
    p.spec = cfg.problem_spec();
    p.compatibility = check_compatibility(p.spec, cfg.diagnostics.compatibility_tolerance);
    if (!p.compatibility.pass) {
        const std::string detail = "history and boundary data disagree on [-tau, 0] (max violation " +
                                   format_double(p.compatibility.max_violation_left) + " at x = 0, " +
                                   format_double(p.compatibility.max_violation_right) + " at x = l)";
        if (!opts.allow_incompatible) {
            throw CompatibilityError("compatibility check failed: " + detail +
                                     "; pass --allow-incompatible to proceed");
        }
        p.warnings.push_back("compatibility check failed and was overridden: " + detail);
    }
    for (const auto* f : {&p.spec.psi, &p.spec.theta1, &p.spec.theta2, &p.spec.g}) {
        if (f->abs_differentiated()) {
            p.warnings.push_back("derivative of abs() taken through sign() in '" + f->description() + "'");
        }
    }
    p.tp = to_selfadjoint(p.spec);
    if (need_oscillation) {
        require_oscillation_condition(p.tp);
    }
    p.lifted = build_lifting(p.tp);
    return p;
}

std::vector<double> output_x_grid(const RunConfig& cfg) {
    return uniform_grid(0.0, cfg.problem.l, cfg.grid.nx + 2);
}

std::string field_csv(const SolutionField& field) {
    std::ostringstream out;
    write_field_csv(out, field);
    return out.str();
}

json warnings_json(const std::vector<std::string>& a, const std::vector<std::string>& b = {}) {
    json out = json::array();
    for (const auto& w : a) {
        out.push_back(w);
    }
    for (const auto& w : b) {
        out.push_back(w);
    }
    return out;
}

SolutionField read_run(const std::filesystem::path& run) {
    const auto path = std::filesystem::is_directory(run) ? run / "eta.csv" : run;
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("compare: cannot open " + path.string());
    }
    return read_field_csv(in);
}

void apply_overrides(RunConfig& cfg, const CLI::App& sub, int modes, double dt, int nx, double alpha) {
    if (sub.count("--modes") > 0) {
        cfg.solver.modes = modes;
    }
    if (sub.count("--dt") > 0) {
        cfg.grid.dt = dt;
    }
    if (sub.count("--nx") > 0) {
        cfg.grid.nx = nx;
    }
    if (sub.count("--alpha") > 0) {
        cfg.diagnostics.alpha = alpha;
    }
    cfg.validate();
}

}  // namespace

const std::string& Artifacts::file(const std::string& name) const {
    for (const auto& [n, content] : files) {
        if (n == name) {
            return content;
        }
    }
    throw InvalidArgument("no artifact named " + name);
}

Artifacts cmd_solve(const RunConfig& cfg, const RunOptions& opts) {
    auto p = prepare(cfg, opts, true);
    const auto settings = cfg.spectral_settings();
    const int steps = cfg.step_grid().steps_per_tau(cfg.problem.tau);
    const auto modes = build_modes(p.tp, p.lifted, settings);
    AssemblyReport assembly;
    const auto t_grid = delay_time_grid(cfg.problem.tau, steps, cfg.problem.T);
    const auto field = assemble_solution(modes, p.lifted, [&](double x) { return p.tp.back_factor(x); }, t_grid,
                                         output_x_grid(cfg), settings, &assembly);

    json decay = nullptr;
    if (static_cast<int>(modes.size()) >= 8) {
        const auto d = decay_diagnostics(modes, cfg.problem.T, cfg.diagnostics.alpha);
        decay = decay_json(d);
        if (!d.pass) {
            p.warnings.push_back("decay conditions not met (history exponent " + format_double(d.history.exponent) +
                                 ", required " + format_double(d.history.required) +
                                 "); the truncated series may not approximate a classical solution");
        }
    } else {
        p.warnings.push_back("decay diagnostics skipped: fewer than 8 modes");
    }

    std::ostringstream modes_csv;
    modes_csv << "n,omega,phi_minus_tau,dphi_minus_tau,max_ddphi,max_forcing,coefficient_T\n";
    for (const auto& m : modes) {
        modes_csv << m.n << ',' << format_double(m.omega) << ',' << format_double(m.phi_minus_tau) << ','
                  << format_double(m.dphi_minus_tau) << ',' << format_double(m.ddphi.max_abs_sample()) << ','
                  << format_double(m.forcing.empty() ? 0.0 : m.forcing.max_abs_sample()) << ','
                  << format_double(m.coefficient(cfg.problem.T)) << '\n';
    }

    json report;
    report["command"] = "solve";
    report["method"] = field.method;
    report["settings"] = field.settings;
    report["config"] = config_json(cfg);
    report["compatibility"] = compatibility_json(p.compatibility);
    report["transform"] = transform_json(p.tp);
    report["grid"] = {{"t_points", field.t_grid.size()},
                      {"x_points", field.x_grid.size()},
                      {"t_min", field.t_grid.front()},
                      {"t_max", field.t_grid.back()}};
    report["tail"] = {{"max_tail_estimate", assembly.max_tail_estimate},
                      {"tolerance", settings.tail_tolerance},
                      {"quadrature_underresolved", assembly.quadrature_underresolved}};
    report["decay"] = decay;
    report["max_abs_eta"] = field.max_abs();
    report["warnings"] = warnings_json(p.warnings, field.warnings);

    Artifacts out;
    out.files.emplace_back("eta.csv", field_csv(field));
    out.files.emplace_back("modes.csv", modes_csv.str());
    out.files.emplace_back("report.json", dump(report));
    out.summary.push_back("solve: " + std::to_string(modes.size()) + " modes, " +
                          std::to_string(field.values.size()) + " points, max |eta| = " +
                          format_double(field.max_abs()) + ", tail estimate " +
                          format_double(assembly.max_tail_estimate));
    for (const auto& w : report["warnings"]) {
        out.summary.push_back("warning: " + w.get<std::string>());
    }
    return out;
}

Artifacts cmd_oracle(const RunConfig& cfg, const RunOptions& opts) {
    auto p = prepare(cfg, opts, false);
    if (cfg.oracle.scheme == SpatialScheme::sine_spectral &&
        !(p.spec.theta1.is_zero() && p.spec.theta2.is_zero())) {
        throw ConfigError("config: oracle.scheme = sine-spectral needs zero boundary data; "
                          "use central-2nd-order for this problem");
    }
    const auto result = steps_solve(StepProblem::original(p.spec), cfg.step_grid());

    json report;
    report["command"] = "oracle";
    report["method"] = result.field.method;
    report["settings"] = result.field.settings;
    report["config"] = config_json(cfg);
    report["compatibility"] = compatibility_json(p.compatibility);
    report["grid"] = {{"t_points", result.field.t_grid.size()},
                      {"x_points", result.field.x_grid.size()},
                      {"t_min", result.field.t_grid.front()},
                      {"t_max", result.field.t_grid.back()}};
    report["notes"] = warnings_json(result.notes);
    report["max_abs_eta"] = result.field.max_abs();
    report["warnings"] = warnings_json(p.warnings, result.field.warnings);

    Artifacts out;
    out.files.emplace_back("eta.csv", field_csv(result.field));
    out.files.emplace_back("report.json", dump(report));
    out.summary.push_back("oracle: " + std::string(to_string(cfg.oracle.scheme)) + ", " +
                          std::to_string(result.field.values.size()) + " points, max |eta| = " +
                          format_double(result.field.max_abs()));
    for (const auto& w : report["warnings"]) {
        out.summary.push_back("warning: " + w.get<std::string>());
    }
    return out;
}

Artifacts cmd_compare(const std::filesystem::path& run_a, const std::filesystem::path& run_b, bool resample,
                      double tol) {
    const auto a = read_run(run_a);
    const auto b = read_run(run_b);
    const auto r = compare(a, b, resample);
    json report;
    report["command"] = "compare";
    report["run_a"] = run_a.string();
    report["run_b"] = run_b.string();
    report["resampled"] = r.resampled;
    report["points"] = r.points;
    report["l_inf"] = r.l_inf;
    report["l2"] = r.l2;
    report["rel_l_inf"] = r.rel_l_inf;
    report["worst"] = {{"t", r.worst_t}, {"x", r.worst_x}};
    if (tol > 0.0) {
        report["tolerance"] = tol;
        report["pass"] = r.l_inf <= tol;
    }
    Artifacts out;
    out.files.emplace_back("compare.json", dump(report));
    out.summary.push_back("compare: l_inf = " + format_double(r.l_inf) + ", l2 = " + format_double(r.l2) +
                          ", rel l_inf = " + format_double(r.rel_l_inf) + " over " + std::to_string(r.points) +
                          " points");
    if (tol > 0.0 && !(r.l_inf <= tol)) {
        out.exit_code = 4;
        out.summary.push_back("compare: l_inf exceeds tolerance " + format_double(tol));
    }
    return out;
}

Artifacts cmd_probe(const RunConfig& cfg, const RunOptions& opts) {
    auto p = prepare(cfg, opts, true);
    const double t_star = cfg.probe_t_star();
    const auto table = illposedness_probe(p.tp, t_star, cfg.diagnostics.probe_modes);

    const auto history = sine_coefficients([&](double x) { return p.lifted.Phi(-cfg.problem.tau, x); },
                                           cfg.problem.l, std::max<int>(1, static_cast<int>(table.rows.size())),
                                           cfg.spectral_settings().analysis);
    std::ostringstream probe_csv;
    probe_csv << "n,omega,amplification,classical_term,x_term,damped_x_term,data_response\n";
    double max_response = 0.0;
    for (const auto& row : table.rows) {
        const double response = row.amplification * std::abs(history[row.n - 1]);
        max_response = std::max(max_response, response);
        probe_csv << row.n << ',' << format_double(row.omega) << ',' << format_double(row.amplification) << ','
                  << format_double(row.classical_term) << ',' << format_double(row.x_term) << ','
                  << format_double(row.damped_x_term) << ',' << format_double(response) << '\n';
    }

    StepGrid grid = cfg.step_grid();
    const auto steps = steps_solve(StepProblem::homogenized(p.tp, p.lifted), grid);
    const int xmodes = std::min(cfg.diagnostics.xnorm_modes, grid.nx);
    const auto traj = modal_trajectory(steps, p.lifted.F, cfg.problem.l, cfg.problem.tau, xmodes);
    const double C_A = operator_norm_surrogate(p.tp.a, 0.0, p.tp.c);
    const auto trace = energy_trace(traj, C_A);
    std::ostringstream energy_csv;
    energy_csv << "t,energy,bound\n";
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
        energy_csv << format_double(trace.t[i]) << ',' << format_double(trace.energy[i]) << ','
                   << format_double(trace.bound[i]) << '\n';
    }

    const auto& rows = table.rows;
    json report;
    report["command"] = "probe";
    report["config"] = config_json(cfg);
    report["transform"] = transform_json(p.tp);
    report["probe"] = {{"t_star", t_star},
                       {"m", table.m},
                       {"modes", rows.size()},
                       {"truncated", table.truncated},
                       {"truncated_at", table.truncated_at},
                       {"monotone_from", table.monotone_from},
                       {"first_amplification", rows.empty() ? 0.0 : rows.front().amplification},
                       {"last_amplification", rows.empty() ? 0.0 : rows.back().amplification},
                       {"classical_sum", table.classical_sum},
                       {"x_sum", table.x_sum},
                       {"contrast", table.contrast},
                       {"max_data_response", max_response}};
    report["energy"] = {{"C_A", trace.C_A},
                        {"xnorm_modes", xmodes},
                        {"samples", trace.t.size()},
                        {"E0", trace.energy.empty() ? 0.0 : trace.energy.front()},
                        {"max_energy", trace.energy.empty() ? 0.0 : *std::max_element(trace.energy.begin(), trace.energy.end())},
                        {"min_margin", trace.min_margin},
                        {"pass", trace.pass}};
    report["warnings"] = warnings_json(p.warnings);

    Artifacts out;
    out.files.emplace_back("probe.csv", probe_csv.str());
    out.files.emplace_back("energy.csv", energy_csv.str());
    out.files.emplace_back("report.json", dump(report));
    out.summary.push_back("probe: t_star = " + format_double(t_star) + ", " + std::to_string(rows.size()) +
                          " modes, amplification monotone from n = " + std::to_string(table.monotone_from) +
                          (table.truncated ? " (table truncated by the magnitude guard)" : ""));
    out.summary.push_back(std::string("energy: ") + (trace.pass ? "bound holds" : "bound violated") +
                          ", min margin " + format_double(trace.min_margin));
    return out;
}

Artifacts cmd_diagnose(const RunConfig& cfg, const RunOptions& opts) {
    auto p = prepare(cfg, opts, true);
    const auto settings = cfg.spectral_settings();
    if (settings.modes < 8) {
        throw ConfigError("config: diagnose needs solver.modes >= 8");
    }
    const auto modes = build_modes(p.tp, p.lifted, settings);
    const auto decay = decay_diagnostics(modes, cfg.problem.T, cfg.diagnostics.alpha);

    std::ostringstream csv;
    csv << "n,history,ddphi";
    for (std::size_t k = 1; k <= decay.forcing_magnitude.size(); ++k) {
        csv << ",forcing_" << k;
    }
    csv << '\n';
    for (std::size_t i = 0; i < modes.size(); ++i) {
        csv << modes[i].n << ',' << format_double(decay.history_magnitude[i]) << ','
            << format_double(decay.ddphi_magnitude[i]);
        for (const auto& f : decay.forcing_magnitude) {
            csv << ',' << format_double(f[i]);
        }
        csv << '\n';
    }

    json report;
    report["command"] = "diagnose";
    report["config"] = config_json(cfg);
    report["compatibility"] = compatibility_json(p.compatibility);
    report["transform"] = transform_json(p.tp);
    report["decay"] = decay_json(decay);
    report["tail_estimate_T"] = tail_estimate(modes.back(), cfg.problem.T);
    report["warnings"] = warnings_json(p.warnings);

    Artifacts out;
    out.files.emplace_back("decay.csv", csv.str());
    out.files.emplace_back("report.json", dump(report));
    out.summary.push_back(std::string("diagnose: decay conditions ") + (decay.pass ? "hold" : "fail") +
                          " (history exponent " + format_double(decay.history.exponent) + ", required " +
                          format_double(decay.history.required) + ")");
    for (const auto& w : p.warnings) {
        out.summary.push_back("warning: " + w);
    }
    return out;
}

void write_artifacts(const std::filesystem::path& dir, const Artifacts& artifacts) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<fs::path> temps;
    try {
        for (const auto& [name, content] : artifacts.files) {
            const auto tmp = dir / ("." + name + ".partial");
            temps.push_back(tmp);
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << content;
            out.close();
            if (!out) {
                throw Error("cannot write " + tmp.string());
            }
        }
        for (std::size_t i = 0; i < temps.size(); ++i) {
            fs::rename(temps[i], dir / artifacts.files[i].first);
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& t : temps) {
            fs::remove(t, ec);
        }
        throw;
    }
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const CompatibilityError*>(&e) != nullptr) {
        return 3;
    }
    if (dynamic_cast<const ConfigError*>(&e) != nullptr || dynamic_cast<const GridError*>(&e) != nullptr ||
        dynamic_cast<const OscillationConditionError*>(&e) != nullptr ||
        dynamic_cast<const expr::ParseError*>(&e) != nullptr) {
        return 2;
    }
    return 1;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Wave equation with pure delay: series solution, method-of-steps oracle and diagnostics",
                 "delaywave"};
    app.require_subcommand(1);

    struct Common {
        std::string config;
        std::string preset;
        std::string out_dir;
        int modes = 0;
        double dt = 0.0;
        int nx = 0;
        double alpha = 0.0;
        bool allow_incompatible = false;
    };
    Common common;
    auto add_common = [&](CLI::App* sub) {
        auto* config = sub->add_option("--config", common.config, "Run configuration (INI)");
        auto* preset = sub->add_option("--preset", common.preset, "Shipped preset: zero, mode1, smooth-compatible, drifted, rough");
        config->excludes(preset);
        sub->add_option("--out", common.out_dir, "Output directory (overrides [output] directory)");
        sub->add_option("--modes", common.modes, "Truncation N");
        sub->add_option("--dt", common.dt, "Output / oracle time step; must divide tau");
        sub->add_option("--nx", common.nx, "Interior spatial points");
        sub->add_option("--alpha", common.alpha, "Decay-condition margin alpha");
        sub->add_flag("--allow-incompatible", common.allow_incompatible,
                      "Proceed when history and boundary data disagree");
    };
    auto* solve = app.add_subcommand("solve", "Series solution");
    auto* oracle = app.add_subcommand("oracle", "Method-of-steps reference solution");
    auto* probe = app.add_subcommand("probe", "Ill-posedness table and energy trace");
    auto* diagnose = app.add_subcommand("diagnose", "Compatibility, decay conditions and tail estimate");
    for (auto* sub : {solve, oracle, probe, diagnose}) {
        add_common(sub);
    }
    auto* cmp = app.add_subcommand("compare", "Compare eta.csv of two runs");
    std::string run_a;
    std::string run_b;
    bool resample = false;
    double tol = 0.0;
    cmp->add_option("run_a", run_a, "First run directory or CSV")->required();
    cmp->add_option("run_b", run_b, "Second run directory or CSV")->required();
    cmp->add_flag("--resample", resample, "Compare on the common grid by interpolation in x");
    cmp->add_option("--tol", tol, "Fail (exit 4) when l_inf exceeds this");
    cmp->add_option("--out", common.out_dir, "Directory for compare.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        Artifacts artifacts;
        std::filesystem::path dir;
        if (cmp->parsed()) {
            artifacts = cmd_compare(run_a, run_b, resample, tol);
            dir = common.out_dir;
        } else {
            CLI::App* sub = solve->parsed() ? solve : oracle->parsed() ? oracle : probe->parsed() ? probe : diagnose;
            if (common.config.empty() && common.preset.empty()) {
                throw ConfigError("config: one of --config or --preset is required");
            }
            RunConfig cfg = common.config.empty() ? load_preset(common.preset) : load_config(common.config);
            apply_overrides(cfg, *sub, common.modes, common.dt, common.nx, common.alpha);
            RunOptions opts;
            opts.allow_incompatible = common.allow_incompatible;
            if (sub == solve) {
                artifacts = cmd_solve(cfg, opts);
            } else if (sub == oracle) {
                artifacts = cmd_oracle(cfg, opts);
            } else if (sub == probe) {
                artifacts = cmd_probe(cfg, opts);
            } else {
                artifacts = cmd_diagnose(cfg, opts);
            }
            dir = common.out_dir.empty() ? std::filesystem::path(cfg.output.directory)
                                         : std::filesystem::path(common.out_dir);
        }
        if (!dir.empty()) {
            write_artifacts(dir, artifacts);
        } else {
            out << artifacts.files.front().second;
        }
        for (const auto& line : artifacts.summary) {
            out << line << '\n';
        }
        if (!dir.empty()) {
            out << "wrote";
            for (const auto& [name, content] : artifacts.files) {
                out << ' ' << (dir / name).string();
            }
            out << '\n';
        }
        return artifacts.exit_code;
    } catch (const std::exception& e) {
        err << "delaywave: error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace delaywave
