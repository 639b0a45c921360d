#include "delaywave/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "delaywave/error.hpp"
#include "delaywave/exprlang.hpp"
#include "delaywave/format.hpp"

namespace delaywave {

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

double parse_real(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError("config: " + key + ": expected a finite number, got '" + text + "'");
    }
    return v;
}

int parse_int(const std::string& key, const std::string& text) {
    int v = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("config: " + key + ": expected an integer, got '" + text + "'");
    }
    return v;
}

std::string unquote(const std::string& text) {
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
        return text.substr(1, text.size() - 2);
    }
    return text;
}

template <class E, class Parse>
E parse_enum(const std::string& key, const std::string& text, Parse parse) {
    try {
        return parse(unquote(text));
    } catch (const Error& e) {
        throw ConfigError("config: " + key + ": " + e.what());
    }
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"problem.a", [](RunConfig& c, const std::string& v) { c.problem.a = parse_real("problem.a", v); }},
        {"problem.b", [](RunConfig& c, const std::string& v) { c.problem.b = parse_real("problem.b", v); }},
        {"problem.d", [](RunConfig& c, const std::string& v) { c.problem.d = parse_real("problem.d", v); }},
        {"problem.l", [](RunConfig& c, const std::string& v) { c.problem.l = parse_real("problem.l", v); }},
        {"problem.tau", [](RunConfig& c, const std::string& v) { c.problem.tau = parse_real("problem.tau", v); }},
        {"problem.T", [](RunConfig& c, const std::string& v) { c.problem.T = parse_real("problem.T", v); }},
        {"problem.psi", [](RunConfig& c, const std::string& v) { c.problem.psi = unquote(v); }},
        {"problem.theta1", [](RunConfig& c, const std::string& v) { c.problem.theta1 = unquote(v); }},
        {"problem.theta2", [](RunConfig& c, const std::string& v) { c.problem.theta2 = unquote(v); }},
        {"problem.g", [](RunConfig& c, const std::string& v) { c.problem.g = unquote(v); }},
        {"solver.modes", [](RunConfig& c, const std::string& v) { c.solver.modes = parse_int("solver.modes", v); }},
        {"solver.analysis_rule",
         [](RunConfig& c, const std::string& v) {
             c.solver.analysis_rule = parse_enum<QuadratureRule>("solver.analysis_rule", v, parse_quadrature_rule);
         }},
        {"solver.analysis_panels",
         [](RunConfig& c, const std::string& v) { c.solver.analysis_panels = parse_int("solver.analysis_panels", v); }},
        {"solver.time_rule",
         [](RunConfig& c, const std::string& v) {
             c.solver.time_rule = parse_enum<QuadratureRule>("solver.time_rule", v, parse_quadrature_rule);
         }},
        {"solver.time_panels",
         [](RunConfig& c, const std::string& v) { c.solver.time_panels = parse_int("solver.time_panels", v); }},
        {"solver.history_points",
         [](RunConfig& c, const std::string& v) { c.solver.history_points = parse_int("solver.history_points", v); }},
        {"solver.forcing_points",
         [](RunConfig& c, const std::string& v) { c.solver.forcing_points = parse_int("solver.forcing_points", v); }},
        {"solver.tail_tolerance",
         [](RunConfig& c, const std::string& v) { c.solver.tail_tolerance = parse_real("solver.tail_tolerance", v); }},
        {"grid.dt", [](RunConfig& c, const std::string& v) { c.grid.dt = parse_real("grid.dt", v); }},
        {"grid.nx", [](RunConfig& c, const std::string& v) { c.grid.nx = parse_int("grid.nx", v); }},
        {"oracle.scheme",
         [](RunConfig& c, const std::string& v) {
             c.oracle.scheme = parse_enum<SpatialScheme>("oracle.scheme", v, parse_spatial_scheme);
         }},
        {"diagnostics.alpha",
         [](RunConfig& c, const std::string& v) { c.diagnostics.alpha = parse_real("diagnostics.alpha", v); }},
        {"diagnostics.xnorm_modes",
         [](RunConfig& c, const std::string& v) { c.diagnostics.xnorm_modes = parse_int("diagnostics.xnorm_modes", v); }},
        {"diagnostics.probe_t_star",
         [](RunConfig& c, const std::string& v) { c.diagnostics.probe_t_star = parse_real("diagnostics.probe_t_star", v); }},
        {"diagnostics.probe_modes",
         [](RunConfig& c, const std::string& v) { c.diagnostics.probe_modes = parse_int("diagnostics.probe_modes", v); }},
        {"diagnostics.compatibility_tolerance",
         [](RunConfig& c, const std::string& v) {
             c.diagnostics.compatibility_tolerance = parse_real("diagnostics.compatibility_tolerance", v);
         }},
        {"output.directory", [](RunConfig& c, const std::string& v) { c.output.directory = unquote(v); }},
    };
    return table;
}

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw ConfigError("config: " + message);
    }
}

void require_range(int v, int lo, int hi, const std::string& key) {
    require(v >= lo && v <= hi, key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                    "], got " + std::to_string(v));
}

void require_positive(double v, const std::string& key) {
    require(v > 0.0 && std::isfinite(v), key + " must be finite and > 0, got " + format_double(v));
}

DataFunction data_function(const std::string& key, const std::string& source) {
    try {
        return DataFunction::from_expression(source);
    } catch (const expr::ParseError& e) {
        throw ConfigError("config: " + key + " = \"" + source + "\": " + e.what());
    }
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

void RunConfig::validate() const {
    require_positive(problem.a, "problem.a");
    require_positive(problem.l, "problem.l");
    require_positive(problem.tau, "problem.tau");
    require_positive(problem.T, "problem.T");
    require(std::isfinite(problem.b) && std::isfinite(problem.d), "problem.b and problem.d must be finite");
    for (const auto& [key, src] : {std::pair{"problem.psi", &problem.psi}, std::pair{"problem.theta1", &problem.theta1},
                                   std::pair{"problem.theta2", &problem.theta2}, std::pair{"problem.g", &problem.g}}) {
        const auto f = data_function(key, *src);
        if ((std::string_view(key) == "problem.theta1" || std::string_view(key) == "problem.theta2") &&
            f.depends_on_x()) {
            throw ConfigError(std::string("config: ") + key + " must not depend on x");
        }
    }
    require_range(solver.modes, 1, 4096, "solver.modes");
    require_range(solver.analysis_panels, 4, 1 << 20, "solver.analysis_panels");
    require_range(solver.time_panels, 4, 1 << 20, "solver.time_panels");
    require_range(solver.history_points, 3, 513, "solver.history_points");
    require_range(solver.forcing_points, 3, 513, "solver.forcing_points");
    require_positive(solver.tail_tolerance, "solver.tail_tolerance");
    require_positive(grid.dt, "grid.dt");
    require_range(grid.nx, 16, 8191, "grid.nx");
    require(diagnostics.alpha >= 0.0 && std::isfinite(diagnostics.alpha), "diagnostics.alpha must be >= 0");
    require_range(diagnostics.xnorm_modes, 16, 8191, "diagnostics.xnorm_modes");
    require_range(diagnostics.probe_modes, 1, 1 << 20, "diagnostics.probe_modes");
    require(diagnostics.probe_t_star == 0.0 ||
                (diagnostics.probe_t_star > 0.0 && diagnostics.probe_t_star <= 2.0 * problem.tau),
            "diagnostics.probe_t_star must be 0 (tau / 2) or lie in (0, 2 tau]");
    require_positive(diagnostics.compatibility_tolerance, "diagnostics.compatibility_tolerance");
    require(!output.directory.empty(), "output.directory must not be empty");
}

ProblemSpec RunConfig::problem_spec() const {
    ProblemSpec s;
    s.a = problem.a;
    s.b = problem.b;
    s.d = problem.d;
    s.l = problem.l;
    s.tau = problem.tau;
    s.T = problem.T;
    s.psi = data_function("problem.psi", problem.psi);
    s.theta1 = data_function("problem.theta1", problem.theta1);
    s.theta2 = data_function("problem.theta2", problem.theta2);
    s.g = data_function("problem.g", problem.g);
    return s;
}

SpectralSettings RunConfig::spectral_settings() const {
    SpectralSettings s;
    s.modes = solver.modes;
    s.analysis = {solver.analysis_rule, solver.analysis_panels};
    s.time = {solver.time_rule, solver.time_panels};
    s.history_points = solver.history_points;
    s.forcing_points = solver.forcing_points;
    s.tail_tolerance = solver.tail_tolerance;
    return s;
}

StepGrid RunConfig::step_grid() const { return StepGrid{grid.nx, grid.dt, oracle.scheme}; }

double RunConfig::probe_t_star() const {
    return diagnostics.probe_t_star == 0.0 ? problem.tau / 2.0 : diagnostics.probe_t_star;
}

std::string RunConfig::to_ini() const {
    std::ostringstream out;
    auto num = [](double v) { return format_double(v); };
    out << "[problem]\n"
        << "a = " << num(problem.a) << "\n"
        << "b = " << num(problem.b) << "\n"
        << "d = " << num(problem.d) << "\n"
        << "l = " << num(problem.l) << "\n"
        << "tau = " << num(problem.tau) << "\n"
        << "T = " << num(problem.T) << "\n"
        << "psi = " << quoted(problem.psi) << "\n"
        << "theta1 = " << quoted(problem.theta1) << "\n"
        << "theta2 = " << quoted(problem.theta2) << "\n"
        << "g = " << quoted(problem.g) << "\n\n"
        << "[solver]\n"
        << "modes = " << solver.modes << "\n"
        << "analysis_rule = " << to_string(solver.analysis_rule) << "\n"
        << "analysis_panels = " << solver.analysis_panels << "\n"
        << "time_rule = " << to_string(solver.time_rule) << "\n"
        << "time_panels = " << solver.time_panels << "\n"
        << "history_points = " << solver.history_points << "\n"
        << "forcing_points = " << solver.forcing_points << "\n"
        << "tail_tolerance = " << num(solver.tail_tolerance) << "\n\n"
        << "[grid]\n"
        << "dt = " << num(grid.dt) << "\n"
        << "nx = " << grid.nx << "\n\n"
        << "[oracle]\n"
        << "scheme = " << to_string(oracle.scheme) << "\n\n"
        << "[diagnostics]\n"
        << "alpha = " << num(diagnostics.alpha) << "\n"
        << "xnorm_modes = " << diagnostics.xnorm_modes << "\n"
        << "probe_t_star = " << num(diagnostics.probe_t_star) << "\n"
        << "probe_modes = " << diagnostics.probe_modes << "\n"
        << "compatibility_tolerance = " << num(diagnostics.compatibility_tolerance) << "\n\n"
        << "[output]\n"
        << "directory = " << quoted(output.directory) << "\n";
    return out.str();
}

RunConfig parse_config(std::istream& in, const std::string& source) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config: " + source + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    RunConfig cfg;
    const auto& table = setters();
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            throw ConfigError("config: " + source + ": key '" + section + "' outside of a section");
        }
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            const auto it = table.find(full);
            if (it == table.end()) {
                throw ConfigError("config: " + source + ": unknown setting [" + section + "] " + key);
            }
            if (!value.empty()) {
                throw ConfigError("config: " + source + ": malformed setting " + full);
            }
            it->second(cfg, value.data());
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config_text(std::string_view text, const std::string& source) {
    std::istringstream in{std::string(text)};
    return parse_config(in, source);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path.string());
    }
    return parse_config(in, path.string());
}

}  // namespace delaywave
