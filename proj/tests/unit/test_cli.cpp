#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "delaywave/cli.hpp"
#include "delaywave/delay_trig.hpp"
#include "delaywave/error.hpp"
#include "delaywave/solution_field.hpp"

using namespace delaywave;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("delaywave-cli-" + std::to_string(std::rand()) + "-" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "delaywave");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    CliRun r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

SolutionField field_of(const Artifacts& a) {
    std::istringstream in(a.file("eta.csv"));
    return read_field_csv(in);
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

RunConfig small(const std::string& preset) {
    auto cfg = load_preset(preset);
    cfg.grid.dt = cfg.problem.tau / 20.0;
    cfg.grid.nx = 31;
    return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config_text(R"ini([problem]
; comment line
a = 2
tau = 0.25
T = 0.75
psi = "x * (1 - x) * cos(t)"
theta1 = 0

[solver]
modes = 12
analysis_rule = composite-simpson

[oracle]
scheme = sine-spectral

[diagnostics]
probe_t_star = 0.1
)ini");
    CHECK(cfg.problem.a == 2.0);
    CHECK(cfg.problem.tau == 0.25);
    CHECK(cfg.problem.psi == "x * (1 - x) * cos(t)");
    CHECK(cfg.problem.theta1 == "0");
    CHECK(cfg.solver.modes == 12);
    CHECK(cfg.solver.analysis_rule == QuadratureRule::composite_simpson);
    CHECK(cfg.oracle.scheme == SpatialScheme::sine_spectral);
    CHECK(cfg.probe_t_star() == 0.1);
    CHECK(load_preset("mode1").probe_t_star() == 0.25);

    const auto again = parse_config_text(cfg.to_ini());
    CHECK(again.to_ini() == cfg.to_ini());
}

TEST_CASE("config errors") {
    auto bad = [](const std::string& text) { return parse_config_text(text); };
    CHECK_THROWS_AS(bad("[problem]\nfoo = 1\n"), ConfigError);
    CHECK_THROWS_AS(bad("[nowhere]\na = 1\n"), ConfigError);
    CHECK_THROWS_AS(bad("a = 1\n"), ConfigError);
    CHECK_THROWS_AS(bad("[problem]\na = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(bad("[problem]\na = one\n"), ConfigError);
    CHECK_THROWS_AS(bad("[problem]\na = -1\n"), ConfigError);
    CHECK_THROWS_AS(bad("[solver]\nmodes = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(bad("[grid]\nnx = 8\n"), ConfigError);
    CHECK_THROWS_AS(bad("[problem]\ntheta1 = \"x\"\n"), ConfigError);
    CHECK_THROWS_AS(bad("[oracle]\nscheme = upwind\n"), ConfigError);
    CHECK_THROWS_AS(bad("[diagnostics]\nprobe_t_star = 5\n"), ConfigError);
    CHECK_THROWS_AS(load_preset("nope"), ConfigError);
    try {
        bad("[problem]\npsi = \"sin(x) + * 2\"\n");
        FAIL("expected a parse error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("problem.psi") != std::string::npos);
        CHECK(std::string(e.what()).find("column 10") != std::string::npos);
    }
}

TEST_CASE("every preset parses") {
    const auto names = preset_names();
    CHECK(names == std::vector<std::string>{"zero", "mode1", "smooth-compatible", "drifted", "rough"});
    for (const auto& n : names) {
        CHECK_NOTHROW(load_preset(n));
    }
}

TEST_CASE("solve on the zero preset writes zeros") {
    const auto a = cmd_solve(small("zero"));
    const auto field = field_of(a);
    CHECK(field.max_abs() == 0.0);
    CHECK(a.file("eta.csv").rfind("t,x,eta\n", 0) == 0);
    CHECK(a.file("report.json").find("\"method\": \"series\"") != std::string::npos);
}

TEST_CASE("solve on mode1 is the single delay-cosine mode") {
    const auto cfg = load_preset("mode1");
    const auto field = field_of(cmd_solve(cfg));
    const auto k = DelayKernelParams::make(1.0, cfg.problem.tau);
    double err = 0.0;
    for (std::size_t i = 0; i < field.t_grid.size(); ++i) {
        for (std::size_t j = 0; j < field.x_grid.size(); ++j) {
            const double exact = delay_cos(k, field.t_grid[i]) * std::sin(field.x_grid[j]);
            err = std::max(err, std::abs(field.at(i, j) - exact));
        }
    }
    CHECK(err <= 1e-6);
}

TEST_CASE("oracle agrees with the series on mode1") {
    const auto cfg = load_preset("mode1");
    const auto r = compare(field_of(cmd_solve(cfg)), field_of(cmd_oracle(cfg)));
    CHECK(r.l_inf <= 1e-4);
}

TEST_CASE("compatibility gate") {
    const auto cfg = small("rough");
    CHECK_THROWS_AS(cmd_solve(cfg), CompatibilityError);
    RunOptions opts;
    opts.allow_incompatible = true;
    const auto a = cmd_diagnose(cfg, opts);
    CHECK(a.file("report.json").find("overridden") != std::string::npos);
}

TEST_CASE("probe on zero data") {
    const auto a = cmd_probe(small("zero"));
    std::istringstream energy(a.file("energy.csv"));
    std::string line;
    std::getline(energy, line);
    CHECK(line == "t,energy,bound");
    int rows = 0;
    while (std::getline(energy, line)) {
        CHECK(line.substr(line.find(',')) == ",0,0");
        ++rows;
    }
    CHECK(rows == 41);
    std::istringstream probe(a.file("probe.csv"));
    std::getline(probe, line);
    while (std::getline(probe, line)) {
        CHECK(line.substr(line.rfind(',')) == ",0");
    }
}

TEST_CASE("command line exit codes and artifacts") {
    TempDir tmp;
    const auto out = tmp.path / "mode1";
    auto r = run({"solve", "--preset", "mode1", "--nx", "31", "--dt", "0.025", "--out", out.string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(out / "eta.csv"));
    CHECK(fs::exists(out / "modes.csv"));
    CHECK(fs::exists(out / "report.json"));
    for (const auto& e : fs::directory_iterator(out)) {
        CHECK(e.path().filename().string().front() != '.');
    }

    r = run({"compare", out.string(), out.string(), "--tol", "1e-14"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"l_inf\": 0.0") != std::string::npos);

    r = run({"oracle", "--preset", "mode1", "--dt", "0.003", "--out", (tmp.path / "dt").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("does not divide") != std::string::npos);
    CHECK_FALSE(fs::exists(tmp.path / "dt"));

    write_text(tmp.path / "bad.ini", "[problem]\npsi = \"sin(x\"\n");
    r = run({"solve", "--config", (tmp.path / "bad.ini").string(), "--out", (tmp.path / "bad").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("column 6") != std::string::npos);
    CHECK_FALSE(fs::exists(tmp.path / "bad"));

    write_text(tmp.path / "osc.ini", "[problem]\na = 0.1\nd = 1\n");
    r = run({"solve", "--config", (tmp.path / "osc.ini").string(), "--out", (tmp.path / "osc").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("oscillation condition violated") != std::string::npos);

    r = run({"solve", "--preset", "rough", "--out", (tmp.path / "rough").string()});
    CHECK(r.code == 3);
    CHECK_FALSE(fs::exists(tmp.path / "rough"));

    const auto coarse = tmp.path / "coarse";
    r = run({"solve", "--preset", "mode1", "--nx", "16", "--dt", "0.025", "--out", coarse.string()});
    REQUIRE(r.code == 0);
    r = run({"compare", out.string(), coarse.string()});
    CHECK(r.code == 2);
    r = run({"compare", out.string(), coarse.string(), "--resample", "--out", (tmp.path / "cmp").string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(tmp.path / "cmp" / "compare.json"));

    r = run({"solve"});
    CHECK(r.code == 2);
    r = run({"frobnicate"});
    CHECK(r.code == 2);
}
