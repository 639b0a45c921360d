#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "delaywave/config.hpp"
#include "delaywave/error.hpp"

namespace delaywave {

namespace {

constexpr std::string_view zero_preset = R"ini([problem]
a = 1
l = 1
tau = 0.5
T = 1
psi = "0"

[grid]
dt = 0.0025
nx = 127
)ini";

// Single sine mode; with l = pi and a = 1 the mode frequency is 1.
constexpr std::string_view mode1_preset = R"ini([problem]
a = 1
l = 3.141592653589793
tau = 0.5
T = 1
psi = "sin(x)"

[grid]
dt = 0.0025
nx = 127
)ini";

// History = boundary interpolant + cos(t) p(x), where p and its even
// derivatives up to order six vanish at both ends, so the homogenized history has
// fast-decaying sine coefficients. g = 0 and G is affine in t.
constexpr std::string_view smooth_preset = R"ini([problem]
a = 0.5
l = 1
tau = 0.5
T = 1
theta1 = "1 + 0.5 * t"
theta2 = "1 - 0.25 * t"
psi = "(1 - x) * (1 + 0.5 * t) + x * (1 - 0.25 * t) + cos(t) * (x^8 - 4*x^7 + 14*x^5 - 28*x^3 + 17*x) / 5.41015625"
g = "0"

[solver]
modes = 40

[grid]
dt = 0.0025
nx = 127
)ini";

// b = 0.3 gives beta = b / (2 a^2) = 0.6 and c = d - b^2 / (4 a^2) = 0.01.
// The data are exp(-0.6 x) times transformed data with boundary values
// 0.2 + 0.1 t and 0.1 - 0.05 t, history G + cos(t) p(x) and forcing
// 0.5 exp(-t) sin(pi x) - c G(t - tau), so that the homogenized forcing is
// a single sine mode.
constexpr std::string_view drifted_preset = R"ini([problem]
a = 0.5
b = 0.3
d = 0.1
l = 1
tau = 0.5
T = 1
theta1 = "0.2 + 0.1 * t"
theta2 = "exp(-0.6) * (0.1 - 0.05 * t)"
psi = "exp(-0.6 * x) * ((1 - x) * (0.2 + 0.1 * t) + x * (0.1 - 0.05 * t) + cos(t) * (x^8 - 4*x^7 + 14*x^5 - 28*x^3 + 17*x) / 5.41015625)"
g = "exp(-0.6 * x) * (0.5 * exp(-t) * sin(pi * x) - 0.01 * ((1 - x) * (0.15 + 0.1 * t) + x * (0.125 - 0.05 * t)))"

[solver]
modes = 40

[grid]
dt = 0.0025
nx = 127
)ini";

// The history does not vanish at x = 0 while theta1 does.
constexpr std::string_view rough_preset = R"ini([problem]
a = 0.5
l = 1
tau = 0.5
T = 1
psi = "(1 - x) * cos(t)"

[solver]
modes = 40

[grid]
dt = 0.0025
nx = 127
)ini";

constexpr std::array<std::pair<std::string_view, std::string_view>, 5> presets = {{
    {"zero", zero_preset},
    {"mode1", mode1_preset},
    {"smooth-compatible", smooth_preset},
    {"drifted", drifted_preset},
    {"rough", rough_preset},
}};

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [name, text] : presets) {
        out.emplace_back(name);
    }
    return out;
}

std::string preset_text(std::string_view name) {
    for (const auto& [n, text] : presets) {
        if (n == name) {
            return std::string(text);
        }
    }
    std::string known;
    for (const auto& [n, text] : presets) {
        known += (known.empty() ? "" : ", ") + std::string(n);
    }
    throw ConfigError("config: unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

RunConfig load_preset(std::string_view name) {
    return parse_config_text(preset_text(name), "preset " + std::string(name));
}

}  // namespace delaywave
