#include "delaywave/format.hpp"

#include <array>
#include <charconv>

namespace delaywave {

std::string format_double(double value) {
    if (value == 0.0) {
        return "0";  // folds -0 so outputs stay byte-stable
    }
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), end);
}

}  // namespace delaywave
