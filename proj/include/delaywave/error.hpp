#pragma once

#include <stdexcept>
#include <string>

namespace delaywave {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid arguments or violated preconditions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A delay-trig term exceeded the magnitude guard on the given segment.
class OverflowError : public Error {
public:
    OverflowError(int segment, const std::string& what)
        : Error(what), segment_(segment) {}
    int segment() const noexcept { return segment_; }

private:
    int segment_;
};

// (pi a / l)^2 <= c: the modal frequencies are not all real and positive.
class OscillationConditionError : public Error {
public:
    using Error::Error;
};

// Time step or spatial grid does not satisfy a structural requirement.
class GridError : public Error {
public:
    using Error::Error;
};

// Data functions violate the order-zero compatibility conditions.
class CompatibilityError : public Error {
public:
    using Error::Error;
};

// Malformed or out-of-range run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace delaywave
