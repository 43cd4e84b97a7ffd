#pragma once

#include <stdexcept>
#include <string>

namespace muskat {

// Bad input: maps to CLI exit code 2.
class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical breakdown (NaN, dt underflow, divergent series).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidArgument(msg);
}

}  // namespace muskat
