#pragma once

#include <stdexcept>
#include <string>

namespace emspec {

// Bad or missing input data: unreadable files, malformed rows, violated
// preconditions on user-supplied values. CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical routine failed to converge or hit a degenerate configuration
// it cannot recover from. CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace emspec
