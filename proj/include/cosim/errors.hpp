#pragma once

#include <stdexcept>
#include <string>

namespace cosim {

// Bad input: malformed CSV, invalid config, out-of-range argument.
// The CLI maps this to exit code 1.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure while running: I/O trouble, internal inconsistency.
// The CLI maps this to exit code 2.
struct RuntimeError : std::runtime_error {
    explicit RuntimeError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cosim
