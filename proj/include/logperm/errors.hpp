#pragma once
// Error taxonomy shared by the whole library.
//
//   ConfigError  - invalid user input: bad distribution string, malformed
//                  matrix file, out-of-range parameter, empty size grid.
//   CeilingError - a size/work ceiling was hit; the request is well-formed
//                  but the engine refuses it (use a different engine or
//                  shrink the instance).
//   NumericError - arithmetic gave up honestly (e.g. catastrophic
//                  cancellation exhausted double precision).
//
// The CLI maps these to exit codes 2, 3 and 1 respectively.

#include <stdexcept>
#include <string>

namespace logperm {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct CeilingError : std::runtime_error {
    explicit CeilingError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace logperm
