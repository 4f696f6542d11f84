#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace evrobust {

// Thrown for malformed inputs, bad shapes, unreadable files. CLI maps it to exit code 1.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a configured statistical or structural invariant fails. CLI maps it to exit code 2.
struct InvariantFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Index = std::ptrdiff_t;

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

}  // namespace evrobust
