#pragma once

#include <stdexcept>
#include <string>

namespace smp {

// Malformed user input: non-finite entries, dimension mismatches,
// out-of-domain arguments.
class input_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A documented precondition does not hold for the supplied objects
// (non-cone spec passed to a cone routine, divergent integrand, ...).
class precondition_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical machinery failed: no convergence, empty sample set, or a
// membership scan that contradicts positivity.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace smp
