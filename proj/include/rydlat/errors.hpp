#pragma once

#include <stdexcept>

namespace rydlat {

// Rejected inputs: invalid sizes, indices, configuration values.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failures: eigensolver breakdown, defective matrices,
// unconverged quadrature, perturbative regime violations.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rydlat
