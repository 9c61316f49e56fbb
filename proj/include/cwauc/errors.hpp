#pragma once

#include <stdexcept>
#include <string>

namespace cwauc {

// Malformed input: bad files, bad indices, invalid arguments supplied by a caller.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation that cannot proceed on otherwise valid input
// (singular matrices, degenerate densities, non-PSD covariance).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cwauc
