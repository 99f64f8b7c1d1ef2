#pragma once

#include <stdexcept>
#include <string>

namespace ids {

// Parameter outside its documented domain (probabilities, amplitudes, t <= 0 ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Problem too large for dense diagonalization.
struct SizeError : std::length_error {
    using std::length_error::length_error;
};

struct InvalidSchedule : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Coincident points, unresolved geometric degeneracies, all-excluded grids.
struct DegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Incompatible model specs passed to a comparison, bad experiment configs.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Not enough realizations for a statistical report.
struct StatisticsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ids
