#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace relax {

/// Invalid argument: dimension mismatch, non-finite input, unknown token.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Cholesky factorization failed at every jitter level tried.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::vector<double> jitters)
        : std::runtime_error(what), jitter_levels(std::move(jitters)) {}

    std::vector<double> jitter_levels;
};

/// Training responses carry no information (all identical).
class DegenerateDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No candidate in the pool has positive predictive standard deviation.
class DegeneratePoolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace relax
