#pragma once

#include <stdexcept>
#include <string>

namespace costbic {

// Invalid input data or configuration (CLI exit code 2).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: divergence, singularity, guard violations hit at
// compute time (CLI exit code 3).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// X_gamma^T X_gamma singular; the unit-information prior is undefined and
// the model carries zero posterior probability.
class RankDeficientError : public NumericError {
public:
    explicit RankDeficientError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace costbic
