#pragma once

#include <stdexcept>
#include <string>

namespace lcshift {

// Base for every error thrown by this library. Three broad categories map
// onto the CLI exit codes: configuration (2), numerical (3), I/O (4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class MalformedCsv : public IoError {
public:
    using IoError::IoError;
};

class NumericError : public Error {
public:
    using Error::Error;
};

// Fewer than two distinct observations: the log-concave MLE does not exist.
class FewerThanTwoDistinctPoints : public NumericError {
public:
    using NumericError::NumericError;
};

class NonConvergence : public NumericError {
public:
    NonConvergence(const std::string& what, int iterations)
        : NumericError(what), iterations_(iterations) {}
    int iterations() const { return iterations_; }

private:
    int iterations_;
};

// Closed-form bandwidth came out non-positive due to round-off.
class NonPositiveBandwidth : public NumericError {
public:
    using NumericError::NumericError;
};

class QuantileOutOfRange : public NumericError {
public:
    using NumericError::NumericError;
};

// Estimated Fisher information is numerically zero.
class DegenerateInformation : public NumericError {
public:
    using NumericError::NumericError;
};

// Truncation removed every observation from one of the samples.
class EmptyTruncationWindow : public NumericError {
public:
    using NumericError::NumericError;
};

class OptimizerFailure : public NumericError {
public:
    using NumericError::NumericError;
};

class InvalidDensity : public NumericError {
public:
    using NumericError::NumericError;
};

} // namespace lcshift
