#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fermi {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user-supplied values (parameters, files, malformed input).
struct InputError : Error {
    using Error::Error;
};

struct InvalidParameterError : InputError {
    using InputError::InputError;
};

// A numerical routine ran out of iterations; carries the last estimate.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& msg, double estimate)
        : Error(msg), last_estimate(estimate) {}
    double last_estimate;
};

struct InvalidBracketError : Error {
    using Error::Error;
};

// Numerov march blew up; `last_valid_index` is the last finite sample.
struct OverflowError : Error {
    OverflowError(const std::string& msg, std::size_t index)
        : Error(msg), last_valid_index(index) {}
    std::size_t last_valid_index;
};

struct DegenerateInputError : Error {
    using Error::Error;
};

struct InsufficientGridError : Error {
    using Error::Error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct InvalidGaugePointError : Error {
    using Error::Error;
};

// Too much of the wavefunction is below the node-masking threshold.
struct InsufficientSupportError : Error {
    using Error::Error;
};

// g > 0 everywhere (or g effectively zero): no closed Fermi curve exists.
struct NoCurveError : Error {
    using Error::Error;
};

// g <= 0 on several disjoint intervals; carries the intervals found.
struct MultiWellError : Error {
    MultiWellError(const std::string& msg, std::vector<std::pair<double, double>> found)
        : Error(msg), intervals(std::move(found)) {}
    std::vector<std::pair<double, double>> intervals;
};

// Two independent routes to the same quantity disagree.
struct InconsistencyError : Error {
    using Error::Error;
};

struct NotSingleWellError : Error {
    using Error::Error;
};

struct BracketFailureError : Error {
    using Error::Error;
};

struct ExtensionError : Error {
    using Error::Error;
};

// The curve fails the quantization condition; carries the residual.
struct NotQuantizedError : Error {
    NotQuantizedError(const std::string& msg, double r) : Error(msg), residual(r) {}
    double residual;
};

struct TruncationError : Error {
    using Error::Error;
};

}  // namespace fermi
