#pragma once

#include <stdexcept>
#include <string>

namespace vicinal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (grid too small, negative datum, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A time series or snapshot list is too short for the requested diagnostic.
class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Base for failures of a numerical integration; carries the simulation time.
class NumericalFailure : public Error {
public:
    NumericalFailure(const std::string& what, double time)
        : Error(what + " (t=" + std::to_string(time) + ")"), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

class CollisionDetected : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class StepSizeUnderflow : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class NonFinite : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class SingularSystem : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

} // namespace vicinal
