#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace cantion {

namespace detail {

/// Short scientific-notation rendering for messages.
inline std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

}  // namespace detail

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (negative occupation,
/// divergent series argument, malformed grid, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Errors tied to a point on the time axis carry that time so callers can
/// report where a run broke down.
class TimedError : public Error {
public:
    TimedError(const std::string& what, double t) : Error(what), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// The squeeze matrix reached a singular value of (almost) one: the ansatz
/// wavefunction is no longer normalizable.
class AnsatzBreakdown : public TimedError {
public:
    using TimedError::TimedError;
};

class StepSizeUnderflow : public TimedError {
public:
    using TimedError::TimedError;
};

/// Truncation leakage or outer-shell mass of a Fock evolution grew too large.
class LeakageExceeded : public TimedError {
public:
    using TimedError::TimedError;
};

/// Two RWA eigenfrequencies coincide; the eigen-expansion is ill-defined.
class DegenerateModes : public Error {
public:
    using Error::Error;
};

/// det(I - conj(M) M) <= 0.
class NormSingular : public Error {
public:
    using Error::Error;
};

class TruncationTooSmall : public Error {
public:
    using Error::Error;
};

class ZeroNorm : public Error {
public:
    using Error::Error;
};

/// Halving the fixed RK4 step changed the reported occupations by more than
/// the allowed amount.
class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

}  // namespace cantion
