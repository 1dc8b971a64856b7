#pragma once

#include <stdexcept>
#include <string>

namespace qkac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NotHermitian : public Error {
public:
    explicit NotHermitian(double violation)
        : Error("matrix is not Hermitian (max |M - M^dagger| = " + std::to_string(violation) + ")"),
          violation_(violation) {}
    double violation() const noexcept { return violation_; }

private:
    double violation_;
};

class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

class MemoryBudgetExceeded : public Error {
public:
    using Error::Error;
};

class BadSiteIndex : public Error {
public:
    using Error::Error;
};

class SameSite : public Error {
public:
    using Error::Error;
};

class NotPSD : public Error {
public:
    explicit NotPSD(double min_eigenvalue)
        : Error("operator is not positive semidefinite (min eigenvalue = " +
                std::to_string(min_eigenvalue) + ")"),
          min_eigenvalue_(min_eigenvalue) {}
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

class TraceNotOne : public Error {
public:
    explicit TraceNotOne(double trace)
        : Error("operator trace is " + std::to_string(trace) + ", expected 1"), trace_(trace) {}
    double trace() const noexcept { return trace_; }

private:
    double trace_;
};

class PermutationBudgetExceeded : public Error {
public:
    using Error::Error;
};

class WeightsInvalid : public Error {
public:
    using Error::Error;
};

class StepTooLarge : public Error {
public:
    using Error::Error;
};

class DensityDriftExceeded : public Error {
public:
    using Error::Error;
};

/// Raised when a proven inequality fails numerically; indicates a kernel bug.
class BoundViolation : public Error {
public:
    using Error::Error;
};

class ConfigInvalid : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& field, const std::string& what)
        : Error("line " + std::to_string(line) + ", field '" + field + "': " + what),
          line_(line), field_(field) {}
    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace qkac
