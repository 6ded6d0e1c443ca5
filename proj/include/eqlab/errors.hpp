#pragma once

#include <stdexcept>
#include <string>

namespace eqlab {

/// Process exit codes used by the command-line front end.
enum class ExitCode : int { ok = 0, config = 2, numeric = 3, consistency = 4 };

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual ExitCode code() const noexcept = 0;
};

class ConfigError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode code() const noexcept override { return ExitCode::config; }
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class FormatError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class UnsupportedVersionError : public FormatError {
public:
    using FormatError::FormatError;
};

class NumericError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode code() const noexcept override { return ExitCode::numeric; }
};

/// Gram matrix not positive definite: the measure does not separate sections.
class DegenerateMeasureError : public NumericError {
public:
    using NumericError::NumericError;
};

class SolverError : public NumericError {
public:
    SolverError(const std::string& what, double residual)
        : NumericError(what), residual_(residual) {}
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class ConsistencyError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode code() const noexcept override { return ExitCode::consistency; }
};

/// Failure inside a named stage of a multi-stage run; keeps the inner exit code.
class StageError : public Error {
public:
    StageError(const std::string& stage, const Error& inner)
        : Error(stage + ": " + inner.what()), stage_(stage), code_(inner.code()) {}
    [[nodiscard]] ExitCode code() const noexcept override { return code_; }
    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
    ExitCode code_;
};

}  // namespace eqlab
