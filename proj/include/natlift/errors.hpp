#pragma once

#include <stdexcept>
#include <string>

namespace natlift {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A jet or coefficient expression was evaluated outside its domain
/// (division by zero, negative radicand, ...). Carries the offending
/// sub-expression in prefix form when one is known.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, std::string expression = {})
        : Error(expression.empty() ? what : what + " in '" + expression + "'"),
          expression_(std::move(expression)) {}

    const std::string& expression() const noexcept { return expression_; }

private:
    std::string expression_;
};

/// A function was evaluated outside the set it is defined on (for example
/// the case-II lambda at t = 0, which lives only on nonzero covectors).
class DomainError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

/// The base point lies outside the conformal chart (1 + c|x|^2/4 <= 0).
class ChartDomainError : public Error {
public:
    using Error::Error;
};

/// a1 vanished, so a2 = (1 + a3^2) / a1 cannot be formed.
class DegenerateStructureError : public Error {
public:
    using Error::Error;
};

/// The common denominator of the integrability coefficients vanished.
class IntegrabilityDegeneracyError : public Error {
public:
    IntegrabilityDegeneracyError(const std::string& what, double t) : Error(what), t_(t) {}
    double t() const noexcept { return t_; }

private:
    double t_;
};

/// lambda <= 0 or lambda + 2 t lambda' <= 0.
class InadmissibleStructureError : public Error {
public:
    using Error::Error;
};

/// A denominator of the closed-form inverse metric vanished.
class SingularCoefficientError : public Error {
public:
    using Error::Error;
};

/// A scenario or CLI argument could not be accepted.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace natlift
