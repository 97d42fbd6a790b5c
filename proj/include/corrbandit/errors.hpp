#pragma once

#include <stdexcept>
#include <string>

namespace corrbandit {

/// A value lies outside the mathematical domain of an operation
/// (e.g. an autocorrelation coefficient with |lambda| > 1).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A structural parameter is unusable (e.g. a non-power-of-two length).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A statistic is undefined for the given data (e.g. zero variance).
class StatisticError : public DomainError {
public:
    using DomainError::DomainError;
};

/// An object violates one of its invariants.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace corrbandit
