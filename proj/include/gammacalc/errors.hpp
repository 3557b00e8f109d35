#pragma once
#include <cstddef>
#include <stdexcept>
#include <string>

namespace gammacalc {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NotPositiveSemidefinite : public Error {
public:
    using Error::Error;
};

class SingularJacobian : public Error {
public:
    using Error::Error;
};

// Point outside the domain of a function (abs at 0, log of a nonpositive
// argument, min/max tie when a derivative is requested, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Functional outside the (declared) domain of an operator.
class UnsupportedFunctional : public Error {
public:
    using Error::Error;
};

// Malformed user input (files, configs, measures that do not normalize, ...).
class InputError : public Error {
public:
    using Error::Error;
};

// An estimator or iteration that did not resolve (inconclusive closure,
// empty conditioning bin after retries, ...).
class NumericalFailure : public Error {
public:
    using Error::Error;
};

} // namespace gammacalc
