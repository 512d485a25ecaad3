#pragma once

#include <stdexcept>
#include <string>

namespace hkflow {

// Root of all library errors. The category decides the CLI exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller violated a precondition (length mismatch, bad parameter, ...).
class UsageError : public Error {
public:
    using Error::Error;
};

// Argument outside the region where a model is defined (e.g. E(0) for alpha <= -1).
class DomainError : public Error {
public:
    using Error::Error;
};

// A level value c that f(x, .) never attains at some node.
class RangeError : public Error {
public:
    explicit RangeError(const std::string& what, std::size_t node = 0)
        : Error(what), node_(node) {}
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

// Structural failure of a model, e.g. equilibrium not normalizable.
class ModelError : public Error {
public:
    using Error::Error;
};

// Quadrature non-convergence, NaN from a model evaluation, ...
class NumericError : public Error {
public:
    using Error::Error;
};

// An observed value contradicts a proven inequality: flags a bug or a violated hypothesis.
class CounterexampleError : public Error {
public:
    using Error::Error;
};

} // namespace hkflow
