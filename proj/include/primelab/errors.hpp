#pragma once

#include <stdexcept>
#include <string>

namespace primelab {

// Base for every error the library raises on bad input or numerical trouble.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (n < 2 for li, p in {0,1}, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Sieve request above the configured global limit.
class RangeTooLarge : public Error {
public:
    using Error::Error;
};

// Success count or index outside [0, k].
class IndexError : public Error {
public:
    using Error::Error;
};

// Problem too large for the requested mode (exact rational k > 20, exhaustive grid k > 12, ...).
class SizeError : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

// Quadrature failed to reach its tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Bad configuration value; key() names the offending setting.
class UsageError : public Error {
public:
    UsageError(std::string key, const std::string& what)
        : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

} // namespace primelab
