#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace levi3 {

/// Base class for every failure raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& what)
        : Error(what), offset_(offset), expected_(std::move(expected)) {}
    std::size_t offset() const { return offset_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class UnknownIdentifier : public ParseError {
public:
    using ParseError::ParseError;
};

/// Division by zero or log of a non-positive argument during evaluation.
class DomainError : public Error {
public:
    DomainError(double t, const std::string& what) : Error(what), t_(t) {}
    double t() const { return t_; }

private:
    double t_;
};

class HyperbolicityViolation : public Error {
public:
    HyperbolicityViolation(double value, double t, double xi_norm, const std::string& what)
        : Error(what), value_(value), t_(t), xi_(xi_norm) {}
    double value() const { return value_; }
    double t() const { return t_; }
    double xi_norm() const { return xi_; }

private:
    double value_, t_, xi_;
};

/// Root jets requested where two roots nearly coincide.
class NearMultipleRoot : public Error {
public:
    NearMultipleRoot(double gap, const std::string& what) : Error(what), gap_(gap) {}
    double gap() const { return gap_; }

private:
    double gap_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IntegratorError : public Error {
public:
    IntegratorError(double t, const std::string& what) : Error(what), t_(t) {}
    double t() const { return t_; }

private:
    double t_;
};

}  // namespace levi3
