#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slantkit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class BasePointError : public Error {
public:
    using Error::Error;
};

class RankError : public Error {
public:
    using Error::Error;
};

class InvariantError : public Error {
public:
    using Error::Error;
};

class SymmetryError : public Error {
public:
    using Error::Error;
};

class KindError : public Error {
public:
    using Error::Error;
};

// Inputs are well-formed but violate a modelling assumption (e.g. f(D_i) leaks out of D_i).
class ModelError : public Error {
public:
    using Error::Error;
};

// A declared component carries more than one eigenvalue cluster of f^2.
class ComponentError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

class ParamError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

// Schema-level problems in a manifold spec file.
class SpecError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " at byte " + std::to_string(offset)), message_(message), offset_(offset) {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

    // Same error, prefixed with the location of the expression in a larger document.
    [[nodiscard]] ParseError within(const std::string& where) const { return ParseError(where + ": " + message_, offset_); }

private:
    std::string message_;
    std::size_t offset_;
};

class EvalError : public Error {
public:
    EvalError(const std::string& message, std::string subexpression)
        : Error(message + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}

    [[nodiscard]] const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

}  // namespace slantkit
