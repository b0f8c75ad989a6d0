#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pbb {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad sizes, mismatched operands, out-of-range indices.
class DimensionError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Anything that failed inside a numerical routine. Maps to CLI exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

class SingularityError : public NumericalError {
public:
    SingularityError(const std::string& what, double intensity)
        : NumericalError(what), intensity_(intensity) {}
    double intensity() const noexcept { return intensity_; }

private:
    double intensity_;
};

/// The Liouvillian null space is not one-dimensional.
class MultiplicityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoCrossingError : public NumericalError {
public:
    NoCrossingError(const std::string& what, double first_ratio, double last_ratio)
        : NumericalError(what), first_ratio_(first_ratio), last_ratio_(last_ratio) {}
    /// t_dim / t_bright at the first and last sweep point.
    double first_ratio() const noexcept { return first_ratio_; }
    double last_ratio() const noexcept { return last_ratio_; }

private:
    double first_ratio_;
    double last_ratio_;
};

class FitError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Invalid configuration value; `field` names the offending key. Exit code 2.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : Error(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Malformed input file; `line` is 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace pbb
