#pragma once

#include <stdexcept>
#include <string>

namespace cel {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input problems: bad expressions, bad documents, bad configuration.
// The CLI maps these to exit code 1.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
    explicit ParseError(const std::string& what) : Error(what), offset_(0) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class SyntaxError : public ParseError {
public:
    using ParseError::ParseError;
};

class UnknownIdentifier : public ParseError {
public:
    using ParseError::ParseError;
};

class NonConstantExponent : public ParseError {
public:
    using ParseError::ParseError;
};

class MissingDimension : public ParseError {
public:
    using ParseError::ParseError;
};

class DuplicateEntry : public ParseError {
public:
    using ParseError::ParseError;
};

class IndexOutOfRange : public ParseError {
public:
    using ParseError::ParseError;
};

class UnknownEntry : public Error {
public:
    using Error::Error;
};

// Numeric problems during evaluation. The CLI maps these to exit code 2.
class NumericError : public Error {
public:
    using Error::Error;
};

// Division by a jet with zero constant term, or an elementary function
// evaluated outside its domain.
class SingularPointError : public NumericError {
public:
    using NumericError::NumericError;
};

class DomainError : public NumericError {
public:
    using NumericError::NumericError;
};

class SingularMetric : public NumericError {
public:
    SingularMetric(const std::string& what, double smallest_eigenvalue)
        : NumericError(what + " (smallest eigenvalue " + std::to_string(smallest_eigenvalue) + ")"),
          smallest_eigenvalue_(smallest_eigenvalue) {}
    double smallest_eigenvalue() const { return smallest_eigenvalue_; }

private:
    double smallest_eigenvalue_;
};

// A requested quantity needs more jet orders than the inputs carry.
class OrderExhausted : public NumericError {
public:
    using NumericError::NumericError;
};

// The spectral structure of the Weyl contraction operator is too close to a
// rank change to classify the point.
class NearRankBoundary : public NumericError {
public:
    using NumericError::NumericError;
};

// Kernel vectors of the Weyl contraction operator fail the direct
// W(v,.,.,.) = 0 cross-check; signals a tolerance misconfiguration.
class IsomorphismViolation : public NumericError {
public:
    using NumericError::NumericError;
};

// A derived quantity cannot be formed at this point (propagated upstream
// failure or insufficient order); callers may treat this per quantity
// instead of aborting a batch.
class Unavailable : public NumericError {
public:
    using NumericError::NumericError;
};

} // namespace cel
