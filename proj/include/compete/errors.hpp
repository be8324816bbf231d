#pragma once

#include <stdexcept>
#include <string>

namespace compete {

// Bad input: malformed config, invalid grid, growth law failing its
// monotonicity / capacity conditions. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public ValidationError {
public:
    ParseError(const std::string& what, std::size_t position)
        : ValidationError(what + " at position " + std::to_string(position)),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// Evaluation outside the function's domain (log of nonpositive, x/0).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iterative solver failed to converge or broke an invariant it asserts.
// Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A strict inequality holds analytically but with too little margin to be
// certified on the discrete level (e.g. no admissible epsilon).
class CriterionMarginError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// theta ratio with a vanishing denominator at an interior node.
class RatioDegeneracyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// The sought positive solution does not exist; raised
// where a caller demanded one anyway.
class NonexistenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace compete
