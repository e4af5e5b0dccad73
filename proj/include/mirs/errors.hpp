#pragma once

#include <stdexcept>
#include <string>

namespace mirs {

/// Malformed input: bad arity, invalid parameters, spec entries violating
/// their support conditions, schema errors in JSON input.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a rational surrogate for the homogeneity unit produces a
/// coincidence that generic (irrational) parameters would never produce:
/// two distinct linear forms evaluating to the same value, or an integer
/// discounted homogeneity on the [beta] >= 0 sector.
class NonGenericParameters : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An algebraic identity that is supposed to hold by construction failed.
class LemmaViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace mirs
