#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ribound {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed expression text. `position` is a 0-based byte offset into the
/// input pointing at the offending character (or at end of input).
struct SyntaxError : Error {
  SyntaxError(const std::string& msg, std::size_t pos)
      : Error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
  std::size_t position;
};

/// An expression was evaluated outside the domain of one of its builtins
/// (logarithm of a non-positive value, division by a near-zero value, ...).
struct EvalError : Error {
  using Error::Error;
};

/// Quadrature could not produce a trustworthy result: the integrand was
/// non-finite at an interior node or the refinement budget was exhausted
/// with a large remaining error estimate.
struct QuadratureError : Error {
  using Error::Error;
};

/// A value lies outside the image of the function being inverted (or beyond
/// the range a table can be extended to cover).
struct DomainError : Error {
  using Error::Error;
};

/// Exponential bracket expansion ran out of representable range without
/// enclosing the target.
struct BracketError : Error {
  using Error::Error;
};

}  // namespace ribound
