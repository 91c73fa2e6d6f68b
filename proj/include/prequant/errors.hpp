#pragma once

#include <stdexcept>
#include <string>

namespace prequant {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown or unsupported catalog identifier (group, manifold, action, moment map).
class CatalogError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Quadrature did not converge, routes disagree, or a declared datum failed verification.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario input.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace prequant
