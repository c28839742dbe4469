#pragma once

#include <stdexcept>
#include <string>

namespace mgritsl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand sizes do not agree (vector length vs n_x, mismatched operators).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A circulant operator has a (numerically) vanishing eigenvalue.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Invalid arguments: orders out of range, repeated offsets, bad windows.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A Butcher tableau fails its structural or order conditions.
class TableauError : public Error {
 public:
  using Error::Error;
};

}  // namespace mgritsl
