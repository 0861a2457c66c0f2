#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace foe {

// Base class for all errors raised by this library. Precondition misuse
// (dimension mismatches, bad arguments) throws std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file. `offset` is a byte offset for binary formats and a
// 1-based line number for text formats; the message says which.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Value outside the representable range of the requested output format.
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(what) {}
};

// The linear system is not numerically positive definite (non-positive
// curvature encountered or iteration cap hit). The LM driver reacts by
// increasing damping and retrying.
class IndefiniteSystemError : public Error {
 public:
  explicit IndefiniteSystemError(const std::string& what) : Error(what) {}
};

// Non-finite values encountered where finite ones are required.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what) {}
};

}  // namespace foe
