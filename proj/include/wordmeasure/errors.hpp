#pragma once

#include <stdexcept>
#include <string>

namespace wm {

/// Malformed user input (words, moduli, group specs).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured resource cap (word length, exhaustive tuple count) would be
/// exceeded.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two independent computations that must agree did not.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace wm
