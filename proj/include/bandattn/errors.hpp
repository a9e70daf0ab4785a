#pragma once

#include <stdexcept>
#include <string>

namespace bandattn {

// Mismatched matrix shapes between operands.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameter outside its mathematical domain (bandwidth >= n, p outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed call arguments (empty candidate list, zero repeats, empty ranges).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data violates an operation's precondition (e.g. entries outside [0,1]).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values reached a numeric kernel.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bandattn
