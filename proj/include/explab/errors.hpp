#pragma once

#include <stdexcept>
#include <string>

namespace explab {

// Two distributions (or channels) whose outcome/input labels do not line up.
class AlphabetMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A probability vector, channel row, density matrix or POVM that violates
// its invariants.
class InvalidDistribution : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameter outside an operation's domain (negative rate, bad sec4 parameters).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// phi is infinite at the requested tilt, so derivatives / tilted laws do not exist.
class UndefinedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Exhaustive enumeration or oracle would exceed its size budget.
class ScaleError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Requested mode is not supported for this input (e.g. certified search on a qutrit).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed input files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace explab
