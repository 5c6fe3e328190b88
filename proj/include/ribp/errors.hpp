#pragma once

#include <stdexcept>
#include <string>

namespace ribp {

// Parameter and precondition violations are reported as std::invalid_argument.
// The two classes below cover the remaining failure kinds the CLI maps onto
// distinct exit codes.

/// Input data could not be read or does not fit the requested model.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure failed to produce a usable result (e.g. a proposal
/// cap was exhausted).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ribp
