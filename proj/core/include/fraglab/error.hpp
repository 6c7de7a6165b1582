#pragma once

#include <stdexcept>
#include <string>

namespace fraglab {

// Rejected input. `field` names the offending parameter so callers can build
// machine-readable diagnostics.
class InvalidArgument : public std::invalid_argument {
 public:
  InvalidArgument(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// A solver could not produce a result satisfying its postconditions.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fraglab
