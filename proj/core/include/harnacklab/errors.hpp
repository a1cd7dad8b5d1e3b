#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

namespace hlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid numeric or structural parameters (sizes, radii, exponents).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The domain or graph does not have the required shape (no boundary, disconnected).
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// A set that must lie inside another does not.
class ContainmentError : public Error {
 public:
  using Error::Error;
};

/// A distance band {y : r <= d(x,y) < r+1} turned out empty.
class ShellError : public Error {
 public:
  using Error::Error;
};

/// Sets that must be disjoint overlap.
class OverlapError : public Error {
 public:
  using Error::Error;
};

/// A named precondition of a report does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A construction ran but one of its asserted invariants failed. Carries the
/// offending witness so reports can show where it broke.
class ConstructionError : public Error {
 public:
  ConstructionError(const std::string& what, nlohmann::json witness)
      : Error(what), witness_(std::move(witness)) {}

  const nlohmann::json& witness() const noexcept { return witness_; }

 private:
  nlohmann::json witness_;
};

}  // namespace hlab
