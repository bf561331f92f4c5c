#pragma once

#include <stdexcept>
#include <string>

namespace nullwave {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument to an operation (non-unit direction, point inside the
/// obstacle, asymmetric tensor, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Scenario / configuration rejection. `field` names the offending entry.
class ConfigError : public Error {
public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

private:
  std::string field_;
};

/// Geometry became inconsistent (non-convex profile, near-singular Jacobian).
class GeometryError : public Error {
public:
  using Error::Error;
};

/// Effective coefficient of the second time derivative degenerated.
class DegeneracyError : public Error {
public:
  using Error::Error;
};

/// The per-step nonlinear fixed point failed to converge.
class DivergenceError : public Error {
public:
  DivergenceError(double t, const std::string& what) : Error(what), time_(t) {}
  double time() const { return time_; }

private:
  double time_ = 0.0;
};

/// Not enough stored time levels for the requested stencil.
class StagingError : public Error {
public:
  using Error::Error;
};

}  // namespace nullwave
