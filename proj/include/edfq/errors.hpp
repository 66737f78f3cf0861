#pragma once

#include <stdexcept>
#include <string>

namespace edfq {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error("config error: " + what) {}
};

struct QuadratureNonConvergence : std::runtime_error {
  explicit QuadratureNonConvergence(const std::string& what)
      : std::runtime_error("quadrature did not converge: " + what) {}
};

struct BracketNotFound : std::runtime_error {
  explicit BracketNotFound(const std::string& what) : std::runtime_error("bracket not found: " + what) {}
};

struct RootNotFound : std::runtime_error {
  explicit RootNotFound(const std::string& what) : std::runtime_error("root not found: " + what) {}
};

struct GridMismatch : std::runtime_error {
  explicit GridMismatch(const std::string& what) : std::runtime_error("grid mismatch: " + what) {}
};

struct AssumptionViolation : std::runtime_error {
  explicit AssumptionViolation(const std::string& what) : std::runtime_error("assumption violated: " + what) {}
};

struct EventOverflow : std::runtime_error {
  explicit EventOverflow(const std::string& what) : std::runtime_error("event cap exceeded: " + what) {}
};

struct EmptyInitialMeasure : std::runtime_error {
  explicit EmptyInitialMeasure(const std::string& what)
      : std::runtime_error("empty initial measure: " + what) {}
};

struct RegimeError : std::runtime_error {
  explicit RegimeError(const std::string& what) : std::runtime_error("regime error: " + what) {}
};

}  // namespace edfq
