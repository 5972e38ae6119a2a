#ifndef SLCP_ERRORS_HPP
#define SLCP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace slcp {

/// Bad user-facing configuration (CLI exit code 4).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Domain or grid construction failure (CLI exit code 4).
class GeometryError : public std::runtime_error {
 public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// Discrete Hessian dropped below the convexity guard (CLI exit code 3).
class ConvexityLostError : public std::runtime_error {
 public:
  explicit ConvexityLostError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Nonlinear solve failed to converge (CLI exit code 2).
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Reference 1-D solver could not certify or bracket its target.
class OracleError : public std::runtime_error {
 public:
  explicit OracleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace slcp

#endif  // SLCP_ERRORS_HPP
