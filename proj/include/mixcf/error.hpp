#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mixcf {

/// Base class of every error raised by the library. `kind()` is a stable
/// identifier that ends up in JSON reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct ConfigurationError : Error {
  explicit ConfigurationError(const std::string& w) : Error("configuration", w) {}
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& w) : Error("dimension", w) {}
};

struct AliasingError : Error {
  explicit AliasingError(const std::string& w) : Error("aliasing", w) {}
};

struct GeometryError : Error {
  explicit GeometryError(const std::string& w) : Error("geometry", w) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error("domain", w) {}
};

class EllipticityError : public Error {
 public:
  EllipticityError(std::size_t node, double margin)
      : Error("ellipticity", "coefficient tensor not positive definite at node " +
                                 std::to_string(node) + " (margin " + std::to_string(margin) + ")"),
        node_(node),
        margin_(margin) {}
  std::size_t node() const noexcept { return node_; }
  double margin() const noexcept { return margin_; }

 private:
  std::size_t node_;
  double margin_;
};

struct CompatibilityError : Error {
  explicit CompatibilityError(const std::string& w) : Error("compatibility", w) {}
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(double residual, double tol)
      : Error("non_convergence", "least-squares residual " + std::to_string(residual) +
                                     " exceeds tolerance " + std::to_string(tol)),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

struct ConditioningError : Error {
  explicit ConditioningError(const std::string& w) : Error("conditioning", w) {}
};

}  // namespace mixcf
