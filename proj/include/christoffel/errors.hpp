#pragma once

#include <stdexcept>
#include <string>

namespace christoffel {

// Bad user input: malformed config, CSV, or CLI arguments.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public std::invalid_argument {
 public:
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Moment matrix could not be factorized, even after the jitter retry.
// Typical cause: rank-deficient empirical moments (m < s(n) samples).
class NotPositiveDefinite : public std::runtime_error {
 public:
  explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

// Density estimation requested at a degenerate (point) query.
class ZeroWidth : public std::invalid_argument {
 public:
  explicit ZeroWidth(const std::string& what) : std::invalid_argument(what) {}
};

// Query box does not meet the declared domain.
class EmptyIntersection : public std::invalid_argument {
 public:
  explicit EmptyIntersection(const std::string& what) : std::invalid_argument(what) {}
};

class SingularGram : public std::runtime_error {
 public:
  explicit SingularGram(const std::string& what) : std::runtime_error(what) {}
};

class InfeasibleConstraint : public std::invalid_argument {
 public:
  explicit InfeasibleConstraint(const std::string& what) : std::invalid_argument(what) {}
};

// Adaptive quadrature exhausted its refinement budget.
class NoConvergence : public std::runtime_error {
 public:
  explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace christoffel
