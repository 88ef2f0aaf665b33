#pragma once

#include <stdexcept>
#include <string>

namespace cbo {

/// A runtime invariant of the particle flow was violated beyond integrator
/// tolerance. Signals a bug or an unstable step size, never bad user input.
class invariant_error : public std::logic_error {
 public:
  explicit invariant_error(const std::string& what) : std::logic_error(what) {}
};

/// The objective does not satisfy a hypothesis required by the error-bound
/// construction (e.g. vanishing curvature at the minimizer).
class hypothesis_error : public std::domain_error {
 public:
  explicit hypothesis_error(const std::string& what) : std::domain_error(what) {}
};

}  // namespace cbo
