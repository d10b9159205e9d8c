#pragma once

#include <stdexcept>
#include <string>

namespace sr {

// Metric coefficient vanished along the flow (1+alpha*y = 0 and friends).
struct singular_metric_error : std::runtime_error {
  explicit singular_metric_error(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive step size underflowed.
struct stiffness_error : std::runtime_error {
  explicit stiffness_error(const std::string& what) : std::runtime_error(what) {}
};

// Requested value diverges (K at k = 1, period at the critical quartic, ...).
struct divergence_error : std::runtime_error {
  explicit divergence_error(const std::string& what) : std::runtime_error(what) {}
};

// Root bracketing / hit search gave up.
struct not_found_error : std::runtime_error {
  explicit not_found_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sr
