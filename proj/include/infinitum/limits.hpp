#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "infinitum/fields.hpp"

namespace infinitum {

struct LimitSample {
  double delta;
  Vector value;
};

struct LimitResult {
  std::optional<Vector> value;
  double residual = 0.0;
  bool diverged = false;
  std::vector<LimitSample> samples;

  bool converged() const { return value.has_value(); }
};

struct LimitOptions {
  double tolerance = 1e-8;
  double divergence_threshold = 1e8;
  int growth_window = 5;
  int max_order = 6;
  double safe = 2.0;
};

// delta_k = 0.1 * 2^{-k}, k = 0..40
std::vector<double> default_schedule();

// Limit of sampler(delta) as delta -> 0+ along a strictly decreasing schedule.
// Sampling stops at the first non-finite value. Two estimates compete: a
// Ridders tableau in integer powers of delta (ratio taken from the schedule's
// first step) and the last sample with the spread of the final window as its
// residual; the one with the smaller residual wins.
LimitResult extrapolate_limit(const std::function<Vector(double)>& sampler, const std::vector<double>& schedule,
                              const LimitOptions& options = {});

}  // namespace infinitum
