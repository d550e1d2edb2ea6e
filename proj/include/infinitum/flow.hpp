#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "infinitum/compactifier.hpp"
#include "infinitum/fields.hpp"
#include "infinitum/sphere.hpp"

namespace infinitum {

struct IntegratorConfig {
  double dt_init = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 0.1;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double t_end = 1.0;  // negative integrates backward
  int renormalize_every = 1;
  long max_steps = 2'000'000;

  void validate() const;
};

enum class Terminal { TimeExhausted, EquatorContact, StepFailure };
std::string to_string(Terminal t);

struct TrajectorySample {
  double t;
  Vector z;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Terminal terminal = Terminal::TimeExhausted;
  bool equator_handoff = false;  // continued inside E with the closed-form field
  int events = 0;                // switching-surface crossings located
  std::string message;
};

using EquatorEvaluator = std::function<Vector(const EquatorPoint&)>;

// Closed-form equator field for (field, rho), when one exists: polynomial and
// homogeneous-sum fields with delta^{N-1}, PWL fields with rho = 1.
std::optional<EquatorEvaluator> closed_form_equator(const VectorField& field, const Regularizer& rho);
// closed_form_equator plus the numerical omega route for growth fixtures.
std::optional<EquatorEvaluator> equator_evaluator(const VectorField& field, const Regularizer& rho);

Trajectory integrate(const VectorField& field, const Regularizer& rho, const SpherePoint& z0,
                     const IntegratorConfig& cfg);

Trajectory equator_orbit(const EquatorEvaluator& evaluator, const EquatorPoint& z0, const IntegratorConfig& cfg);

}  // namespace infinitum
