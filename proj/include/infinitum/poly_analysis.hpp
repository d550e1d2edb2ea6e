#pragma once

#include <optional>
#include <vector>

#include "infinitum/compactifier.hpp"
#include "infinitum/fields.hpp"
#include "infinitum/limits.hpp"
#include "infinitum/sphere.hpp"

namespace infinitum {

// (f^N(pi) - <pi, f^N(pi)> pi, 0)
Vector equator_field_poly(const PolynomialField& field, const EquatorPoint& ze);
// Same formula with the top-degree pieces of a homogeneous sum.
Vector equator_field_homogeneous(const HomogeneousSumField& field, const EquatorPoint& ze);

struct NullClassification {
  enum class Verdict { IdenticallyNull, NonNull };
  Verdict verdict = Verdict::NonNull;
  std::optional<ScalarPolynomial> q;
  std::optional<PolynomialField> remainder;  // f - q x
  std::optional<EquatorPoint> witness;
  Vector witness_value;
};

NullClassification classify_null(const PolynomialField& field, int grid_m = 32);

// Equator field under delta^{N-2}; requires an identically null leading part.
Vector fallback_equator_field(const PolynomialField& field, const EquatorPoint& ze);

// rho = delta^s leaves the equator invariant for degree N iff s + 2 - N > 0.
bool invariance_criterion(double s, int degree);

// lim delta^N f(x / delta) at a unit vector x.
LimitResult estimate_omega(const VectorField& field, int degree, const Vector& x,
                           const std::vector<double>& schedule = default_schedule());

struct GrowthProfile {
  int degree = 0;
  std::vector<Vector> directions;
  std::vector<LimitResult> omega;
  double uniformity_spread = 0.0;  // max residual over the directions
};

GrowthProfile growth_profile(const VectorField& field, int degree, const std::vector<EquatorPoint>& grid,
                             const std::vector<double>& schedule = default_schedule());

// (omega(pi) - <pi, omega(pi)> pi, 0); throws OmegaDiverged.
Vector equator_field_growth(const VectorField& field, int degree, const EquatorPoint& ze,
                            const std::vector<double>& schedule = default_schedule());

// delta^s g(z) for a polynomial or homogeneous-sum field of degree N and an
// integer s >= N - 1, written as a polynomial in z so it extends to z_{n+1} = 0:
// delta^{s+1-N} ((I - pi pi^T) P ; -delta <pi, P>) with P = delta^N f(pi / delta).
Vector homogenized_field(const VectorField& field, int s, const Vector& z);

}  // namespace infinitum
