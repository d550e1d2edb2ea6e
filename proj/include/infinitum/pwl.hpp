#pragma once

#include "infinitum/fields.hpp"
#include "infinitum/sphere.hpp"

namespace infinitum {

struct BoundarySet {
  Vector k;
  std::vector<double> taus;
};

struct ExternalMatrices {
  Matrix A0;
  Matrix Ap;
};

// Region whose affine piece becomes (A, b) with alpha = 0: the one holding
// the origin, or the leftmost slab along k.
enum class LureAnchor { Origin, Leftmost };

LureForm lure_extract(const PwlRegionField& field, LureAnchor anchor = LureAnchor::Origin);
BoundarySet boundaries(const LureForm& lure);

struct NormalizedLure {
  LureForm form;  // k = e_1
  Matrix M;       // orthogonal, M e_1 = k / ||k||
};

NormalizedLure lure_normalize(const LureForm& lure);
bool is_normalized(const LureForm& lure);

ExternalMatrices external_matrices(const LureForm& lure);

// Compactified field with rho = 1 on the closed hemisphere; k must be e_1.
Vector pwl_compactified(const LureForm& lure, const SpherePoint& z);
Vector pwl_equator_field(const LureForm& lure, const EquatorPoint& ze);
bool pwl_classify_null(const LureForm& lure);

}  // namespace infinitum
