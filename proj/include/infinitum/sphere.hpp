#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "infinitum/fields.hpp"

namespace infinitum {

/// Point of the closed upper hemisphere of S^n, stored in R^{n+1}.
struct SpherePoint {
  Vector coords;

  // Validates unit norm (1e-12) and a nonnegative last coordinate.
  static SpherePoint checked(Vector coords);

  int n() const { return static_cast<int>(coords.size()) - 1; }
  double height() const { return coords[coords.size() - 1]; }
  Vector pi() const { return coords.head(coords.size() - 1); }
};

/// Point of the equator; the last coordinate is stored as an exact zero.
struct EquatorPoint {
  Vector coords;

  static EquatorPoint checked(Vector coords);
  // Equator point in direction u (normalized, must be nonzero).
  static EquatorPoint from_direction(const Vector& u);

  int n() const { return static_cast<int>(coords.size()) - 1; }
  Vector pi() const { return coords.head(coords.size() - 1); }
  SpherePoint as_sphere_point() const { return SpherePoint{coords}; }
};

SpherePoint project(const Vector& x);
Vector unproject(const SpherePoint& z);
// Dh at h^{-1}(z): z_{n+1} (I - pi pi^T ; -z_{n+1} pi^T), size (n+1) x n.
Matrix jacobian(const SpherePoint& z);
SpherePoint parallel_coords(const EquatorPoint& ze, double delta);
std::pair<EquatorPoint, double> split(const SpherePoint& z);

// Hyperspherical product grid on E = S^{n-1}: polar angles at midpoints
// pi (i + 1/2) / M, azimuth 2 pi j / M, M^{n-1} points. With jitter > 0 every
// angle is shifted by jitter * U[-1/2, 1/2) grid steps drawn from `seed`.
std::vector<EquatorPoint> equator_grid(int n, int m, double jitter = 0.0, std::uint64_t seed = 0);

}  // namespace infinitum
