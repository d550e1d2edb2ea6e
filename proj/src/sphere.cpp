#include "infinitum/sphere.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "infinitum/errors.hpp"

namespace infinitum {

SpherePoint SpherePoint::checked(Vector coords) {
  if (coords.size() < 2) fail(ErrorCode::DimensionMismatch, "sphere point needs n + 1 >= 2 coordinates");
  if (!coords.allFinite()) fail(ErrorCode::NonFiniteInput, "sphere point");
  if (std::abs(coords.norm() - 1.0) > 1e-12) fail(ErrorCode::NotOnSphere, "sphere point is not unit norm");
  if (coords[coords.size() - 1] < 0.0) fail(ErrorCode::NotOnSphere, "sphere point is in the lower hemisphere");
  return SpherePoint{std::move(coords)};
}

EquatorPoint EquatorPoint::checked(Vector coords) {
  if (coords.size() < 2) fail(ErrorCode::DimensionMismatch, "equator point needs n + 1 >= 2 coordinates");
  if (!coords.allFinite()) fail(ErrorCode::NonFiniteInput, "equator point");
  if (coords[coords.size() - 1] != 0.0) fail(ErrorCode::NotOnSphere, "equator point needs z_{n+1} = 0");
  if (std::abs(coords.norm() - 1.0) > 1e-12) fail(ErrorCode::NotOnSphere, "equator point is not unit norm");
  return EquatorPoint{std::move(coords)};
}

EquatorPoint EquatorPoint::from_direction(const Vector& u) {
  if (!u.allFinite()) fail(ErrorCode::NonFiniteInput, "equator direction");
  const double r = u.norm();
  if (r == 0.0) fail(ErrorCode::NotOnSphere, "equator direction is zero");
  Vector c = Vector::Zero(u.size() + 1);
  c.head(u.size()) = u / r;
  return EquatorPoint{std::move(c)};
}

SpherePoint project(const Vector& x) {
  if (!x.allFinite()) fail(ErrorCode::NonFiniteInput, "project");
  const auto n = x.size();
  Vector z(n + 1);
  const double r = x.stableNorm();
  if (r > 1e150) {
    const double inv = 1.0 / r;
    const double scale = 1.0 / std::sqrt(1.0 + inv * inv);
    z.head(n) = (x * inv) * scale;
    z[n] = inv * scale;
  } else {
    const double scale = 1.0 / std::sqrt(1.0 + r * r);
    z.head(n) = x * scale;
    z[n] = scale;
  }
  return SpherePoint{std::move(z)};
}

Vector unproject(const SpherePoint& z) {
  const double h = z.height();
  if (!(h > 0.0)) fail(ErrorCode::EquatorPoint, "equator points have no preimage in R^n");
  return z.pi() / h;
}

Matrix jacobian(const SpherePoint& z) {
  const double h = z.height();
  if (!(h > 0.0)) fail(ErrorCode::EquatorPoint, "Jacobian is undefined at the equator");
  const auto n = z.coords.size() - 1;
  const Vector p = z.pi();
  Matrix j(n + 1, n);
  j.topRows(n) = h * (Matrix::Identity(n, n) - p * p.transpose());
  j.row(n) = -h * h * p.transpose();
  return j;
}

SpherePoint parallel_coords(const EquatorPoint& ze, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) fail(ErrorCode::DeltaOutOfRange, "delta must lie in [0, 1]");
  const auto n = ze.coords.size() - 1;
  Vector z(n + 1);
  z.head(n) = ze.pi() * std::sqrt(1.0 - delta * delta);
  z[n] = delta;
  return SpherePoint{std::move(z)};
}

std::pair<EquatorPoint, double> split(const SpherePoint& z) {
  const double delta = z.height();
  if (delta > 1.0 - 1e-14) fail(ErrorCode::NorthPole, "the meridian chart excludes the north pole");
  const auto n = z.coords.size() - 1;
  Vector e = Vector::Zero(n + 1);
  const Vector p = z.pi() / std::sqrt(1.0 - delta * delta);
  e.head(n) = p / p.norm();
  return {EquatorPoint{std::move(e)}, delta};
}

std::vector<EquatorPoint> equator_grid(int n, int m, double jitter, std::uint64_t seed) {
  if (n < 1 || m < 1) fail(ErrorCode::InvalidField, "equator grid needs n >= 1 and M >= 1");
  std::vector<EquatorPoint> grid;
  if (n == 1) {
    for (double s : {1.0, -1.0}) grid.push_back(EquatorPoint::from_direction(Vector::Constant(1, s)));
    return grid;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  const int dims = n - 1;
  std::vector<int> idx(static_cast<std::size_t>(dims), 0);
  while (true) {
    std::vector<double> angle(static_cast<std::size_t>(dims));
    for (int d = 0; d < dims; ++d) {
      const double shift = jitter > 0.0 ? jitter * unif(rng) : 0.0;
      const auto k = static_cast<std::size_t>(d);
      angle[k] = d + 1 < dims ? std::numbers::pi * (idx[k] + 0.5 + shift) / m
                              : 2.0 * std::numbers::pi * (idx[k] + shift) / m;
    }
    Vector u(n);
    double sin_prod = 1.0;
    for (int d = 0; d < dims; ++d) {
      const double a = angle[static_cast<std::size_t>(d)];
      u[d] = sin_prod * std::cos(a);
      sin_prod *= std::sin(a);
    }
    u[n - 1] = sin_prod;
    grid.push_back(EquatorPoint::from_direction(u));

    int d = dims - 1;
    while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == m) idx[static_cast<std::size_t>(d--)] = 0;
    if (d < 0) break;
  }
  return grid;
}

}  // namespace infinitum
