#include "infinitum/poly_analysis.hpp"

#include <cmath>
#include <limits>

#include "infinitum/errors.hpp"
#include "infinitum/parallel.hpp"

namespace infinitum {

namespace {

Vector tangential(const Vector& pi, const Vector& w) {
  Vector out = Vector::Zero(pi.size() + 1);
  out.head(pi.size()) = w - pi.dot(w) * pi;
  return out;
}

}  // namespace

Vector equator_field_poly(const PolynomialField& field, const EquatorPoint& ze) {
  if (ze.n() != field.dimension()) fail(ErrorCode::DimensionMismatch, "equator_field_poly");
  const Vector pi = ze.pi();
  return tangential(pi, field.homogeneous_part(field.degree()).eval(pi));
}

Vector equator_field_homogeneous(const HomogeneousSumField& field, const EquatorPoint& ze) {
  if (ze.n() != field.dimension()) fail(ErrorCode::DimensionMismatch, "equator_field_homogeneous");
  const Vector pi = ze.pi();
  return tangential(pi, field.eval_part(field.degree(), pi));
}

NullClassification classify_null(const PolynomialField& field, int grid_m) {
  NullClassification out;
  const int n = field.dimension();
  if (auto q = leading_is_radial(field)) {
    out.verdict = NullClassification::Verdict::IdenticallyNull;
    out.remainder = field - PolynomialField::radial(*q);
    out.q = std::move(q);
    return out;
  }
  out.verdict = NullClassification::Verdict::NonNull;
  double best = -1.0;
  for (const auto& ze : equator_grid(n, grid_m)) {
    Vector v = equator_field_poly(field, ze);
    if (v.norm() > best) {
      best = v.norm();
      out.witness = ze;
      out.witness_value = std::move(v);
    }
  }
  return out;
}

Vector fallback_equator_field(const PolynomialField& field, const EquatorPoint& ze) {
  if (ze.n() != field.dimension()) fail(ErrorCode::DimensionMismatch, "fallback_equator_field");
  const int big_n = field.degree();
  if (!leading_is_radial(field)) {
    fail(ErrorCode::PreconditionNonNull, "the delta^{N-1} compactification is not identically null");
  }
  const Vector pi = ze.pi();
  Vector out = tangential(pi, field.homogeneous_part(big_n - 1).eval(pi));
  out[out.size() - 1] = -pi.dot(field.homogeneous_part(big_n).eval(pi));
  return out;
}

bool invariance_criterion(double s, int degree) { return s + 2.0 - degree > 0.0; }

LimitResult estimate_omega(const VectorField& field, int degree, const Vector& x,
                           const std::vector<double>& schedule) {
  if (x.size() != dimension(field)) fail(ErrorCode::DimensionMismatch, "estimate_omega");
  return extrapolate_limit([&](double delta) -> Vector { return std::pow(delta, degree) * eval(field, x / delta); },
                           schedule);
}

GrowthProfile growth_profile(const VectorField& field, int degree, const std::vector<EquatorPoint>& grid,
                             const std::vector<double>& schedule) {
  GrowthProfile p;
  p.degree = degree;
  p.directions.resize(grid.size());
  p.omega.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    p.directions[i] = grid[i].pi();
    p.omega[i] = estimate_omega(field, degree, p.directions[i], schedule);
  });
  for (const auto& o : p.omega) {
    p.uniformity_spread = std::max(p.uniformity_spread, o.value ? o.residual : std::numeric_limits<double>::infinity());
  }
  return p;
}

Vector equator_field_growth(const VectorField& field, int degree, const EquatorPoint& ze,
                            const std::vector<double>& schedule) {
  const Vector pi = ze.pi();
  const LimitResult omega = estimate_omega(field, degree, pi, schedule);
  if (!omega.value) {
    fail(ErrorCode::OmegaDiverged, omega.diverged ? "delta^N f(x / delta) diverges" : "delta^N f(x / delta) did not converge");
  }
  return tangential(pi, *omega.value);
}

namespace {

// delta^N f(pi / delta) expanded term by term.
Vector scaled_top(const PolynomialField& f, int big_n, const Vector& pi, double delta) {
  Vector p = Vector::Zero(f.dimension());
  for (const auto& [alpha, c] : f.terms()) {
    p += (alpha.monomial(pi) * std::pow(delta, big_n - alpha.order())) * c;
  }
  return p;
}

Vector scaled_top(const HomogeneousSumField& f, int big_n, const Vector& pi, double delta) {
  Vector p = Vector::Zero(f.dimension());
  const double r = pi.norm();
  for (const auto& piece : f.pieces()) {
    if (piece.poly.is_zero()) continue;
    for (const auto& [alpha, c] : piece.poly.terms()) {
      const int e = alpha.order() + piece.norm_power;
      p += (std::pow(r, piece.norm_power) * alpha.monomial(pi) * std::pow(delta, big_n - e)) * c;
    }
  }
  return p;
}

}  // namespace

Vector homogenized_field(const VectorField& field, int s, const Vector& z) {
  auto build = [&](const auto& f) -> Vector {
    const int big_n = f.degree();
    if (s < big_n - 1) fail(ErrorCode::InvalidRegularizer, "homogenized field needs s >= N - 1");
    if (z.size() != f.dimension() + 1) fail(ErrorCode::DimensionMismatch, "homogenized_field");
    const Eigen::Index n = f.dimension();
    const Vector pi = z.head(n);
    const double delta = z[n];
    const Vector p = scaled_top(f, big_n, pi, delta);
    const double lift = std::pow(delta, s + 1 - big_n);
    Vector out(n + 1);
    out.head(n) = lift * (p - pi.dot(p) * pi);
    out[n] = -lift * delta * pi.dot(p);
    return out;
  };
  if (const auto* p = std::get_if<PolynomialField>(&field)) return build(*p);
  if (const auto* h = std::get_if<HomogeneousSumField>(&field)) return build(*h);
  fail(ErrorCode::InvalidField, "homogenized field needs a polynomial or homogeneous-sum field");
}

}  // namespace infinitum
