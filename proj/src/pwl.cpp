#include "infinitum/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "infinitum/errors.hpp"

namespace infinitum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sign convention: first entry that is nonzero (relative to the largest) is positive.
Vector canonical_sign(Vector v) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12 * scale) {
      if (v[i] < 0.0) v = -v;
      break;
    }
  }
  return v;
}

struct Interval {
  double lo = -kInf;
  double hi = kInf;
};

Interval slab_of(const Guard& guard, const Vector& k) {
  Interval iv;
  for (const auto& h : guard.constraints) {
    const double t = h.a.dot(k);
    if ((h.a - t * k).norm() > 1e-10 * h.a.norm() || t == 0.0) {
      fail(ErrorCode::NotLure, "region boundaries are not hyperplanes orthogonal to a common normal");
    }
    const double bound = h.c / t;
    if (t > 0.0) {
      iv.hi = std::min(iv.hi, bound);
    } else {
      iv.lo = std::max(iv.lo, bound);
    }
  }
  return iv;
}

double matrix_scale(const std::vector<PwlRegionField::Region>& regions) {
  double s = 1.0;
  for (const auto& r : regions) s = std::max({s, r.A.cwiseAbs().maxCoeff(), r.b.cwiseAbs().maxCoeff()});
  return s;
}

}  // namespace

LureForm lure_extract(const PwlRegionField& field, LureAnchor anchor) {
  const auto& regions = field.regions();
  const int n = field.dimension();
  const double scale = matrix_scale(regions);
  const double tol = 1e-10 * scale;

  // Largest pairwise difference of linear parts.
  double biggest = 0.0;
  Matrix dmax;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t j = i + 1; j < regions.size(); ++j) {
      const Matrix d = regions[i].A - regions[j].A;
      if (d.norm() > biggest) {
        biggest = d.norm();
        dmax = d;
      }
    }
  }

  if (biggest <= tol) {
    for (const auto& r : regions) {
      if ((r.b - regions[0].b).cwiseAbs().maxCoeff() > tol) {
        fail(ErrorCode::Discontinuous, "regions share the linear part but differ in offset");
      }
    }
    LureForm affine{regions[0].A, regions[0].b, Vector::Unit(n, 0), {}, {0.0}, {1.0}};
    affine.validate();
    return affine;
  }

  Eigen::JacobiSVD<Matrix> svd(dmax, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() > 1 && sv[1] > 1e-10 * sv[0]) fail(ErrorCode::NotLure, "difference of linear parts has rank > 1");
  const Vector k = canonical_sign(svd.matrixV().col(0));
  const Vector b = canonical_sign(svd.matrixU().col(0));

  // Order the regions along k.
  std::vector<Interval> slabs;
  slabs.reserve(regions.size());
  for (const auto& r : regions) slabs.push_back(slab_of(r.guard, k));
  std::vector<std::size_t> order(regions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return slabs[a].lo < slabs[c].lo; });

  std::vector<double> taus;
  if (std::isfinite(slabs[order.front()].lo) || std::isfinite(slabs[order.back()].hi)) {
    fail(ErrorCode::InvalidPartition, "slabs along k do not cover the line");
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Interval& s = slabs[order[i]];
    if (!(s.lo < s.hi)) fail(ErrorCode::InvalidPartition, "empty slab");
    if (i + 1 < order.size()) {
      const double next = slabs[order[i + 1]].lo;
      if (std::abs(s.hi - next) > 1e-12 * std::max(1.0, std::abs(next))) {
        fail(ErrorCode::InvalidPartition, "slabs along k leave a gap or overlap");
      }
      taus.push_back(s.hi);
    }
  }

  // Exact continuity across each hyperplane k^T x = tau.
  const Matrix proj = Matrix::Identity(n, n) - k * k.transpose();
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const auto& lo = regions[order[i]];
    const auto& hi = regions[order[i + 1]];
    const Matrix d = hi.A - lo.A;
    const double gap = std::max((d * proj).cwiseAbs().maxCoeff(),
                                (d * k * taus[i] + hi.b - lo.b).cwiseAbs().maxCoeff());
    if (gap > 1e-9 * scale * std::max(1.0, std::abs(taus[i]))) {
      fail(ErrorCode::Discontinuous, "field jumps across k^T x = " + std::to_string(taus[i]));
    }
  }

  std::size_t pick = 0;  // position in `order`
  if (anchor == LureAnchor::Origin) {
    pick = order.size() - 1;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const Interval& s = slabs[order[i]];
      // On a boundary the k-positive side wins.
      if (s.lo <= 1e-12 && 0.0 < s.hi - 1e-12) {
        pick = i;
        break;
      }
    }
  }
  const auto& base = regions[order[pick]];

  LureForm lure;
  lure.A = base.A;
  lure.b = b;
  lure.k = k;
  lure.breaks = taus;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& r = regions[order[i]];
    const Matrix d = r.A - base.A;
    const double alpha = b.dot(d * k);
    if ((d - alpha * b * k.transpose()).cwiseAbs().maxCoeff() > tol) {
      fail(ErrorCode::NotLure, "linear parts do not differ by multiples of a common rank-one matrix");
    }
    const double beta = b.dot(r.b);
    if ((r.b - beta * b).cwiseAbs().maxCoeff() > tol) {
      fail(ErrorCode::NotLure, "region offsets are not multiples of the common direction b");
    }
    lure.slopes.push_back(i == pick ? 0.0 : alpha);
    lure.intercepts.push_back(beta);
  }
  // Re-derive intercepts outward from the anchor so phi is continuous to roundoff.
  for (std::size_t i = pick + 1; i < lure.slopes.size(); ++i) {
    const double t = lure.breaks[i - 1];
    lure.intercepts[i] = lure.slopes[i - 1] * t + lure.intercepts[i - 1] - lure.slopes[i] * t;
  }
  for (std::size_t i = pick; i-- > 0;) {
    const double t = lure.breaks[i];
    lure.intercepts[i] = lure.slopes[i + 1] * t + lure.intercepts[i + 1] - lure.slopes[i] * t;
  }
  lure.validate();
  return lure;
}

BoundarySet boundaries(const LureForm& lure) { return {lure.k, lure.breaks}; }

bool is_normalized(const LureForm& lure) {
  if (lure.k.size() == 0) return false;
  Vector e1 = Vector::Unit(lure.k.size(), 0);
  return (lure.k - e1).cwiseAbs().maxCoeff() <= 1e-12;
}

NormalizedLure lure_normalize(const LureForm& lure) {
  lure.validate();
  const double norm = lure.k.norm();
  if (norm == 0.0) fail(ErrorCode::ZeroNormal, "cannot normalize with k = 0");
  const int n = lure.dimension();
  const Vector khat = lure.k / norm;
  const Vector e1 = Vector::Unit(n, 0);
  Matrix m = Matrix::Identity(n, n);
  const Vector v = khat - e1;
  if (v.norm() > 0.0) m -= 2.0 * v * v.transpose() / v.squaredNorm();

  NormalizedLure out;
  out.M = m;
  out.form.A = m.transpose() * lure.A * m;
  out.form.b = m.transpose() * lure.b;
  out.form.k = e1;
  for (double t : lure.breaks) out.form.breaks.push_back(t / norm);
  for (double a : lure.slopes) out.form.slopes.push_back(a * norm);
  out.form.intercepts = lure.intercepts;
  return out;
}

ExternalMatrices external_matrices(const LureForm& lure) {
  return {lure.region_matrix(0), lure.region_matrix(lure.pieces() - 1)};
}

Vector pwl_compactified(const LureForm& lure, const SpherePoint& z) {
  if (!is_normalized(lure)) fail(ErrorCode::NotNormalized, "normalize the Lure form first (k = e_1)");
  const int n = lure.dimension();
  if (z.n() != n) fail(ErrorCode::DimensionMismatch, "pwl_compactified");
  const Vector p = z.pi();
  const double delta = z.height();
  const double z1 = p[0];
  // delta * phi(z1 / delta) = alpha_i z1 + beta_i delta, piece chosen without dividing.
  std::size_t piece = 0;
  while (piece < lure.breaks.size() && lure.breaks[piece] * delta < z1) ++piece;
  const double scaled_phi = lure.slopes[piece] * z1 + lure.intercepts[piece] * delta;
  const Vector inner = lure.A * p + scaled_phi * lure.b;
  Vector out(n + 1);
  out.head(n) = inner - p.dot(inner) * p;
  out[n] = -delta * p.dot(inner);
  return out;
}

Vector pwl_equator_field(const LureForm& lure, const EquatorPoint& ze) {
  if (!is_normalized(lure)) fail(ErrorCode::NotNormalized, "normalize the Lure form first (k = e_1)");
  const int n = lure.dimension();
  if (ze.n() != n) fail(ErrorCode::DimensionMismatch, "pwl_equator_field");
  const Vector p = ze.pi();
  Matrix a = lure.A;
  if (p[0] < 0.0) a = lure.region_matrix(0);
  if (p[0] > 0.0) a = lure.region_matrix(lure.pieces() - 1);
  const Vector w = a * p;
  Vector out = Vector::Zero(n + 1);
  out.head(n) = w - p.dot(w) * p;
  return out;
}

bool pwl_classify_null(const LureForm& lure) {
  if (!is_normalized(lure)) fail(ErrorCode::NotNormalized, "normalize the Lure form first (k = e_1)");
  const int n = lure.dimension();
  const auto ext = external_matrices(lure);
  auto scalar = [n](const Matrix& a) {
    const double lambda = a.trace() / n;
    return (a - lambda * Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10;
  };
  return scalar(ext.A0) && scalar(ext.Ap);
}

}  // namespace infinitum
