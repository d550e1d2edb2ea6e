#include <cmath>
#include <limits>

#include "doctest.h"
#include "infinitum/compactifier.hpp"
#include "infinitum/errors.hpp"
#include "infinitum/pwl.hpp"
#include "oracles.hpp"

using namespace infinitum;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

template <class F>
std::optional<ErrorCode> code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// A = lambda I - alpha_0 b k^T and equal outer slopes, so A_0 = A_p = lambda I.
LureForm null_lure(oracle::Gen& g, int n, int p) {
  LureForm l = oracle::random_lure(g, n, p);
  l.slopes.back() = l.slopes.front();
  // Rebuild intercepts for continuity after the change of the last slope.
  for (int i = 1; i < l.pieces(); ++i) {
    const double t = l.breaks[static_cast<std::size_t>(i - 1)];
    l.intercepts[static_cast<std::size_t>(i)] =
        l.slopes[static_cast<std::size_t>(i - 1)] * t + l.intercepts[static_cast<std::size_t>(i - 1)] -
        l.slopes[static_cast<std::size_t>(i)] * t;
  }
  l.A = g.uniform(-2.0, 2.0) * Matrix::Identity(n, n) - l.slopes.front() * l.b * l.k.transpose();
  return l;
}

double grid_max(const LureForm& normalized, int n) {
  double m = 0.0;
  for (const auto& ze : equator_grid(n, n == 2 ? 64 : 16)) m = std::max(m, pwl_equator_field(normalized, ze).norm());
  return m;
}

}  // namespace

TEST_SUITE("pwl") {
  TEST_CASE("lure round trip on random systems") {
    oracle::Gen g(40);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = g.integer(2, 4);
      const int p = g.integer(1, 3);
      const LureForm l = oracle::random_lure(g, n, p);
      const PwlRegionField regions = oracle::region_form(l);
      for (LureAnchor anchor : {LureAnchor::Origin, LureAnchor::Leftmost}) {
        const LureForm e = lure_extract(regions, anchor);
        CHECK(e.pieces() == p + 1);
        e.validate();
        for (int s = 0; s < 500; ++s) {
          const Vector x = g.gaussian(n) * std::pow(10.0, g.uniform(-1, 1));
          worst = std::max(worst, oracle::rel_err(e.eval(x), regions.eval(x)));
        }
      }
    }
    CHECK(worst <= 1e-12);
  }

  TEST_CASE("anchor conventions") {
    oracle::Gen g(41);
    const LureForm l = oracle::random_lure(g, 3, 2);
    const LureForm left = lure_extract(oracle::region_form(l), LureAnchor::Leftmost);
    CHECK(left.slopes.front() == 0.0);
    const LureForm origin = lure_extract(oracle::region_form(l), LureAnchor::Origin);
    CHECK(origin.slopes[static_cast<std::size_t>(origin.piece_at(0.0))] == 0.0);
    CHECK(left.k.norm() > 0.0);
  }

  TEST_CASE("single affine region") {
    const Matrix A = (Matrix(2, 2) << 1, 2, 3, 4).finished();
    const PwlRegionField one(2, {{A, vec({1, -1}), Guard{}}});
    const LureForm l = lure_extract(one);
    CHECK(l.breaks.empty());
    CHECK(l.pieces() == 1);
    const Vector x = vec({0.3, -0.7});
    CHECK((l.eval(x) - (A * x + vec({1, -1}))).norm() <= 1e-15);
  }

  TEST_CASE("non-parallel or non-rank-one partitions are rejected") {
    const double inf = std::numeric_limits<double>::infinity();
    // |x_1| e_1 + |x_2| e_2 over the four quadrants.
    std::vector<PwlRegionField::Region> quads;
    for (int s1 : {-1, 1}) {
      for (int s2 : {-1, 1}) {
        Guard gd;
        gd.constraints.push_back({vec({-static_cast<double>(s1), 0}), 0.0, s1 > 0});
        gd.constraints.push_back({vec({0, -static_cast<double>(s2)}), 0.0, s2 > 0});
        quads.push_back({(Matrix(2, 2) << s1, 0, 0, s2).finished(), Vector::Zero(2), gd});
      }
    }
    const PwlRegionField abs_field(2, quads);
    CHECK(code_of([&] { lure_extract(abs_field); }) == ErrorCode::NotLure);

    // Parallel slabs whose linear parts differ by a rank-two matrix cannot be continuous.
    const Vector k = vec({1, 0});
    const auto bad = [&] {
      PwlRegionField(2, {{Matrix::Identity(2, 2), Vector::Zero(2), Guard::slab(k, -inf, 0)},
                         {-Matrix::Identity(2, 2), Vector::Zero(2), Guard::slab(k, 0, inf)}});
    };
    CHECK(code_of(bad) == ErrorCode::Discontinuous);
  }

  TEST_CASE("normalization is an orthogonal conjugacy") {
    oracle::Gen g(42);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = g.integer(1, 4);
      const LureForm l = oracle::random_lure(g, n, g.integer(0, 3));
      const NormalizedLure nl = lure_normalize(l);
      CHECK(is_normalized(nl.form));
      CHECK((nl.M.transpose() * nl.M - Matrix::Identity(n, n)).norm() <= 1e-12);
      CHECK((nl.M.col(0) - l.k / l.k.norm()).norm() <= 1e-12);
      for (int s = 0; s < 50; ++s) {
        const Vector y = g.gaussian(n) * 3.0;
        CHECK(oracle::rel_err(nl.form.eval(y), nl.M.transpose() * l.eval(nl.M * y)) <= 1e-12);
      }
      const BoundarySet bs = boundaries(nl.form);
      for (std::size_t i = 0; i < bs.taus.size(); ++i) {
        CHECK(std::abs(bs.taus[i] - l.breaks[i] / l.k.norm()) <= 1e-12 * (1 + std::abs(bs.taus[i])));
      }
    }
    LureForm zero = oracle::random_lure(g, 2, 1);
    zero.k.setZero();
    CHECK(code_of([&] { lure_normalize(zero); }) == ErrorCode::ZeroNormal);
    CHECK(code_of([&] { pwl_classify_null(oracle::random_lure(g, 2, 1)); }) == ErrorCode::NotNormalized);
  }

  TEST_CASE("external matrices") {
    oracle::Gen g(43);
    const LureForm l = oracle::random_lure(g, 3, 2);
    const ExternalMatrices em = external_matrices(l);
    CHECK((em.A0 - (l.A + l.slopes.front() * l.b * l.k.transpose())).norm() <= 1e-14);
    CHECK((em.Ap - (l.A + l.slopes.back() * l.b * l.k.transpose())).norm() <= 1e-14);
  }

  TEST_CASE("compactified field matches the generic construction") {
    oracle::Gen g(44);
    for (int trial = 0; trial < 10; ++trial) {
      const int n = g.integer(2, 3);
      const LureForm nl = lure_normalize(oracle::random_lure(g, n, g.integer(0, 3))).form;
      for (int s = 0; s < 100; ++s) {
        const SpherePoint z = g.hemisphere(n);
        CHECK(oracle::rel_err(pwl_compactified(nl, z), regularized_field(nl, Regularizer::one(), z)) <= 1e-12);
      }
      for (const auto& ze : equator_grid(n, 6)) {
        const LimitResult lim = equator_limit(nl, Regularizer::one(), ze);
        REQUIRE(lim.value.has_value());
        CHECK((*lim.value - pwl_equator_field(nl, ze)).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((pwl_compactified(nl, ze.as_sphere_point()) - pwl_equator_field(nl, ze)).norm() <= 1e-15);
      }
    }
  }

  TEST_CASE("equator field is continuous across the seam") {
    oracle::Gen g(45);
    const LureForm nl = lure_normalize(oracle::random_lure(g, 3, 2)).form;
    for (int s = 0; s < 50; ++s) {
      Vector u = g.gaussian(3);
      u[0] = 0.0;
      for (double eps : {1e-6, 1e-9}) {
        Vector a = u, b = u;
        a[0] = eps;
        b[0] = -eps;
        const Vector va = pwl_equator_field(nl, EquatorPoint::from_direction(a));
        const Vector vb = pwl_equator_field(nl, EquatorPoint::from_direction(b));
        CHECK((va - vb).norm() <= 100.0 * eps * (1.0 + nl.A.norm() + nl.b.norm()));
      }
    }
  }

  TEST_CASE("classification agrees with the equator grid") {
    oracle::Gen g(46);
    int disagreements = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = g.integer(2, 3);
      for (bool want_null : {true, false}) {
        const LureForm l = want_null ? null_lure(g, n, g.integer(0, 3)) : oracle::random_lure(g, n, g.integer(0, 3));
        const LureForm nl = lure_normalize(l).form;
        const bool verdict = pwl_classify_null(nl);
        const double m = grid_max(nl, n);
        CHECK(verdict == want_null);
        if (verdict ? m > 1e-8 : m < 1e-6) ++disagreements;
      }
    }
    CHECK(disagreements == 0);
  }
}
