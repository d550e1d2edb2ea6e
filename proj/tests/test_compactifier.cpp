#include <cmath>
#include <numbers>

#include "doctest.h"
#include "infinitum/compactifier.hpp"
#include "infinitum/errors.hpp"
#include "infinitum/poly_analysis.hpp"
#include "oracles.hpp"

using namespace infinitum;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

PolynomialField quadratic_swap() {
  return PolynomialField(2, {{MultiIndex({0, 2}), vec({1, 0})}, {MultiIndex({2, 0}), vec({0, 1})}});
}

PolynomialField rotation_field() {
  return PolynomialField(2, {{MultiIndex({0, 1}), vec({-1, 0})}, {MultiIndex({1, 0}), vec({0, 1})}});
}

Vector g_minus(const Vector& z) {
  return vec({z[1] - 2 * z[0] * z[0] * z[1], z[0] - 2 * z[0] * z[1] * z[1], -2 * z[0] * z[1] * z[2]});
}

Vector g_zero(const Vector& z) {
  const double z1 = z[0], z2 = z[1], z3 = z[2];
  return vec({z1 + z2 + z1 * z1 / z3 - z1 * z1 * z1 - z1 * z2 * z2 - 2 * z1 * z1 * z2 - z1 * z1 * z1 * z1 / z3 -
                  z1 * z1 * z2 * z2 / z3,
              z1 + z2 + z1 * z2 / z3 - z1 * z1 * z2 - 2 * z1 * z2 * z2 - z2 * z2 * z2 - z1 * z1 * z1 * z2 / z3 -
                  z1 * z2 * z2 * z2 / z3,
              -(z1 * z1 * z1 + z1 * z1 * z3 + z1 * z2 * z2 + 2 * z1 * z2 * z3 + z2 * z2 * z3)});
}

Vector g_plus(const Vector& z) {
  const double z1 = z[0], z2 = z[1], z3 = z[2];
  return vec({2 * z1 - 2 * z1 * z1 * z1 + z2 - 2 * z1 * z1 * z2 - 2 * z1 * z2 * z2,
              z1 + 2 * z2 - 2 * z1 * z1 * z2 - 2 * z1 * z2 * z2 - 2 * z2 * z2 * z2,
              -2 * z1 * z1 * z3 - 2 * z1 * z2 * z3 - 2 * z2 * z2 * z3});
}

}  // namespace

TEST_SUITE("compactifier") {
  TEST_CASE("projected field basics") {
    const PolynomialField id(2, {{MultiIndex({1, 0}), vec({1, 0})}, {MultiIndex({0, 1}), vec({0, 1})}});
    CHECK(projected_field(id, SpherePoint{vec({0, 0, 1})}).norm() == 0.0);
    CHECK_THROWS_AS(projected_field(id, SpherePoint{vec({1, 0, 0})}), Error);

    oracle::Gen g(20);
    const PolynomialField p = oracle::random_polynomial(g, 3, 3);
    for (int s = 0; s < 100; ++s) {
      const SpherePoint z = g.hemisphere(3);
      const Vector direct = oracle::g_direct([&](const Vector& x) { return p.eval(x); }, z.coords);
      CHECK(oracle::rel_err(projected_field(p, z), direct) <= 1e-12);
    }
  }

  TEST_CASE("worked piecewise example matches the closed-form projected fields") {
    const VectorField f = NamedFixture::make(FixtureTag::PiecewiseExample, 2);
    oracle::Gen g(21);
    int counts[3] = {0, 0, 0};
    double worst = 0.0;
    while (counts[0] < 100 || counts[1] < 100 || counts[2] < 100) {
      const SpherePoint z = g.hemisphere(2);
      const double z1 = z.coords[0], z3 = z.coords[2];
      const Vector got = projected_field(f, z);
      int region = -1;
      Vector want;
      if (z1 < -z3) {
        region = 0;
        want = g_minus(z.coords);
      } else if (std::abs(z1) < z3) {
        region = 1;
        want = g_zero(z.coords);
      } else if (z1 > z3) {
        region = 2;
        want = g_plus(z.coords);
      }
      if (region < 0 || counts[region] >= 100) continue;
      ++counts[region];
      worst = std::max(worst, (got - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff()));
    }
    CHECK(worst <= 1e-12);

    const Regularizer rho = Regularizer::power(1);
    for (const auto& ze : equator_grid(2, 64)) {
      const LimitResult l = equator_limit(f, rho, ze);
      REQUIRE(l.value.has_value());
      CHECK(l.value->norm() <= 1e-8);
    }
  }

  TEST_CASE("meridian function") {
    oracle::Gen g(22);
    const PolynomialField p = oracle::random_polynomial(g, 2, 3);
    for (int s = 0; s < 200; ++s) {
      const EquatorPoint ze = g.equator(2);
      const double d = g.uniform(1e-3, 1.0);
      CHECK(oracle::rel_err(meridian_G(p, ze, d), projected_field(p, parallel_coords(ze, d))) <= 1e-12);
    }
    CHECK_THROWS_AS(meridian_G(p, g.equator(2), 0.0), Error);
  }

  TEST_CASE("exotic fixture meridian formula") {
    const VectorField ex = NamedFixture::make(FixtureTag::ExoticSphereG, 2);
    for (double d : {0.5, 0.1, 0.02}) {
      const double s = std::sqrt(1.0 - d * d);
      // At z1 = 1 the denominator reduces to 1.
      const Vector g1 = meridian_G(ex, EquatorPoint::checked(vec({1, 0, 0})), d);
      CHECK(std::abs(g1[0] - d * std::exp(s / d) / std::sqrt((1 - d * d) * 1.0 + d * d)) <= 1e-12 * std::abs(g1[0]));
      oracle::Gen g(23);
      for (int k = 0; k < 20; ++k) {
        const EquatorPoint ze = g.equator(2);
        const Vector gz = meridian_G(ex, ze, d);
        const SpherePoint zd = parallel_coords(ze, d);
        CHECK(std::abs(gz.dot(zd.coords)) <= 1e-12 * gz.norm());
        CHECK(std::abs(gz.norm() - std::exp(ze.coords[0] * s / d)) <= 1e-12 * gz.norm());
      }
    }
  }

  TEST_CASE("cos_radial vanishes along the critical radii") {
    const VectorField c = NamedFixture::make(FixtureTag::CosRadial, 2);
    oracle::Gen g(24);
    for (int k = 5; k < 200; k += 7) {
      const double r = std::numbers::pi / 2.0 + k * std::numbers::pi;
      const double d = 1.0 / std::sqrt(1.0 + r * r);
      CHECK(meridian_G(c, g.equator(2), d).norm() <= 1e-12);
    }
  }

  TEST_CASE("tangency across field families") {
    oracle::Gen g(25);
    const LureForm lure = oracle::random_lure(g, 2, 2);
    std::vector<std::pair<VectorField, Regularizer>> cases = {
        {oracle::random_polynomial(g, 2, 3), Regularizer::power(2)},
        {oracle::random_polynomial(g, 3, 2), Regularizer::power(1)},
        {lure, Regularizer::one()},
        {oracle::region_form(lure), Regularizer::one()},
        {NamedFixture::make(FixtureTag::CosRadial, 3), Regularizer::power(0)},
        {NamedFixture::make(FixtureTag::NormRadial, 2), Regularizer::power(1)},
        {NamedFixture::make(FixtureTag::NormRotation, 3), Regularizer::power(1)},
        {NamedFixture::make(FixtureTag::PiecewiseExample, 2), Regularizer::power(1)},
        {NamedFixture::make(FixtureTag::ExoticSphereG, 2), Regularizer::power(0)}};
    for (const auto& [field, rho] : cases) {
      const int n = dimension(field);
      for (int s = 0; s < 1000 / static_cast<int>(cases.size()) + 1; ++s) {
        SpherePoint z = g.hemisphere(n);
        if (is_sphere_only(field) && z.height() < 0.05) continue;
        const Vector F = regularized_field(field, rho, z);
        CHECK(std::abs(F.dot(z.coords)) <= 1e-10 * std::max(1.0, F.norm()));
      }
    }
  }

  TEST_CASE("delta^{N-1} keeps polynomial fields bounded near the equator") {
    oracle::Gen g(26);
    for (int trial = 0; trial < 5; ++trial) {
      const int big_n = g.integer(1, 4);
      const PolynomialField p = oracle::random_polynomial(g, 2, big_n);
      const Regularizer rho = Regularizer::power(big_n - 1);
      double worst = 0.0;
      for (double d = 1.0; d >= 1e-8; d /= 3.0) {
        worst = std::max(worst, regularized_field(p, rho, parallel_coords(g.equator(2), d)).norm());
      }
      CHECK(worst <= 100.0);
    }
  }

  TEST_CASE("equator limit of the quadratic swap field") {
    const EquatorPoint e1 = EquatorPoint::checked(vec({1, 0, 0}));
    const PolynomialField f = quadratic_swap();
    const LimitResult l = equator_limit(f, Regularizer::power(1), e1);
    REQUIRE(l.value.has_value());
    CHECK(((*l.value) - vec({0, 1, 0})).cwiseAbs().maxCoeff() <= 1e-10);
    const Vector brute = oracle::brute_limit([&](double d) -> Vector { return d * meridian_G(f, e1, d); });
    CHECK((brute - vec({0, 1, 0})).cwiseAbs().maxCoeff() <= 1e-6);
  }

  TEST_CASE("cos_radial equator limit is null") {
    const VectorField c = NamedFixture::make(FixtureTag::CosRadial, 2);
    const EquatorReport rep = equator_report(c, Regularizer::power(0), equator_grid(2, 64));
    CHECK(rep.verdict == NullVerdict::Null);
    CHECK(rep.max_norm <= 1e-8);

    oracle::Gen g(27);
    const EquatorPoint ze = g.equator(2);
    CHECK_THROWS_AS(nonnull_probe(c, ze, 0.1, {ze}), Error);
    const ProbeResult pr = resolve_probe_auto(c, equator_grid(2, 64));
    CHECK_FALSE(pr.rho.has_value());
    CHECK(pr.report.verdict == NullVerdict::Null);
    CHECK(pr.report.max_norm <= 1e-8);
  }

  TEST_CASE("probe on the rotation field") {
    const PolynomialField rot = rotation_field();
    const auto grid = equator_grid(2, 32);
    const ProbeResult pr = nonnull_probe(rot, grid[3], 0.1, grid);
    REQUIRE(pr.rho.has_value());
    CHECK(pr.report.verdict == NullVerdict::NonNull);
    const LimitResult at_anchor = equator_limit(rot, *pr.rho, grid[3]);
    REQUIRE(at_anchor.value.has_value());
    CHECK(std::abs(at_anchor.value->norm() - 1.0) <= 1e-6);
    // Closed form is the rotation restricted to E; here with rho = 1 it is already unit speed.
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vector want = equator_field_poly(rot, grid[i]);
      CHECK((*pr.report.limits[i].value - want).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }

  TEST_CASE("exotic fixture under a probe") {
    const VectorField ex = NamedFixture::make(FixtureTag::ExoticSphereG, 2);
    const EquatorPoint zbar = EquatorPoint::from_direction(vec({0.5, std::sqrt(0.75)}));
    const auto grid = equator_grid(2, 64);
    const ProbeResult pr = nonnull_probe(ex, zbar, 0.1, grid);
    REQUIRE(pr.rho.has_value());
    CHECK(pr.report.verdict == NullVerdict::NotCompactifiedByThisRho);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double z1 = grid[i].coords[0];
      if (std::abs(z1 - 0.5) < 0.05) continue;
      const LimitResult& l = pr.report.limits[i];
      if (z1 > 0.5) {
        CHECK(l.diverged);
      } else {
        REQUIRE(l.value.has_value());
        CHECK(l.value->norm() <= 1e-8);
      }
    }
    const LimitResult at = equator_limit(ex, *pr.rho, zbar);
    REQUIRE(at.value.has_value());
    CHECK(std::abs(at.value->norm() - 1.0) <= 1e-6);
  }

  TEST_CASE("invariance test") {
    oracle::Gen g(28);
    for (int trial = 0; trial < 5; ++trial) {
      const int big_n = g.integer(2, 4);
      const PolynomialField p = oracle::random_polynomial(g, 2, big_n);
      double worst_invariant = 0.0;
      double best_noninvariant = 0.0;
      for (const auto& ze : equator_grid(2, 16)) {
        const LimitResult a = invariance_test(p, Regularizer::power(big_n - 1), ze);
        REQUIRE(a.value.has_value());
        worst_invariant = std::max(worst_invariant, (*a.value)[0]);
        const LimitResult c = invariance_test(p, Regularizer::power(big_n + 1.5), ze);
        REQUIRE(c.value.has_value());
        worst_invariant = std::max(worst_invariant, (*c.value)[0]);
        const LimitResult b = invariance_test(p, Regularizer::power(big_n - 2), ze);
        if (b.value) best_noninvariant = std::max(best_noninvariant, (*b.value)[0]);
      }
      CHECK(worst_invariant <= 1e-8);
      CHECK(best_noninvariant >= 1e-6);
    }
  }

  TEST_CASE("equivalence of regularizers") {
    oracle::Gen g(29);
    const int big_n = 3;
    const PolynomialField p = oracle::random_polynomial(g, 2, big_n);
    const auto grid = equator_grid(2, 32);
    const ProbeResult pr = resolve_probe_auto(p, grid);
    REQUIRE(pr.rho.has_value());
    std::vector<SpherePoint> pts;
    for (const auto& ze : grid) pts.push_back(ze.as_sphere_point());
    for (int s = 0; s < 200; ++s) pts.push_back(g.hemisphere(2));
    const EquivalenceReport rep = equivalence_check(p, Regularizer::power(big_n - 1), *pr.rho, pts);
    CHECK(rep.zero_set_mismatches == 0);
    CHECK(rep.compared >= 200);
    CHECK(rep.max_direction_error <= 1e-8);

    std::vector<SpherePoint> interior;
    for (int s = 0; s < 200; ++s) interior.push_back(g.hemisphere(2));
    const EquivalenceReport pos = equivalence_check(p, Regularizer::power(1), Regularizer::power(5), interior);
    // delta^5 g can drop below the nonzero threshold at low latitude; such points are skipped.
    CHECK(pos.compared + pos.skipped == 200);
    CHECK(pos.compared >= 180);
    CHECK(pos.max_direction_error <= 1e-12);

    // f^N(e_1) = 0: both compactifications vanish there.
    const PolynomialField z(2, {{MultiIndex({0, 2}), vec({1, 0})}, {MultiIndex({1, 1}), vec({0, 1})}});
    const ProbeResult pz = resolve_probe_auto(z, grid);
    REQUIRE(pz.rho.has_value());
    std::vector<SpherePoint> eq;
    for (const auto& ze : grid) eq.push_back(ze.as_sphere_point());
    const EquivalenceReport zr = equivalence_check(z, Regularizer::power(1), *pz.rho, eq);
    CHECK(zr.zero_set_mismatches == 0);
    CHECK(zr.max_direction_error <= 1e-8);
  }

  TEST_CASE("verdict summary") {
    const EquatorPoint e = EquatorPoint::checked(vec({1, 0, 0}));
    LimitResult zero{Vector::Zero(3), 0.0, false, {}};
    LimitResult big{vec({0, 1, 0}), 0.0, false, {}};
    LimitResult bad;
    bad.diverged = true;
    CHECK(summarize("x", {e, e}, {zero, zero}).verdict == NullVerdict::Null);
    CHECK(summarize("x", {e, e}, {zero, big}).verdict == NullVerdict::NonNull);
    CHECK(summarize("x", {e, e}, {big, bad}).verdict == NullVerdict::NotCompactifiedByThisRho);
  }
}
