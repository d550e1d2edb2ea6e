#include <cmath>

#include "doctest.h"
#include "infinitum/errors.hpp"
#include "infinitum/sphere.hpp"
#include "oracles.hpp"

using namespace infinitum;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_SUITE("sphere") {
  TEST_CASE("projection examples") {
    CHECK((project(Vector::Zero(2)).coords - vec({0, 0, 1})).norm() == 0.0);
    CHECK((project(vec({1, 0})).coords - vec({1, 0, 1}) / std::sqrt(2.0)).norm() <= 1e-16);
    CHECK((project(vec({3, 4})).coords - vec({3, 4, 1}) / std::sqrt(26.0)).norm() <= 1e-16);
    CHECK_THROWS_AS(project(vec({NAN, 0})), Error);
  }

  TEST_CASE("projection is unit norm, decreasing in height and survives huge inputs") {
    oracle::Gen g(10);
    for (int s = 0; s < 1000; ++s) {
      const int n = g.integer(1, 5);
      const Vector x = g.gaussian(n) * std::pow(10.0, g.uniform(-3, 200));
      const SpherePoint z = project(x);
      CHECK(std::abs(z.coords.norm() - 1.0) <= 1e-12);
      CHECK(z.height() > 0.0);
    }
    const Vector u = g.unit(3);
    double prev = 2.0;
    for (double r = 0.0; r < 1e300; r = r * 10.0 + 1.0) {
      const double h = project(r * u).height();
      CHECK(h < prev);
      prev = h;
    }
  }

  TEST_CASE("unproject round trip") {
    CHECK(unproject(SpherePoint{vec({0, 0, 1})}).norm() == 0.0);
    CHECK((unproject(SpherePoint{vec({1, 0, 1}) / std::sqrt(2.0)}) - vec({1, 0})).norm() <= 1e-15);
    oracle::Gen g(11);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
      const int n = g.integer(1, 5);
      const Vector x = g.gaussian(n) * std::pow(10.0, g.uniform(-3, 6)) / std::sqrt(n);
      const Vector back = unproject(project(x));
      worst = std::max(worst, (back - x).norm() / std::max(1e-300, x.norm()));
    }
    CHECK(worst <= 1e-12);
    CHECK_THROWS_AS(unproject(SpherePoint{vec({1, 0, 0})}), Error);
  }

  TEST_CASE("jacobian") {
    const Matrix j0 = jacobian(SpherePoint{vec({0, 0, 0, 1})});
    CHECK((j0.topRows(3) - Matrix::Identity(3, 3)).norm() == 0.0);
    CHECK(j0.row(3).norm() == 0.0);

    oracle::Gen g(12);
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      const int n = g.integer(1, 4);
      const Vector x = g.gaussian(n) * g.uniform(0.1, 3.0);
      const SpherePoint z = project(x);
      const Matrix j = jacobian(z);
      const Matrix fd = oracle::fd_jacobian(x);
      worst = std::max(worst, (j - fd).norm() / j.norm());
      for (Eigen::Index c = 0; c < n; ++c) CHECK(std::abs(z.coords.dot(j.col(c))) <= 1e-12);
    }
    CHECK(worst <= 1e-6);
    CHECK_THROWS_AS(jacobian(SpherePoint{vec({0, 1, 0})}), Error);
  }

  TEST_CASE("meridian coordinates") {
    const EquatorPoint e = EquatorPoint::checked(vec({1, 0, 0}));
    CHECK((parallel_coords(e, 1.0).coords - vec({0, 0, 1})).norm() == 0.0);
    CHECK((parallel_coords(e, 0.0).coords - e.coords).norm() == 0.0);
    CHECK((parallel_coords(e, 0.6).coords - vec({0.8, 0, 0.6})).norm() <= 1e-16);
    CHECK_THROWS_AS(parallel_coords(e, 1.5), Error);
    CHECK_THROWS_AS(parallel_coords(e, -0.1), Error);

    const auto [ze, d] = split(SpherePoint{vec({0.8, 0, 0.6})});
    CHECK((ze.coords - e.coords).norm() <= 1e-15);
    CHECK(d == 0.6);
    const auto [ze2, d2] = split(SpherePoint{e.coords});
    CHECK((ze2.coords - e.coords).norm() == 0.0);
    CHECK(d2 == 0.0);
    CHECK_THROWS_AS(split(SpherePoint{vec({0, 0, 1})}), Error);

    oracle::Gen g(13);
    for (int s = 0; s < 1000; ++s) {
      const int n = g.integer(1, 5);
      const SpherePoint z = g.hemisphere(n);
      const auto [eq, delta] = split(z);
      CHECK(eq.coords[n] == 0.0);
      const SpherePoint back = parallel_coords(eq, delta);
      CHECK((back.coords - z.coords).norm() <= 1e-12);
      CHECK(back.height() == delta);
      CHECK(std::abs(back.coords.norm() - 1.0) <= 1e-12);
      CHECK((back.pi() - std::sqrt(1.0 - delta * delta) * eq.pi()).norm() <= 1e-15);
    }
  }

  TEST_CASE("equator grid") {
    CHECK(equator_grid(2, 32).size() == 32);
    CHECK(equator_grid(3, 8).size() == 64);
    CHECK(equator_grid(4, 5).size() == 125);
    CHECK(equator_grid(1, 9).size() == 2);
    for (const auto& p : equator_grid(3, 16, 0.3, 7)) {
      CHECK(p.coords[3] == 0.0);
      CHECK(std::abs(p.coords.norm() - 1.0) <= 1e-15);
    }
    CHECK((equator_grid(2, 32)[0].coords - vec({1, 0, 0})).norm() == 0.0);
    const auto a = equator_grid(3, 8, 0.5, 1);
    const auto b = equator_grid(3, 8, 0.5, 1);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i].coords - b[i].coords).norm() == 0.0);
  }
}
