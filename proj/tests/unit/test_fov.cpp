#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ddestab/fov.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace ddestab;
using namespace ddestab::fov;
using numerics::CVector;

TEST_CASE("fov_boundary: identity is a single point") {
  const auto b = fov_boundary(CMatrix::Identity(3, 3), 64);
  CHECK(b.n_angles() == 64);
  CHECK(b.source_dim == 3);
  for (const Complex& z : b.points) CHECK(std::abs(z - 1.0) <= 1e-12);
  CHECK(numerical_radius(CMatrix::Identity(3, 3)) == doctest::Approx(1.0));
  CHECK(convex_hull(b.points).size() == 1);
}

TEST_CASE("fov_boundary: Hermitian matrix gives a real segment") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  const auto b = fov_boundary(d);
  const auto hull = convex_hull(b.points);
  REQUIRE(hull.size() == 2);
  CHECK(std::abs(hull[0] - 1.0) <= 1e-9);
  CHECK(std::abs(hull[1] - 2.0) <= 1e-9);
}

TEST_CASE("fov_boundary: normal matrix gives the hull of its spectrum") {
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = Complex(0, 1);
  d(2, 2) = -1.0;
  oracle::Rng rng(2);
  // Unitary similarity keeps it normal.
  const CMatrix q = rng.matrix(3).householderQr().householderQ();
  const CMatrix m = q * d * q.adjoint();
  const auto hull = convex_hull(fov_boundary(m).points);
  CHECK(hausdorff_distance(hull, convex_hull({1.0, Complex(0, 1), -1.0})) <= 1e-8);
}

TEST_CASE("numerical_radius of the 2x2 Jordan block") {
  CMatrix j(2, 2);
  j << 0, 1, 0, 0;
  CHECK(numerical_radius(j) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(numerical_radius_bound(j) >= 0.5);
  CHECK(numerical_radius_bound(j) <= 0.5 * (1 + 1e-3));
  CHECK(spectrum_in_fov_check(j));
}

TEST_CASE("numerical radius bracket contains the oracle value") {
  oracle::Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix m = rng.matrix(rng.integer(2, 6));
    // The oracle sweep undershoots by at most r (1 - cos(pi / 720)).
    const double ref = oracle::numerical_radius(m, 720);
    const auto b = fov_boundary(m);
    CHECK(b.inner_radius() <= ref * (1.0 + 1e-5));
    CHECK(b.outer_radius() >= ref - 1e-9);
    CHECK(b.outer_radius() - b.inner_radius() <= 1e-3 * ref);
    CHECK(b.inner_radius() >= numerics::spectral_radius(m) - 1e-8);
  }
}

TEST_CASE("support values agree with the oracle") {
  oracle::Rng rng(8);
  const CMatrix m = rng.matrix(5);
  const auto b = fov_boundary(m, 32);
  for (std::size_t k = 0; k < b.n_angles(); ++k) {
    CHECK(b.support[k] == doctest::Approx(oracle::support(m, b.angles[k])).epsilon(1e-9));
    CHECK((std::polar(1.0, b.angles[k]) * b.points[k]).real() == doctest::Approx(b.support[k]).epsilon(1e-9));
  }
}

TEST_CASE("transformed_matrix") {
  oracle::Rng rng(12);
  const CMatrix a = rng.spd(4);
  const CMatrix b = rng.matrix(4);
  const CMatrix t0 = transformed_matrix(a, b, 0.0);
  CHECK((a * t0 - b).cwiseAbs().maxCoeff() <= 1e-10);
  const CMatrix t2 = transformed_matrix(a, b, 2.0);
  CHECK((t2 * a - b).cwiseAbs().maxCoeff() <= 1e-10);
  const CMatrix t1 = transformed_matrix(a, b, 1.0);
  const CMatrix half = numerics::fractional_power(a, 0.5);
  CHECK((half * t1 * half - b).cwiseAbs().maxCoeff() <= 1e-9);

  // Identity A leaves B untouched for every p.
  for (double p : {0.0, 0.5, 1.0, 2.0}) {
    CHECK((transformed_matrix(CMatrix::Identity(4, 4), b, p) - b).cwiseAbs().maxCoeff() <= 1e-12);
  }

  CMatrix da = CMatrix::Zero(2, 2), db = CMatrix::Zero(2, 2);
  da(0, 0) = 1.0;
  da(1, 1) = 4.0;
  db(0, 0) = 2.0;
  db(1, 1) = 2.0;
  for (double p : {0.0, 1.0, 2.0, 0.3}) {
    const auto hull = convex_hull(transformed_fov(da, db, p).points);
    REQUIRE(hull.size() == 2);
    CHECK(std::abs(hull[0] - 0.5) <= 1e-9);
    CHECK(std::abs(hull[1] - 2.0) <= 1e-9);
  }

  // Non-Hermitian A is fine for p = 0 and p = 2 only.
  const CMatrix general = rng.matrix(4) + 4.0 * CMatrix::Identity(4, 4);
  CHECK_NOTHROW(transformed_matrix(general, b, 0.0));
  CHECK_NOTHROW(transformed_matrix(general, b, 2.0));
  CHECK_THROWS_AS(transformed_matrix(general, b, 1.0), Error);
}

TEST_CASE("spectrum_in_fov_check on random matrices") {
  oracle::Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) CHECK(spectrum_in_fov_check(rng.matrix(8)));
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  CHECK(spectrum_in_fov_check(d));
}

TEST_CASE("convex geometry helpers") {
  const std::vector<Complex> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}};
  const auto hull = convex_hull(square);
  CHECK(hull.size() == 4);
  CHECK(signed_distance(hull, {0.5, 0.5}) == doctest::Approx(-0.5));
  CHECK(signed_distance(hull, {2.0, 0.5}) == doctest::Approx(1.0));
  CHECK(hull_contains(hull, {1.0 + 1e-9, 0.5}, 1e-8));
  CHECK_FALSE(hull_contains(hull, {1.1, 0.5}, 1e-8));
  const auto sum = minkowski_sum(hull, convex_hull({{0, 0}, {1, 0}}));
  CHECK(sum.size() == 4);
  CHECK(hausdorff_distance(sum, convex_hull({{0, 0}, {2, 0}, {2, 1}, {0, 1}})) <= 1e-12);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(fov_boundary(CMatrix::Identity(2, 2), 4), Error);
  CHECK_THROWS_AS(fov_boundary(CMatrix::Zero(2, 3)), Error);
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(fov_boundary(bad), Error);
}

TEST_CASE("property suite on random matrices") {
  for (const auto& t : {props::fov_convexity(1, 10), props::fov_spectrum(2, 20), props::fov_subadditivity(3, 10),
                        props::fov_scaling(4, 10), props::fov_normal(5, 20), props::fov_hermitian(6, 20)}) {
    INFO(t.line());
    CHECK(t.ok());
  }
}

TEST_CASE("spectrum of AB inside F(A)F(B) for positive definite B") {
  oracle::Rng rng(77);
  for (int k = 0; k < 20; ++k) {
    const auto n = rng.integer(2, 5);
    const CMatrix a = rng.matrix(n), b = rng.spd(n);
    const auto outer = convex_hull(fov_boundary(a).outer_vertices());
    const auto bev = oracle::hermitian_eigenvalues(b);
    for (const Complex& z : oracle::eigenvalues(a * b)) {
      // z = s w with s in [bmin, bmax] and w in F(A).
      bool found = false;
      for (int j = 0; j <= 400 && !found; ++j) {
        const double s = bev.front() + (bev.back() - bev.front()) * j / 400.0;
        found = signed_distance(outer, z / s) <= 1e-2 * (1.0 + std::abs(z));
      }
      CHECK(found);
    }
  }
}
