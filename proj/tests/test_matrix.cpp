#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "eprb/matrix.hpp"
#include "eprb/rng.hpp"
#include "test_util.hpp"

using eprb::ComplexMatrix;
using eprb::cplx;

TEST_CASE("basic arithmetic") {
  ComplexMatrix z(2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  ComplexMatrix x(2);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;

  const ComplexMatrix zx = z * x;
  CHECK(zx(0, 1) == cplx(1.0));
  CHECK(zx(1, 0) == cplx(-1.0));
  CHECK(zx.trace() == cplx(0.0));

  const ComplexMatrix y = cplx(0.0, 0.5) * (x * z - z * x);
  CHECK(y.is_hermitian(0.0));
  CHECK(y(0, 1) == cplx(0.0, -1.0));
  CHECK(y(1, 0) == cplx(0.0, 1.0));

  CHECK_THROWS_AS(z * ComplexMatrix(4), std::invalid_argument);
}

TEST_CASE("kron uses subsystem-1-major ordering") {
  ComplexMatrix z(2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  const ComplexMatrix zz = kron(z, z);
  CHECK(zz(0, 0) == cplx(1.0));
  CHECK(zz(1, 1) == cplx(-1.0));
  CHECK(zz(2, 2) == cplx(-1.0));
  CHECK(zz(3, 3) == cplx(1.0));

  const std::vector<cplx> up = {1.0, 0.0}, down = {0.0, 1.0};
  const std::vector<cplx> ud = eprb::kron(up, down);
  CHECK(ud[1] == cplx(1.0));  // |+-> sits at index 1
}

TEST_CASE("hermitian eigensystem on known matrices") {
  ComplexMatrix z(2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  const auto es = hermitian_eigensystem(z);
  CHECK(es.values[0] == Catch::Approx(-1.0).margin(1e-14));
  CHECK(es.values[1] == Catch::Approx(1.0).margin(1e-14));
  CHECK(std::abs(es.vectors(1, 0)) == Catch::Approx(1.0).margin(1e-14));
  CHECK(std::abs(es.vectors(0, 1)) == Catch::Approx(1.0).margin(1e-14));

  // traceless symmetric 2x2 with unit determinant magnitude: spectrum is
  // exactly +-1 by the characteristic polynomial, independent of the solver
  const double c = std::cos(std::numbers::pi / 4.0), s = std::sin(std::numbers::pi / 4.0);
  ComplexMatrix a(2);
  a(0, 0) = c;
  a(0, 1) = s;
  a(1, 0) = s;
  a(1, 1) = -c;
  const double det = -(c * c) - s * s;
  CHECK(det == Catch::Approx(-1.0).margin(1e-15));
  const auto es2 = hermitian_eigensystem(a);
  CHECK(es2.values[0] == Catch::Approx(-1.0).margin(1e-12));
  CHECK(es2.values[1] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("eigensystem reconstructs random hermitian matrices") {
  eprb::RngStream rng(7181);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = trial % 2 == 0 ? 2 : 4;
    const ComplexMatrix g = testutil::random_ginibre(dim, rng);
    const ComplexMatrix h = cplx(0.5) * (g + g.adjoint());
    const auto es = hermitian_eigensystem(h);

    ComplexMatrix lambda(dim);
    for (std::size_t i = 0; i < dim; ++i) lambda(i, i) = es.values[i];
    CHECK(max_abs_diff(es.vectors * lambda * es.vectors.adjoint(), h) < 1e-12);
    CHECK(max_abs_diff(es.vectors * es.vectors.adjoint(), ComplexMatrix::identity(dim)) < 1e-12);
    for (std::size_t i = 0; i + 1 < dim; ++i) CHECK(es.values[i] <= es.values[i + 1]);
  }
}

TEST_CASE("matrix text serialization") {
  ComplexMatrix m(2);
  m(0, 0) = 0.5;
  m(0, 1) = cplx(0.0, -0.25);
  m(1, 0) = cplx(0.0, 0.25);
  m(1, 1) = 0.5;
  CHECK(matrix_to_text(m) == "2\n0.5 0 0 -0.25\n0 0.25 0.5 0\n");

  eprb::RngStream rng(99);
  const ComplexMatrix r = testutil::random_ginibre(4, rng);
  const ComplexMatrix back = eprb::matrix_from_text(matrix_to_text(r));
  REQUIRE(back.dim() == 4);
  // 17 significant digits round-trip doubles exactly
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(back(i, j) == r(i, j));

  CHECK_THROWS_AS(eprb::matrix_from_text("2\n1 0\n"), std::runtime_error);
  CHECK_THROWS_AS(eprb::matrix_from_text("bogus"), std::runtime_error);
}
