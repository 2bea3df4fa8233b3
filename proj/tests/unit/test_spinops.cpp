#include <doctest.h>

#include <cmath>
#include <random>

#include "hfspec/errors.hpp"
#include "hfspec/spinops.hpp"

using namespace hfspec;

namespace {

const Complex kI{0.0, 1.0};

OperatorMatrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = Complex(g(rng), g(rng));
  ComplexMatrix h = 0.5 * (a + a.adjoint());
  return OperatorMatrix(h, true);
}

}  // namespace

TEST_CASE("spin construction") {
  CHECK(Spin::from_value(4.5).twice() == 9);
  CHECK(Spin::from_value(0.5).multiplicity() == 2);
  CHECK(Spin::from_value(4.5).casimir() == doctest::Approx(24.75));
  CHECK_THROWS_AS(Spin::from_value(0.3), DomainError);
  CHECK_THROWS_AS(Spin::from_value(-1.0), DomainError);
  CHECK_THROWS_AS(Spin::from_twice(-2), DomainError);
}

TEST_CASE("spin-1/2 matrices are half the Pauli matrices") {
  const auto s = spin_matrices(Spin::from_value(0.5));
  CHECK(max_abs_diff(s.z, 0.5 * Pauli::z()) < 1e-15);
  CHECK(max_abs_diff(s.x, 0.5 * Pauli::x()) < 1e-15);
  CHECK(max_abs_diff(s.y, 0.5 * Pauli::y()) < 1e-15);
  CHECK(s.z(0, 0).real() == 0.5);
  CHECK(s.z(1, 1).real() == -0.5);
}

TEST_CASE("spin-0 matrices are 1x1 zero") {
  const auto s = spin_matrices(Spin::from_value(0.0));
  CHECK(s.x.dim() == 1);
  CHECK(s.x.max_abs() == 0.0);
  CHECK(s.y.max_abs() == 0.0);
  CHECK(s.z.max_abs() == 0.0);
  CHECK(s.sq.max_abs() == 0.0);
}

TEST_CASE("spin-9/2 Casimir by explicit product") {
  const auto s = spin_matrices(Spin::from_value(4.5));
  CHECK(s.x.dim() == 10);
  const auto sq = s.x * s.x + s.y * s.y + s.z * s.z;
  for (int k = 0; k < 10; ++k) CHECK(sq(k, k).real() == doctest::Approx(24.75).epsilon(1e-13));
  CHECK(max_abs_diff(sq, s.sq) < 1e-12);
}

TEST_CASE("kron basics") {
  CHECK(max_abs_diff(kron(OperatorMatrix::identity(2), OperatorMatrix::identity(2)), OperatorMatrix::identity(4)) == 0.0);
  const auto zz = kron(Pauli::z(), Pauli::z());
  const double expect[] = {1, -1, -1, 1};
  for (int k = 0; k < 4; ++k) CHECK(zz(k, k).real() == expect[k]);
  CHECK(zz.hermitian());

  const auto iz = spin_matrices(Spin::from_value(4.5)).z;
  const auto big = kron(zz, iz);
  CHECK(big.dim() == 40);
  for (int k = 0; k < 40; ++k) {
    const double m = 4.5 - (k % 10);
    const double sign = expect[k / 10];
    CHECK(big(k, k).real() == doctest::Approx(sign * m));
  }
}

TEST_CASE("kron list matches nested kron") {
  const auto a = Pauli::x();
  const auto b = Pauli::y();
  const auto c = spin_matrices(Spin::from_value(1.5)).x;
  CHECK(max_abs_diff(kron({&a, &b, &c}), kron(kron(a, b), c)) < 1e-15);
}

TEST_CASE("operator matrix validation") {
  ComplexMatrix rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(OperatorMatrix{rect}, PreconditionError);
  ComplexMatrix skew(2, 2);
  skew << 0, 1, 2, 0;
  CHECK_THROWS_AS(OperatorMatrix(skew, true), PreconditionError);
  CHECK_NOTHROW(OperatorMatrix(skew, false));
  CHECK(OperatorMatrix(skew).max_asymmetry() == doctest::Approx(1.0));
}

TEST_CASE("eigh of a diagonal matrix") {
  const double d[] = {3, 1, 2};
  const auto es = eigh(OperatorMatrix::diagonal(d));
  REQUIRE(es.values.size() == 3);
  CHECK(es.values[0] == doctest::Approx(1));
  CHECK(es.values[1] == doctest::Approx(2));
  CHECK(es.values[2] == doctest::Approx(3));
}

TEST_CASE("eigh of sigma x") {
  const auto es = eigh(Pauli::x());
  CHECK(es.values[0] == doctest::Approx(-1));
  CHECK(es.values[1] == doctest::Approx(1));
  const double r = 1.0 / std::sqrt(2.0);
  // Largest component real positive, first component wins the tie.
  CHECK(std::abs(es.vectors(0, 0) - Complex(r)) < 1e-12);
  CHECK(std::abs(es.vectors(1, 0) + Complex(r)) < 1e-12);
  CHECK(std::abs(es.vectors(0, 1) - Complex(r)) < 1e-12);
  CHECK(std::abs(es.vectors(1, 1) - Complex(r)) < 1e-12);
}

TEST_CASE("eigh rejects non-Hermitian input") {
  ComplexMatrix m(2, 2);
  m << 1, 0.5, 0.1, 1;
  CHECK_THROWS_AS(eigh(OperatorMatrix(m)), PreconditionError);
}

TEST_CASE("eigh reconstructs a random 40x40 Hermitian matrix") {
  std::mt19937_64 rng(7);
  const auto h = random_hermitian(40, rng);
  const auto es = eigh(h);
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(es.values.data(), 40);
  ComplexMatrix rec = es.vectors * w.cast<Complex>().asDiagonal() * es.vectors.adjoint();
  CHECK((rec - h.matrix()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((es.vectors.adjoint() * es.vectors - ComplexMatrix::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("eigh is deterministic inside degenerate clusters") {
  // Two identical spin-1 copies: every level doubly degenerate.
  const auto s = spin_matrices(Spin::from_value(1.0));
  const auto h = kron(OperatorMatrix::identity(2), s.z);
  const auto z = kron(Pauli::z(), OperatorMatrix::identity(3));
  const OperatorMatrix resolvers[] = {z};
  const auto a = eigh(h, resolvers);
  const auto b = eigh(h, resolvers);
  CHECK((a.vectors - b.vectors).cwiseAbs().maxCoeff() == 0.0);
  for (int c = 0; c < 6; ++c) {
    const double zc = expectation(z, a.vectors.col(c));
    CHECK(std::abs(std::abs(zc) - 1.0) < 1e-12);
  }
}

TEST_CASE("expectation values") {
  ComplexVector v(2);
  v << Complex(0.6, 0.0), Complex(0.0, 0.8);
  CHECK(expectation(OperatorMatrix::identity(2), v) == doctest::Approx(1.0));
  ComplexVector up(2);
  up << 1.0, 0.0;
  CHECK(expectation(Pauli::z(), up) == doctest::Approx(1.0));
  ComplexVector bad(2);
  bad << 1.0, 1.0;
  CHECK_THROWS_AS(expectation(Pauli::z(), bad), PreconditionError);
}

TEST_CASE("singlet of two spin-1/2 has zero total J squared") {
  // Independent construction of J^2 = (S1 + S2)^2 from Pauli matrices.
  const auto one = OperatorMatrix::identity(2);
  const auto jx = 0.5 * (kron(Pauli::x(), one) + kron(one, Pauli::x()));
  const auto jy = 0.5 * (kron(Pauli::y(), one) + kron(one, Pauli::y()));
  const auto jz = 0.5 * (kron(Pauli::z(), one) + kron(one, Pauli::z()));
  const auto jsq = jx * jx + jy * jy + jz * jz;
  ComplexVector singlet = ComplexVector::Zero(4);
  singlet(1) = 1.0 / std::sqrt(2.0);
  singlet(2) = -1.0 / std::sqrt(2.0);
  CHECK(std::abs(expectation(jsq, singlet)) < 1e-14);
  ComplexVector triplet = ComplexVector::Zero(4);
  triplet(0) = 1.0;
  CHECK(expectation(jsq, triplet) == doctest::Approx(2.0));
}

TEST_CASE("commutator of spin components") {
  for (int twice = 0; twice <= 9; ++twice) {
    const auto s = spin_matrices(Spin::from_twice(twice));
    const auto iz = OperatorMatrix(kI * s.z.matrix());
    CHECK(max_abs_diff(commutator(s.x, s.y), iz) < 1e-12);
  }
}
