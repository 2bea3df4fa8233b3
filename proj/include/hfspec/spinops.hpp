#pragma once

// Angular-momentum operator algebra on small dense complex matrices.
//
// Product-space ordering is fixed throughout the library:
//   orbital {|e+>, |e->}  (x)  electron spin {|up>, |down>}  (x)  nuclear {m_I = +I ... -I}
// Energies are frequencies E/h in MHz, hbar = 1.

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hfspec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Half-integer angular momentum quantum number, stored as 2I.
class Spin {
 public:
  constexpr Spin() = default;
  static Spin from_twice(int twice);
  // Throws DomainError unless 2*value is a non-negative integer.
  static Spin from_value(double value);

  constexpr int twice() const noexcept { return twice_; }
  constexpr double value() const noexcept { return 0.5 * twice_; }
  constexpr int multiplicity() const noexcept { return twice_ + 1; }
  constexpr double casimir() const noexcept { return value() * (value() + 1.0); }

  friend constexpr bool operator==(Spin, Spin) = default;

 private:
  constexpr explicit Spin(int twice) : twice_(twice) {}
  int twice_ = 0;
};

class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  // Square check always; when `hermitian` is set the entrywise asymmetry must
  // be below 1e-12 of the largest entry.
  explicit OperatorMatrix(ComplexMatrix m, bool hermitian = false);

  static OperatorMatrix zero(Eigen::Index dim);
  static OperatorMatrix identity(Eigen::Index dim);
  static OperatorMatrix diagonal(std::span<const double> entries);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  bool hermitian() const noexcept { return hermitian_; }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  double max_abs() const;
  // max |M - M^dagger| entrywise.
  double max_asymmetry() const;
  double trace_real() const { return m_.trace().real(); }

  OperatorMatrix adjoint() const;

  OperatorMatrix& operator+=(const OperatorMatrix& rhs);
  OperatorMatrix& operator-=(const OperatorMatrix& rhs);
  OperatorMatrix& operator*=(double s);

  friend OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) { return a += b; }
  friend OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b) { return a -= b; }
  friend OperatorMatrix operator*(OperatorMatrix a, double s) { return a *= s; }
  friend OperatorMatrix operator*(double s, OperatorMatrix a) { return a *= s; }
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);

 private:
  ComplexMatrix m_;
  bool hermitian_ = false;
};

// [A, B] = AB - BA.
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);
// Largest entry magnitude of a - b.
double max_abs_diff(const OperatorMatrix& a, const OperatorMatrix& b);

struct SpinMatrices {
  OperatorMatrix x, y, z, sq;
};

// Standard angular-momentum matrices in the |I, m> basis, m = +I ... -I.
SpinMatrices spin_matrices(Spin s);

// Pauli matrices for one two-level factor, in the order (+, -).
struct Pauli {
  static OperatorMatrix x();
  static OperatorMatrix y();
  static OperatorMatrix z();
};

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix kron(std::initializer_list<const OperatorMatrix*> factors);

struct EigenSystem {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // columns, orthonormal
};

// Eigen-gap below which levels are treated as one degenerate cluster (MHz).
inline constexpr double kDegeneracyTolerance = 1e-6;

// Hermitian eigendecomposition with a deterministic basis inside degenerate
// clusters. Each cluster is rotated to diagonalize the projected `resolvers`
// in order; a resolver only acts on sub-clusters it left degenerate.
// Finally every column is phased so its largest component is real positive.
// Throws PreconditionError if H is not Hermitian within 1e-9 relative.
EigenSystem eigh(const OperatorMatrix& h, std::span<const OperatorMatrix> resolvers = {});

// Real expectation value v^dagger O v. Requires O Hermitian and |v| = 1.
double expectation(const OperatorMatrix& o, const ComplexVector& v);

}  // namespace hfspec
