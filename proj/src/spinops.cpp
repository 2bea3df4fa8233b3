#include "hfspec/spinops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hfspec/errors.hpp"

namespace hfspec {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kEighHermitianTolerance = 1e-9;
constexpr double kNormTolerance = 1e-10;

double asymmetry(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double max_entry(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

// Groups [begin, end) of consecutive values closer than `tol`.
std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters(const Eigen::VectorXd& v, double tol) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= v.size(); ++i) {
    if (i == v.size() || v(i) - v(i - 1) >= tol) {
      out.emplace_back(start, i);
      start = i;
    }
  }
  return out;
}

void resolve_cluster(ComplexMatrix& vectors, Eigen::Index begin, Eigen::Index end,
                     std::span<const OperatorMatrix> resolvers, std::size_t level) {
  const Eigen::Index k = end - begin;
  if (k < 2 || level >= resolvers.size()) return;
  const auto& r = resolvers[level].matrix();
  ComplexMatrix block = vectors.middleCols(begin, k);
  ComplexMatrix projected = block.adjoint() * r * block;
  projected = 0.5 * (projected + projected.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(projected);
  vectors.middleCols(begin, k) = block * solver.eigenvectors();
  for (auto [b, e] : clusters(solver.eigenvalues(), kDegeneracyTolerance)) {
    resolve_cluster(vectors, begin + b, begin + e, resolvers, level + 1);
  }
}

void fix_phase(ComplexMatrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      // Strict improvement beyond round-off keeps the pick stable for ties.
      const double mag = std::abs(vectors(r, c));
      if (mag > best_mag + 1e-12) {
        best_mag = mag;
        best = r;
      }
    }
    if (best_mag <= 0.0) continue;
    const Complex phase = std::conj(vectors(best, c)) / best_mag;
    vectors.col(c) *= phase;
    vectors(best, c) = Complex(vectors(best, c).real(), 0.0);
  }
}

}  // namespace

Spin Spin::from_twice(int twice) {
  if (twice < 0) throw DomainError("spin quantum number must be non-negative");
  return Spin(twice);
}

Spin Spin::from_value(double value) {
  const double twice = 2.0 * value;
  const double rounded = std::round(twice);
  if (!std::isfinite(value) || value < 0.0 || std::abs(twice - rounded) > 1e-12) {
    std::ostringstream msg;
    msg << "spin quantum number " << value << " is not a non-negative half-integer";
    throw DomainError(msg.str());
  }
  return Spin(static_cast<int>(rounded));
}

OperatorMatrix::OperatorMatrix(ComplexMatrix m, bool hermitian) : m_(std::move(m)), hermitian_(hermitian) {
  if (m_.rows() != m_.cols()) throw PreconditionError("operator matrix must be square");
  if (hermitian_) {
    const double asym = asymmetry(m_);
    if (asym > kHermitianTolerance * std::max(max_entry(m_), 1e-300)) {
      std::ostringstream msg;
      msg << "matrix flagged Hermitian has asymmetry " << asym;
      throw PreconditionError(msg.str());
    }
  }
}

OperatorMatrix OperatorMatrix::zero(Eigen::Index dim) {
  return OperatorMatrix(ComplexMatrix::Zero(dim, dim), true);
}

OperatorMatrix OperatorMatrix::identity(Eigen::Index dim) {
  return OperatorMatrix(ComplexMatrix::Identity(dim, dim), true);
}

OperatorMatrix OperatorMatrix::diagonal(std::span<const double> entries) {
  const auto n = static_cast<Eigen::Index>(entries.size());
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = entries[static_cast<std::size_t>(i)];
  return OperatorMatrix(std::move(m), true);
}

double OperatorMatrix::max_abs() const { return max_entry(m_); }

double OperatorMatrix::max_asymmetry() const { return asymmetry(m_); }

OperatorMatrix OperatorMatrix::adjoint() const {
  OperatorMatrix out;
  out.m_ = m_.adjoint();
  out.hermitian_ = hermitian_;
  return out;
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& rhs) {
  if (rhs.dim() != dim()) throw PreconditionError("operator dimension mismatch");
  m_ += rhs.m_;
  hermitian_ = hermitian_ && rhs.hermitian_;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& rhs) {
  if (rhs.dim() != dim()) throw PreconditionError("operator dimension mismatch");
  m_ -= rhs.m_;
  hermitian_ = hermitian_ && rhs.hermitian_;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim() != b.dim()) throw PreconditionError("operator dimension mismatch");
  OperatorMatrix out;
  out.m_ = a.m_ * b.m_;
  return out;
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  return a * b - b * a;
}

double max_abs_diff(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim() != b.dim()) throw PreconditionError("operator dimension mismatch");
  return max_entry(a.matrix() - b.matrix());
}

SpinMatrices spin_matrices(Spin s) {
  const int n = s.multiplicity();
  const double j = s.value();
  ComplexMatrix plus = ComplexMatrix::Zero(n, n);
  ComplexMatrix z = ComplexMatrix::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    const double m = j - r;
    z(r, r) = m;
    // <m+1| I+ |m> sits one row above.
    if (r > 0) plus(r - 1, r) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  if (s.twice() == 0) {
    auto zero = OperatorMatrix::zero(1);
    return {zero, zero, zero, zero};
  }
  const ComplexMatrix minus = plus.adjoint();
  const Complex i(0.0, 1.0);
  ComplexMatrix x = 0.5 * (plus + minus);
  ComplexMatrix y = -0.5 * i * (plus - minus);
  ComplexMatrix sq = x * x + y * y + z * z;
  sq = 0.5 * (sq + sq.adjoint()).eval();
  return {OperatorMatrix(std::move(x), true), OperatorMatrix(std::move(y), true),
          OperatorMatrix(std::move(z), true), OperatorMatrix(std::move(sq), true)};
}

OperatorMatrix Pauli::x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return OperatorMatrix(std::move(m), true);
}

OperatorMatrix Pauli::y() {
  const Complex i(0.0, 1.0);
  ComplexMatrix m(2, 2);
  m << 0, -i, i, 0;
  return OperatorMatrix(std::move(m), true);
}

OperatorMatrix Pauli::z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return OperatorMatrix(std::move(m), true);
}

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
  const Eigen::Index na = a.dim();
  const Eigen::Index nb = b.dim();
  ComplexMatrix out(na * nb, na * nb);
  for (Eigen::Index r = 0; r < na; ++r) {
    for (Eigen::Index c = 0; c < na; ++c) {
      out.block(r * nb, c * nb, nb, nb) = a(r, c) * b.matrix();
    }
  }
  return OperatorMatrix(std::move(out), a.hermitian() && b.hermitian());
}

OperatorMatrix kron(std::initializer_list<const OperatorMatrix*> factors) {
  if (factors.size() == 0) return OperatorMatrix::identity(1);
  auto it = factors.begin();
  OperatorMatrix out = **it;
  for (++it; it != factors.end(); ++it) out = kron(out, **it);
  return out;
}

EigenSystem eigh(const OperatorMatrix& h, std::span<const OperatorMatrix> resolvers) {
  const double asym = h.max_asymmetry();
  if (asym > kEighHermitianTolerance * std::max(h.max_abs(), 1e-300)) {
    std::ostringstream msg;
    msg << "eigh requires a Hermitian matrix; max asymmetry " << asym;
    throw PreconditionError(msg.str());
  }
  for (const auto& r : resolvers) {
    if (r.dim() != h.dim()) throw PreconditionError("resolver dimension mismatch");
  }
  const ComplexMatrix sym = 0.5 * (h.matrix() + h.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw PreconditionError("eigensolver failed to converge");

  EigenSystem out;
  out.vectors = solver.eigenvectors();
  const Eigen::VectorXd& values = solver.eigenvalues();
  out.values.assign(values.data(), values.data() + values.size());
  for (auto [b, e] : clusters(values, kDegeneracyTolerance)) {
    resolve_cluster(out.vectors, b, e, resolvers, 0);
  }
  fix_phase(out.vectors);
  return out;
}

double expectation(const OperatorMatrix& o, const ComplexVector& v) {
  if (v.size() != o.dim()) throw PreconditionError("state dimension mismatch");
  const double norm = v.norm();
  if (std::abs(norm - 1.0) >= kNormTolerance) {
    std::ostringstream msg;
    msg << "state vector is not normalized (norm " << norm << ")";
    throw PreconditionError(msg.str());
  }
  const Complex value = v.dot(o.matrix() * v);
  if (std::abs(value.imag()) >= kNormTolerance * std::max(1.0, o.max_abs())) {
    throw PreconditionError("expectation value has a non-negligible imaginary part");
  }
  return value.real();
}

}  // namespace hfspec
