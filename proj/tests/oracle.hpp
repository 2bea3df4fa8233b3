#pragma once
// Independent reference constructions for tests. Everything here is built
// directly from textbook formulas with Eigen, without the library's operator
// cache, kron helpers or eigensolver wrapper.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace oracle {

using Mat = Eigen::MatrixXcd;
using Cx = std::complex<double>;

inline constexpr double kMuB = 13996.2449;
inline constexpr double kMuN = 7.622593;

struct SpinOps {
  Mat x, y, z;
};

// Ladder-operator construction, basis m = +I ... -I.
inline SpinOps spin(int twice) {
  const int n = twice + 1;
  const double j = 0.5 * twice;
  Mat jp = Mat::Zero(n, n);
  Mat z = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double m = j - k;
    z(k, k) = m;
    if (k > 0) jp(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  const Mat jm = jp.adjoint();
  return {0.5 * (jp + jm), Cx(0, -0.5) * (jp - jm), z};
}

inline Mat kron3(const Mat& a, const Mat& b, const Mat& c) {
  Mat ab = Eigen::kroneckerProduct(a, b).eval();
  return Eigen::kroneckerProduct(ab, c).eval();
}

struct Params {
  int twice_i = 1;
  double lambda_ghz = 850;
  double q = 0.1;
  double fc = 0, dd = 0, quad = 0, ioc = 0;
  double alpha_ghz = 0, beta_ghz = 0;
  double g_e = 2.0023, g_n = 0;
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
};

inline Mat hamiltonian(const Params& p) {
  const int n = p.twice_i + 1;
  const Mat o2 = Mat::Identity(2, 2);
  const Mat on = Mat::Identity(n, n);
  const auto s = spin(1);
  const auto i = spin(p.twice_i);
  const Mat sz_orb = 2.0 * s.z;
  const Mat sx_orb = 2.0 * s.x;
  const Mat sy_orb = 2.0 * s.y;
  Mat h = 0.5 * p.lambda_ghz * 1000.0 * kron3(sz_orb, sz_orb, on);
  h -= 1000.0 * (p.alpha_ghz * kron3(sx_orb, o2, on) + p.beta_ghz * kron3(sy_orb, o2, on));
  const double ge = p.g_e * kMuB;
  h += ge * (p.b.x() * kron3(o2, s.x, on) + p.b.y() * kron3(o2, s.y, on) + p.b.z() * kron3(o2, s.z, on));
  h += p.q * kMuB * p.b.z() * kron3(sz_orb, o2, on);
  const double gn = p.g_n * kMuN;
  h += gn * (p.b.x() * kron3(o2, o2, i.x) + p.b.y() * kron3(o2, o2, i.y) + p.b.z() * kron3(o2, o2, i.z));
  const double apar = p.fc + p.dd;
  const double aperp = p.fc - 2.0 * p.dd;
  h += aperp * (kron3(o2, s.x, i.x) + kron3(o2, s.y, i.y)) + apar * kron3(o2, s.z, i.z);
  const double ii = 0.5 * p.twice_i * (0.5 * p.twice_i + 1.0);
  h += p.quad * (kron3(o2, o2, i.z * i.z) - ii / 3.0 * Mat::Identity(4 * n, 4 * n));
  h += 0.5 * p.ioc * kron3(sz_orb, o2, i.z);
  return h;
}

inline std::vector<double> eigenvalues(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  const auto& v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

// Regularized upper incomplete gamma Q(1/2, x/2) for one degree of freedom.
inline double chi2_survival_1dof(double x) { return std::erfc(std::sqrt(0.5 * x)); }

// Composite Simpson integration of the 1-dof chi-squared density on [x, x_max]
// after the substitution x = u^2, which removes the endpoint singularity.
inline double chi2_survival_1dof_simpson(double x, int intervals = 20000) {
  const double u0 = std::sqrt(x);
  const double u1 = u0 + 40.0;
  const double h = (u1 - u0) / intervals;
  auto f = [](double u) { return std::sqrt(2.0 / M_PI) * std::exp(-0.5 * u * u); };
  double sum = f(u0) + f(u1);
  for (int k = 1; k < intervals; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(u0 + k * h);
  return sum * h / 3.0;
}

}  // namespace oracle
