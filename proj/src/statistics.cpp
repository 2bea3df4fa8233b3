#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "hfspec/analysis.hpp"
#include "hfspec/errors.hpp"
#include "hfspec/kernels.hpp"

namespace hfspec {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Lower regularized gamma P(a, x) by its power series, valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma Q(a, x) by modified Lentz continued fraction, x >= a + 1.
double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw DomainError("gamma_q needs a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi2_survival(double x, double k) {
  if (!(k > 0.0)) throw DomainError("degrees of freedom must be positive");
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * k, 0.5 * x);
}

Chi2Result chi2_independence(const ContingencyTable2x2& t) {
  const std::array<double, 4> o{static_cast<double>(t.active_with), static_cast<double>(t.active_without),
                                static_cast<double>(t.neutral_with), static_cast<double>(t.neutral_without)};
  if (std::any_of(o.begin(), o.end(), [](double v) { return v < 0.0; })) {
    throw DomainError("contingency counts must be non-negative");
  }
  const double rows[2] = {o[0] + o[1], o[2] + o[3]};
  const double cols[2] = {o[0] + o[2], o[1] + o[3]};
  if (rows[0] == 0.0 || rows[1] == 0.0 || cols[0] == 0.0 || cols[1] == 0.0) {
    throw DomainError("contingency table has a zero marginal");
  }
  const double total = rows[0] + rows[1];
  Chi2Result out;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double expected = rows[r] * cols[c] / total;
      const double diff = o[static_cast<std::size_t>(2 * r + c)] - expected;
      out.chi2 += diff * diff / expected;
    }
  }
  out.p_value = chi2_survival(out.chi2, 1.0);
  return out;
}

DensityTrace kde(std::span<const double> values, double bandwidth) {
  if (values.empty()) throw DomainError("kde needs at least one value");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw DomainError("kde bandwidth must be positive");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!std::isfinite(*lo) || !std::isfinite(*hi)) throw DomainError("kde values must be finite");
  const double start = *lo - 4.0 * bandwidth;
  const double stop = *hi + 4.0 * bandwidth;
  const auto n = static_cast<std::size_t>(std::ceil((stop - start) / (0.1 * bandwidth))) + 1;
  const double step = (stop - start) / static_cast<double>(n - 1);
  DensityTrace out;
  out.bandwidth = bandwidth;
  out.x.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.x[k] = start + static_cast<double>(k) * step;
  out.density.assign(n, 0.0);
  const std::vector<double> weights(values.size(), 1.0 / static_cast<double>(values.size()));
  kernels::gaussian_accumulate(values, weights, bandwidth, out.x, out.density);
  return out;
}

double isotope_shift_ratio(double m_a, double m_b, double m_c, double m_d) {
  for (double m : {m_a, m_b, m_c, m_d}) {
    if (!(m > 0.0)) throw DomainError("isotope masses must be positive");
  }
  const double den = 1.0 / std::sqrt(m_c) - 1.0 / std::sqrt(m_d);
  if (den == 0.0) throw DomainError("reference isotope pair has equal masses");
  return (1.0 / std::sqrt(m_a) - 1.0 / std::sqrt(m_b)) / den;
}

EnsembleStats ensemble_stats(std::span<const double> values, double bin_width) {
  if (values.empty()) throw DomainError("ensemble is empty");
  if (!(bin_width > 0.0)) throw DomainError("histogram bin width must be positive");
  EnsembleStats s;
  s.n = values.size();
  const double n = static_cast<double>(s.n);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_err_of_mean = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const auto first = static_cast<long long>(std::floor(*lo / bin_width));
  const auto last = static_cast<long long>(std::floor(*hi / bin_width));
  for (long long k = first; k <= last + 1; ++k) s.bin_edges.push_back(static_cast<double>(k) * bin_width);
  s.counts.assign(static_cast<std::size_t>(last - first + 1), 0);
  for (double v : values) {
    auto k = static_cast<long long>(std::floor(v / bin_width)) - first;
    k = std::clamp<long long>(k, 0, last - first);
    ++s.counts[static_cast<std::size_t>(k)];
  }
  return s;
}

double dft_discrepancy_percent(double measured, double predicted) {
  if (measured == 0.0) throw DomainError("measured value must be nonzero");
  return std::abs(measured - predicted) / std::abs(measured) * 100.0;
}

}  // namespace hfspec
