#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hfspec/analysis.hpp"
#include "hfspec/errors.hpp"
#include "oracle.hpp"

using namespace hfspec;

namespace {

SpectrumTrace make_trace(std::vector<double> grid, std::vector<double> signal) {
  SpectrumTrace t;
  t.freq_mhz = std::move(grid);
  t.signal = std::move(signal);
  return t;
}

void add_noise(std::vector<double>& v, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  for (auto& x : v) x += g(rng);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("levenberg_marquardt fits an exponential decay") {
  std::vector<double> t, y;
  for (int k = 0; k < 40; ++k) {
    t.push_back(0.1 * k);
    y.push_back(3.0 * std::exp(-1.7 * 0.1 * k) + 0.2);
  }
  LeastSquaresProblem prob;
  prob.residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(40);
    for (int k = 0; k < 40; ++k) r(k) = p(0) * std::exp(-p(1) * t[k]) + p(2) - y[k];
    return r;
  };
  const auto res = levenberg_marquardt(prob, Eigen::Vector3d(1.0, 0.5, 0.0));
  CHECK(res.converged);
  CHECK(res.params(0) == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(res.params(1) == doctest::Approx(1.7).epsilon(1e-6));
  CHECK(res.params(2) == doctest::Approx(0.2).epsilon(1e-5));
  CHECK(res.cost <= res.initial_cost);
}

TEST_CASE("single Lorentzian exact recovery") {
  const auto grid = make_grid(-100, 100, 0.5);
  const double truth[] = {12.3, 17.0, 40.0, 0.05};
  const auto trace = make_trace(grid, lorentz_model_eval(LorentzModel::single, truth, grid));
  const auto fit = fit_lorentzians(trace, LorentzModel::single);
  CHECK(fit.converged);
  for (std::size_t k = 0; k < 4; ++k) CHECK(rel(fit.params[k], truth[k]) < 1e-6);
  CHECK(fit.residual_rms <= fit.initial_residual_rms);
  CHECK(fit.param("fwhm") == doctest::Approx(17.0));
  CHECK_THROWS_AS(fit.param("nope"), LookupError);
}

TEST_CASE("triplet model geometry") {
  const auto grid = make_grid(-1000, 1000, 1);
  const double p[] = {-200, -445, 150, 35, 1.0, 0.0};
  const auto y = lorentz_model_eval(LorentzModel::triplet211, p, grid);
  // Area weights 2:1:1: peak heights at the three centers follow the same
  // ratio when the lines are far apart compared with the width.
  const auto at = [&](double f) { return y[static_cast<std::size_t>(f + 1000)]; };
  CHECK(at(-200) / at(245 - 75) == doctest::Approx(2.0).epsilon(0.03));
  CHECK(at(245 + 75) / at(245 - 75) == doctest::Approx(1.0).epsilon(5e-3));
  double area = 0.0;
  for (double v : y) area += v;
  CHECK(area == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("triplet fit recovers the optical spacing at 5% noise") {
  const auto grid = make_grid(-1000, 1000, 2);
  const double truth[] = {-200, -445, 150, 35, 1.0, 0.0};
  auto y = lorentz_model_eval(LorentzModel::triplet211, truth, grid);
  const double peak = *std::max_element(y.begin(), y.end());
  add_noise(y, 0.05 * peak, 11);
  const auto fit = fit_lorentzians(make_trace(grid, y), LorentzModel::triplet211);
  CHECK(fit.converged);
  CHECK(fit.param("a_ple") < 0.0);
  CHECK(fit.param("delta") >= 0.0);
  CHECK(rel(fit.param("a_ple"), -445) < 0.02);
  CHECK(rel(fit.param("delta"), 150) < 0.05);
}

TEST_CASE("noise-free triplet round trip") {
  const auto grid = make_grid(-1000, 1000, 2);
  const double truth[] = {-180, -360.96, 120, 40, 2.0, 0.1};
  const auto trace = make_trace(grid, lorentz_model_eval(LorentzModel::triplet211, truth, grid));
  const auto fit = fit_lorentzians(trace, LorentzModel::triplet211);
  for (std::size_t k = 0; k < 6; ++k) CHECK(rel(fit.params[k], truth[k]) < 1e-4);
}

TEST_CASE("Gaussian exact recovery") {
  const auto grid = make_grid(-50, 50, 0.25);
  const double truth[] = {3.5, 6.0, 10.0, 0.02};
  const auto trace = make_trace(grid, gaussian_model_eval(truth, grid));
  const auto fit = fit_gaussian(trace);
  for (std::size_t k = 0; k < 4; ++k) CHECK(rel(fit.params[k], truth[k]) < 1e-6);
  CHECK(fit.model == "gaussian");
}

TEST_CASE("Gaussian ensemble shift") {
  // Two ensembles of synthetic centers, GHz, offset by 83 with a 25 GHz spread.
  std::mt19937_64 rng(83);
  std::normal_distribution<double> a(0.0, 25.0), b(83.0, 25.0);
  std::vector<double> va(300), vb(300);
  for (auto& v : va) v = a(rng);
  for (auto& v : vb) v = b(rng);
  const double bw = 8.0;
  const auto ka = kde(va, bw), kb = kde(vb, bw);
  const auto fa = fit_gaussian(make_trace(ka.x, ka.density));
  const auto fb = fit_gaussian(make_trace(kb.x, kb.density));
  const double shift = fb.param("center") - fa.param("center");
  const double se = std::sqrt(2.0) * 25.0 / std::sqrt(300.0);
  CHECK(std::abs(shift - 83.0) < 3.0 * se);
}

TEST_CASE("constant trace is rejected") {
  const auto grid = make_grid(0, 10, 1);
  CHECK_THROWS_AS(fit_lorentzians(make_trace(grid, std::vector<double>(grid.size(), 1.0)), LorentzModel::single),
                  DomainError);
  CHECK_THROWS_AS(fit_lorentzians(make_trace(grid, std::vector<double>(grid.size(), 1.0)), LorentzModel::single,
                                  std::vector<double>{1, 2}),
                  DomainError);
}

TEST_CASE("noise estimate and peak finding") {
  const auto grid = make_grid(-100, 100, 1);
  const double p[] = {-40, -60, 30, 8, 1.0, 0.0};
  auto y = lorentz_model_eval(LorentzModel::triplet211, p, grid);
  const auto clean = estimate_noise(y);
  CHECK(clean.sigma < 1e-3);
  add_noise(y, 1e-3, 3);
  const auto noisy = estimate_noise(y);
  CHECK(noisy.sigma == doctest::Approx(1e-3).epsilon(0.3));
  const auto peaks = find_peaks(make_trace(grid, y), 5.0 * noisy.sigma);
  REQUIRE(peaks.size() == 3);
  CHECK(std::abs(peaks[0].freq_mhz - -40) <= 1.0);
  CHECK(peaks[0].height > peaks[1].height);

  // Equal heights: lower frequency first.
  const double twin[] = {0.0, 1.0, 0.0, 0.0, 1.0, 0.0};
  const double f[] = {0, 1, 2, 3, 4, 5};
  const auto tw = find_peaks(make_trace({f, f + 6}, {twin, twin + 6}), 0.1);
  REQUIRE(tw.size() == 2);
  CHECK(tw[0].freq_mhz == 1.0);
}

TEST_CASE("model selection by BIC prefers the triplet on triplet data") {
  const auto grid = make_grid(-1000, 1000, 4);
  const double truth[] = {-200, -445, 150, 35, 1.0, 0.0};
  auto y = lorentz_model_eval(LorentzModel::triplet211, truth, grid);
  add_noise(y, 2e-4, 5);
  const auto trace = make_trace(grid, y);
  const auto single = fit_lorentzians(trace, LorentzModel::single);
  const auto triplet = fit_lorentzians(trace, LorentzModel::triplet211);
  CHECK(bic(triplet) < bic(single));
}

TEST_CASE("full model fit recovers a noise-free 73Ge map") {
  const auto emitter = registry_lookup("73Ge");
  SpectralMap layout;
  layout.direction = FieldVector(std::sin(33 * M_PI / 180), 0, std::cos(33 * M_PI / 180));
  layout.freq_mhz = make_grid(-300, 300, 5);
  for (double b : {0.0, 0.05, 0.1, 0.15}) {
    layout.b_tesla.push_back(b);
    SpectrumTrace row;
    row.freq_mhz = layout.freq_mhz;
    row.b_tesla = b * layout.direction;
    layout.rows.push_back(row);
  }
  const double scale = 12.5 / 13.775;
  const auto model = full_model_eval(layout, emitter, scale, 0.0, 72.0, 50.0, 0.0);
  for (std::size_t r = 0; r < layout.rows.size(); ++r) layout.rows[r].signal = model[r];

  FullModelConfig cfg;
  cfg.emitter = emitter;
  cfg.free = {FreeParam::a_ple_scale, FreeParam::fwhm, FreeParam::amplitude};
  cfg.fwhm_mhz = 60.0;
  cfg.amplitude = 40.0;
  const auto fit = fit_full_model(layout, cfg);
  CHECK(fit.converged);
  CHECK(rel(fit.param("fwhm"), 72.0) < 1e-3);
  CHECK(rel(fit.param("a_ple"), -12.5) < 1e-3);
  CHECK(fit.std_err("fwhm") >= 0.0);
}

TEST_CASE("free parameter names") {
  CHECK(parse_free_param("strain_alpha") == FreeParam::strain_alpha);
  CHECK(free_param_name(FreeParam::freq_offset) == "freq_offset");
  CHECK_THROWS_AS(parse_free_param("bogus"), LookupError);
}

TEST_CASE("kde") {
  const double one[] = {2.0};
  const auto k1 = kde(one, 0.5);
  double area = 0.0;
  for (std::size_t k = 1; k < k1.x.size(); ++k) area += 0.5 * (k1.density[k] + k1.density[k - 1]) * (k1.x[k] - k1.x[k - 1]);
  CHECK(area == doctest::Approx(1.0).epsilon(1e-3));
  const auto peak = std::max_element(k1.density.begin(), k1.density.end()) - k1.density.begin();
  CHECK(k1.x[static_cast<std::size_t>(peak)] == doctest::Approx(2.0).epsilon(0.05));

  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0, 1);
  std::vector<double> v(20000);
  for (auto& x : v) x = g(rng);
  const auto kn = kde(v, 0.3);
  double at0 = 0.0, best = 1e9;
  for (std::size_t k = 0; k < kn.x.size(); ++k) {
    if (std::abs(kn.x[k]) < best) {
      best = std::abs(kn.x[k]);
      at0 = kn.density[k];
    }
  }
  CHECK(rel(at0, 1.0 / std::sqrt(2 * M_PI)) < 0.1);

  std::vector<double> mix;
  for (int k = 0; k < 50; ++k) {
    mix.push_back(g(rng));
    mix.push_back(10 + g(rng));
  }
  const auto km = kde(mix, 0.5);
  int maxima = 0;
  for (std::size_t k = 1; k + 1 < km.x.size(); ++k) maxima += km.density[k] > km.density[k - 1] && km.density[k] >= km.density[k + 1] && km.density[k] > 0.02;
  CHECK(maxima == 2);
  CHECK_THROWS_AS(kde(std::span<const double>{}, 1.0), DomainError);
}

TEST_CASE("isotope shift ratio") {
  CHECK(isotope_shift_ratio(117, 119, 117, 119) == doctest::Approx(1.0));
  const double r = isotope_shift_ratio(117, 118, 117, 119);
  const double oracle = (1 / std::sqrt(117.) - 1 / std::sqrt(118.)) / (1 / std::sqrt(117.) - 1 / std::sqrt(119.));
  CHECK(r == doctest::Approx(oracle));
  // 117Sn, 118Sn, 119Sn atomic masses.
  CHECK(std::abs(isotope_shift_ratio(116.902954, 117.901607, 116.902954, 118.903311) - 0.502) < 0.001);
  CHECK_THROWS_AS(isotope_shift_ratio(117, 118, 119, 119), DomainError);
}

TEST_CASE("chi-squared independence") {
  const auto flat = chi2_independence({10, 20, 30, 60});
  CHECK(flat.chi2 == doctest::Approx(0.0));
  CHECK(flat.p_value == doctest::Approx(1.0));
  CHECK(flat.variant == "pearson");

  const ContingencyTable2x2 t{211, 34, 25, 187};
  const auto r = chi2_independence(t);
  // Hand-expanded Pearson sum.
  const double n = 457, r1 = 245, r2 = 212, c1 = 236, c2 = 221;
  const double e[] = {r1 * c1 / n, r1 * c2 / n, r2 * c1 / n, r2 * c2 / n};
  const double o[] = {211, 34, 25, 187};
  double chi2 = 0;
  for (int k = 0; k < 4; ++k) chi2 += (o[k] - e[k]) * (o[k] - e[k]) / e[k];
  CHECK(r.chi2 == doctest::Approx(chi2).epsilon(1e-12));
  CHECK(r.p_value < 1e-5);
  CHECK(r.p_value == doctest::Approx(oracle::chi2_survival_1dof(r.chi2)).epsilon(1e-8));

  const auto d = chi2_independence({422, 68, 50, 374});
  CHECK(d.chi2 == doctest::Approx(2.0 * r.chi2).epsilon(1e-12));
  CHECK_THROWS_AS(chi2_independence({0, 0, 5, 5}), DomainError);
}

TEST_CASE("chi-squared survival against oracles") {
  for (double x : {0.01, 0.5, 1.0, 3.84, 10.0, 25.0, 60.0}) {
    CHECK(chi2_survival(x, 1.0) == doctest::Approx(oracle::chi2_survival_1dof(x)).epsilon(1e-10));
    CHECK(chi2_survival(x, 1.0) == doctest::Approx(oracle::chi2_survival_1dof_simpson(x)).epsilon(1e-7));
  }
  // Two degrees of freedom: Q(1, x/2) = exp(-x/2).
  for (double x : {0.2, 2.0, 20.0}) CHECK(chi2_survival(x, 2.0) == doctest::Approx(std::exp(-0.5 * x)).epsilon(1e-12));
  CHECK(gamma_q(3.0, 0.0) == 1.0);
  CHECK_THROWS_AS(gamma_q(0.0, 1.0), DomainError);
}

TEST_CASE("ensemble statistics") {
  const double one[] = {5.5};
  const auto s1 = ensemble_stats(one, 1.0);
  CHECK(s1.mean == 5.5);
  CHECK(s1.std_err_of_mean == 0.0);
  CHECK(s1.counts.size() == 1);
  CHECK(s1.bin_edges.front() == 5.0);

  // Linewidth ensemble: spread 70, n 100 gives s.e. near 7.
  std::mt19937_64 rng(262);
  std::normal_distribution<double> g(262, 70);
  std::vector<double> v(100);
  for (auto& x : v) x = g(rng);
  const auto s = ensemble_stats(v, 10.0);
  CHECK(std::abs(s.mean - 262) < 3 * s.std_err_of_mean);
  CHECK(s.std_err_of_mean == doctest::Approx(7.0).epsilon(0.15));
  CHECK(std::accumulate(s.counts.begin(), s.counts.end(), std::size_t{0}) == 100);
  CHECK(s.bin_edges.size() == s.counts.size() + 1);
  for (double edge : s.bin_edges) CHECK(std::fmod(std::abs(edge), 10.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(ensemble_stats(std::span<const double>{}, 1.0), DomainError);
}

TEST_CASE("DFT discrepancy") {
  CHECK(dft_discrepancy_percent(-445, -345.02) == doctest::Approx(22.467).epsilon(1e-4));
  CHECK_THROWS_AS(dft_discrepancy_percent(0, 1), DomainError);
}
