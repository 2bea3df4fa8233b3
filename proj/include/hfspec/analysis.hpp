#pragma once

// Peak and full-model fitting, density estimation and ensemble statistics.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hfspec/hamiltonian.hpp"
#include "hfspec/levmar.hpp"
#include "hfspec/spectrum.hpp"

namespace hfspec {

struct FitResult {
  std::string model;
  std::vector<std::string> names;
  std::vector<double> params;
  std::vector<double> std_errs;
  double residual_rms = 0.0;
  double initial_residual_rms = 0.0;
  std::size_t n_points = 0;
  bool converged = false;
  int n_iterations = 0;
  std::uint64_t seed = 0;

  // Throws LookupError for an unknown name.
  double param(std::string_view name) const;
  double std_err(std::string_view name) const;
  bool has(std::string_view name) const;
};

enum class LorentzModel { single, triplet211 };

std::string_view lorentz_model_name(LorentzModel m);

// Parameter order for the two Lorentzian models.
//   single:     f0, fwhm, amplitude, baseline
//   triplet211: f_c_h1, a_ple, delta, fwhm, amplitude, baseline
// Triplet centers: f_c_h1, f_c_h1 + |a_ple| - delta/2, f_c_h1 + |a_ple| + delta/2,
// area weights 2:1:1 summing to `amplitude`. a_ple is reported negative and
// delta non-negative.
std::vector<double> lorentz_model_eval(LorentzModel model, std::span<const double> params,
                                       std::span<const double> grid);

FitResult fit_lorentzians(const SpectrumTrace& trace, LorentzModel model,
                          const std::optional<std::vector<double>>& init = std::nullopt);

// Parameter order: center, sigma, amplitude (area), baseline.
std::vector<double> gaussian_model_eval(std::span<const double> params, std::span<const double> grid);
FitResult fit_gaussian(const SpectrumTrace& trace, const std::optional<std::vector<double>>& init = std::nullopt);

struct Peak {
  std::size_t index = 0;
  double freq_mhz = 0.0;
  double height = 0.0;  // above baseline
  double prominence = 0.0;
};

struct NoiseEstimate {
  double baseline = 0.0;  // median of the signal
  double sigma = 0.0;     // robust point-to-point noise
};

NoiseEstimate estimate_noise(std::span<const double> signal);

// Local maxima whose prominence exceeds `min_prominence`, tallest first, ties
// broken by lower frequency.
std::vector<Peak> find_peaks(const SpectrumTrace& trace, double min_prominence);

enum class FreeParam { a_ple_scale, strain_alpha, fwhm, amplitude, freq_offset };

std::string_view free_param_name(FreeParam p);
FreeParam parse_free_param(std::string_view name);

struct FullModelConfig {
  EmitterModel emitter;
  std::vector<FreeParam> free;
  // Starting values; those not freed stay fixed. strain_alpha starts from
  // emitter.strain.alpha_ghz.
  double a_ple_scale = 1.0;
  double fwhm_mhz = 100.0;
  double amplitude = 1.0;
  double freq_offset_mhz = 0.0;
  LmOptions options;
};

// Rows of `data` must share one frequency grid. Reports the freed parameters
// plus the derived a_ple (MHz).
FitResult fit_full_model(const SpectralMap& data, const FullModelConfig& config);
FitResult fit_full_model(const SpectrumTrace& data, const FullModelConfig& config);

// Model evaluation matching fit_full_model, one row per field.
std::vector<std::vector<double>> full_model_eval(const SpectralMap& layout, const EmitterModel& emitter,
                                                 double a_ple_scale, double alpha_ghz, double fwhm_mhz,
                                                 double amplitude, double freq_offset_mhz);

struct DensityTrace {
  std::vector<double> x;
  std::vector<double> density;
  double bandwidth = 0.0;
};

DensityTrace kde(std::span<const double> values, double bandwidth);

double isotope_shift_ratio(double m_a, double m_b, double m_c, double m_d);

struct ContingencyTable2x2 {
  // rows: spin-active / spin-neutral; columns: with / without the feature
  long active_with = 0;
  long active_without = 0;
  long neutral_with = 0;
  long neutral_without = 0;
};

struct Chi2Result {
  double chi2 = 0.0;
  double p_value = 1.0;
  int dof = 1;
  std::string variant = "pearson";
};

Chi2Result chi2_independence(const ContingencyTable2x2& table);

// Upper-tail probability of the chi-squared distribution with k degrees of freedom.
double chi2_survival(double x, double k);
// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

struct EnsembleStats {
  std::size_t n = 0;
  double mean = 0.0;
  double std_err_of_mean = 0.0;
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
};

EnsembleStats ensemble_stats(std::span<const double> values, double bin_width);

// |measured - predicted| / |measured| in percent.
double dft_discrepancy_percent(double measured, double predicted);

// Bayesian information criterion for a least-squares fit with Gaussian errors.
double bic(const FitResult& fit);

}  // namespace hfspec
