#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hfspec/analysis.hpp"
#include "hfspec/errors.hpp"
#include "hfspec/kernels.hpp"

namespace hfspec {

namespace {

std::size_t index_of(const FitResult& fit, std::string_view name) {
  for (std::size_t k = 0; k < fit.names.size(); ++k) {
    if (fit.names[k] == name) return k;
  }
  std::ostringstream msg;
  msg << "fit has no parameter '" << name << "'";
  throw LookupError(msg.str());
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

void check_trace(const SpectrumTrace& trace, std::size_t n_params) {
  const auto n = trace.freq_mhz.size();
  if (n != trace.signal.size()) throw DomainError("trace grid and signal differ in length");
  if (n <= n_params) throw DomainError("trace has too few points for the model");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(trace.freq_mhz[k] > trace.freq_mhz[k - 1])) throw DomainError("trace grid must be strictly increasing");
  }
  const auto [lo, hi] = std::minmax_element(trace.signal.begin(), trace.signal.end());
  if (!std::isfinite(*lo) || !std::isfinite(*hi)) throw DomainError("trace signal is not finite");
  if (*hi - *lo <= 0.0) throw DomainError("trace signal is constant; nothing to fit");
}

// Full width at half height around `index`, at least two grid steps.
double half_width(const SpectrumTrace& trace, std::size_t index, double baseline) {
  const auto& s = trace.signal;
  const auto& f = trace.freq_mhz;
  const double half = baseline + 0.5 * (s[index] - baseline);
  std::size_t l = index, r = index;
  while (l > 0 && s[l] > half) --l;
  while (r + 1 < s.size() && s[r] > half) ++r;
  const double step = (f.back() - f.front()) / static_cast<double>(f.size() - 1);
  return std::max(f[r] - f[l], 2.0 * step);
}

FitResult make_result(std::string model, std::vector<std::string> names, const LmResult& lm) {
  FitResult fit;
  fit.model = std::move(model);
  fit.names = std::move(names);
  fit.params.assign(lm.params.data(), lm.params.data() + lm.params.size());
  fit.std_errs.assign(lm.std_errs.data(), lm.std_errs.data() + lm.std_errs.size());
  const double m = std::max(lm.n_residuals, 1);
  fit.residual_rms = std::sqrt(lm.cost / m);
  fit.initial_residual_rms = std::sqrt(lm.initial_cost / m);
  fit.n_points = static_cast<std::size_t>(lm.n_residuals);
  fit.converged = lm.converged;
  fit.n_iterations = lm.iterations;
  return fit;
}

LmResult fit_curve(const SpectrumTrace& trace, const std::function<std::vector<double>(std::span<const double>)>& eval,
                   std::vector<double> init, std::function<void(Eigen::VectorXd&)> project) {
  LeastSquaresProblem problem;
  problem.residuals = [&](const Eigen::VectorXd& p) {
    const auto model = eval(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
    Eigen::VectorXd r(static_cast<Eigen::Index>(model.size()));
    for (std::size_t k = 0; k < model.size(); ++k) r(static_cast<Eigen::Index>(k)) = model[k] - trace.signal[k];
    return r;
  };
  problem.project = std::move(project);
  const Eigen::VectorXd p0 = Eigen::Map<const Eigen::VectorXd>(init.data(), static_cast<Eigen::Index>(init.size()));
  return levenberg_marquardt(problem, p0);
}

std::vector<double> auto_init_single(const SpectrumTrace& trace) {
  const auto noise = estimate_noise(trace.signal);
  const double base = std::min(noise.baseline, percentile(trace.signal, 0.1));
  const auto peaks = find_peaks(trace, 3.0 * noise.sigma);
  std::size_t idx = 0;
  if (peaks.empty()) {
    idx = static_cast<std::size_t>(std::max_element(trace.signal.begin(), trace.signal.end()) - trace.signal.begin());
  } else {
    idx = peaks.front().index;
  }
  const double fwhm = half_width(trace, idx, base);
  const double height = trace.signal[idx] - base;
  return {trace.freq_mhz[idx], fwhm, height * std::numbers::pi * fwhm / 2.0, base};
}

std::vector<double> auto_init_triplet(const SpectrumTrace& trace) {
  const auto noise = estimate_noise(trace.signal);
  const double base = std::min(noise.baseline, percentile(trace.signal, 0.1));
  auto peaks = find_peaks(trace, 3.0 * noise.sigma);
  if (peaks.empty()) {
    const auto idx = static_cast<std::size_t>(std::max_element(trace.signal.begin(), trace.signal.end()) -
                                              trace.signal.begin());
    peaks.push_back({idx, trace.freq_mhz[idx], trace.signal[idx] - base, trace.signal[idx] - base});
  }
  const Peak h1 = peaks.front();
  double fwhm = half_width(trace, h1.index, base);
  double a_abs = 0.0, delta = 0.0;
  if (peaks.size() >= 3) {
    const double lo = std::min(peaks[1].freq_mhz, peaks[2].freq_mhz);
    const double hi = std::max(peaks[1].freq_mhz, peaks[2].freq_mhz);
    a_abs = std::abs(0.5 * (lo + hi) - h1.freq_mhz);
    delta = hi - lo;
    fwhm = std::min(fwhm, std::max(delta, 1e-9));
  } else if (peaks.size() == 2) {
    a_abs = std::abs(peaks[1].freq_mhz - h1.freq_mhz);
    delta = fwhm;
  } else {
    a_abs = 3.0 * fwhm;
    delta = fwhm;
  }
  const double height = trace.signal[h1.index] - base;
  return {h1.freq_mhz, -a_abs, delta, fwhm, height * std::numbers::pi * fwhm, base};
}

}  // namespace

double FitResult::param(std::string_view name) const { return params[index_of(*this, name)]; }

double FitResult::std_err(std::string_view name) const { return std_errs[index_of(*this, name)]; }

bool FitResult::has(std::string_view name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::string_view lorentz_model_name(LorentzModel m) {
  return m == LorentzModel::single ? "single" : "triplet211";
}

std::vector<double> lorentz_model_eval(LorentzModel model, std::span<const double> p, std::span<const double> grid) {
  std::vector<double> out(grid.size(), 0.0);
  double baseline = 0.0;
  if (model == LorentzModel::single) {
    const double c[] = {p[0]};
    const double w[] = {p[2]};
    kernels::lorentzian_accumulate(c, w, std::abs(p[1]), grid, out);
    baseline = p[3];
  } else {
    const double a = std::abs(p[1]);
    const double d = std::abs(p[2]);
    const double c[] = {p[0], p[0] + a - 0.5 * d, p[0] + a + 0.5 * d};
    const double w[] = {0.5 * p[4], 0.25 * p[4], 0.25 * p[4]};
    kernels::lorentzian_accumulate(c, w, std::abs(p[3]), grid, out);
    baseline = p[5];
  }
  for (auto& v : out) v += baseline;
  return out;
}

FitResult fit_lorentzians(const SpectrumTrace& trace, LorentzModel model,
                          const std::optional<std::vector<double>>& init) {
  const std::size_t n_params = model == LorentzModel::single ? 4 : 6;
  check_trace(trace, n_params);
  std::vector<double> p0 = init ? *init : (model == LorentzModel::single ? auto_init_single(trace) : auto_init_triplet(trace));
  if (p0.size() != n_params) throw PreconditionError("initial guess has the wrong number of parameters");

  std::function<void(Eigen::VectorXd&)> project;
  std::vector<std::string> names;
  if (model == LorentzModel::single) {
    names = {"f0", "fwhm", "amplitude", "baseline"};
    project = [](Eigen::VectorXd& p) { p(1) = std::max(std::abs(p(1)), 1e-9); };
  } else {
    names = {"f_c_h1", "a_ple", "delta", "fwhm", "amplitude", "baseline"};
    project = [](Eigen::VectorXd& p) {
      p(1) = -std::abs(p(1));
      p(2) = std::abs(p(2));
      p(3) = std::max(std::abs(p(3)), 1e-9);
    };
  }
  const auto lm = fit_curve(
      trace, [&](std::span<const double> p) { return lorentz_model_eval(model, p, trace.freq_mhz); }, p0, project);
  return make_result(std::string(lorentz_model_name(model)), std::move(names), lm);
}

std::vector<double> gaussian_model_eval(std::span<const double> p, std::span<const double> grid) {
  std::vector<double> out(grid.size(), 0.0);
  const double c[] = {p[0]};
  const double w[] = {p[2]};
  kernels::gaussian_accumulate(c, w, std::abs(p[1]), grid, out);
  for (auto& v : out) v += p[3];
  return out;
}

FitResult fit_gaussian(const SpectrumTrace& trace, const std::optional<std::vector<double>>& init) {
  check_trace(trace, 4);
  std::vector<double> p0;
  if (init) {
    p0 = *init;
  } else {
    const auto single = auto_init_single(trace);
    const double sigma = single[1] / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    const auto idx = static_cast<std::size_t>(std::max_element(trace.signal.begin(), trace.signal.end()) -
                                              trace.signal.begin());
    const double height = trace.signal[idx] - single[3];
    p0 = {single[0], sigma, height * sigma * std::sqrt(2.0 * std::numbers::pi), single[3]};
  }
  if (p0.size() != 4) throw PreconditionError("initial guess has the wrong number of parameters");
  const auto lm = fit_curve(
      trace, [&](std::span<const double> p) { return gaussian_model_eval(p, trace.freq_mhz); }, p0,
      [](Eigen::VectorXd& p) { p(1) = std::max(std::abs(p(1)), 1e-12); });
  return make_result("gaussian", {"center", "sigma", "amplitude", "baseline"}, lm);
}

NoiseEstimate estimate_noise(std::span<const double> signal) {
  if (signal.empty()) throw DomainError("empty signal");
  std::vector<double> values(signal.begin(), signal.end());
  NoiseEstimate est;
  est.baseline = median(values);
  if (signal.size() < 2) return est;
  std::vector<double> diffs;
  diffs.reserve(signal.size() - 1);
  for (std::size_t k = 1; k < signal.size(); ++k) diffs.push_back(signal[k] - signal[k - 1]);
  const double center = median(diffs);
  for (auto& d : diffs) d = std::abs(d - center);
  // 1.4826 MAD estimates a Gaussian sigma; differencing doubles the variance.
  est.sigma = 1.4826 * median(diffs) / std::numbers::sqrt2;
  return est;
}

std::vector<Peak> find_peaks(const SpectrumTrace& trace, double min_prominence) {
  const auto& s = trace.signal;
  const std::size_t n = s.size();
  const double base = estimate_noise(s).baseline;
  std::vector<Peak> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || s[i] > s[i - 1];
    const bool right_ok = i + 1 == n || s[i] >= s[i + 1];
    if (!left_ok || !right_ok) continue;
    if (s[i] - base <= min_prominence) continue;
    double left_min = s[i];
    std::size_t j = i;
    while (j > 0 && s[j - 1] <= s[i]) left_min = std::min(left_min, s[--j]);
    double right_min = s[i];
    j = i;
    while (j + 1 < n && s[j + 1] <= s[i]) right_min = std::min(right_min, s[++j]);
    const double ref = std::max(left_min, right_min);
    const double prominence = s[i] - ref;
    if (prominence < min_prominence) continue;
    peaks.push_back({i, trace.freq_mhz[i], s[i] - base, prominence});
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.height != b.height) return a.height > b.height;
    return a.freq_mhz < b.freq_mhz;
  });
  return peaks;
}

double bic(const FitResult& fit) {
  const double n = static_cast<double>(std::max<std::size_t>(fit.n_points, 1));
  const double rss = fit.residual_rms * fit.residual_rms * n;
  const double k = static_cast<double>(fit.params.size());
  return n * std::log(std::max(rss / n, 1e-300)) + k * std::log(n);
}

}  // namespace hfspec
