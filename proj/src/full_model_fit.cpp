#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "hfspec/analysis.hpp"
#include "hfspec/errors.hpp"
#include "hfspec/kernels.hpp"

namespace hfspec {

namespace {

// Transition tables for every row, memoized on the Hamiltonian parameters so
// that Jacobian columns for lineshape parameters reuse one diagonalization.
class TransitionCache {
 public:
  TransitionCache(const EmitterModel& emitter, std::vector<FieldVector> fields)
      : emitter_(emitter), fields_(std::move(fields)) {}

  const std::vector<TransitionTable>& get(double scale, double alpha) {
    const auto key = std::make_pair(scale, alpha);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    if (cache_.size() > 256) cache_.clear();
    EmitterModel m = with_hyperfine_scale(emitter_, scale);
    m.strain.alpha_ghz = alpha;
    m.exc_strain.reset();
    std::vector<TransitionTable> tables;
    tables.reserve(fields_.size());
    for (const auto& b : fields_) tables.push_back(transitions(m, b));
    return cache_.emplace(key, std::move(tables)).first->second;
  }

 private:
  EmitterModel emitter_;
  std::vector<FieldVector> fields_;
  std::map<std::pair<double, double>, std::vector<TransitionTable>> cache_;
};

void render(const TransitionTable& table, std::span<const double> grid, double fwhm, double amplitude,
            double offset, std::span<double> out) {
  std::vector<double> centers, weights;
  for (const auto& line : table.lines) {
    centers.push_back(line.freq_mhz + offset);
    weights.push_back(amplitude * line.intensity);
  }
  kernels::lorentzian_accumulate(centers, weights, fwhm, grid, out);
}

std::vector<FieldVector> row_fields(const SpectralMap& map) {
  std::vector<FieldVector> out;
  for (const auto& row : map.rows) out.push_back(row.b_tesla);
  return out;
}

}  // namespace

std::string_view free_param_name(FreeParam p) {
  switch (p) {
    case FreeParam::a_ple_scale: return "a_ple_scale";
    case FreeParam::strain_alpha: return "strain_alpha";
    case FreeParam::fwhm: return "fwhm";
    case FreeParam::amplitude: return "amplitude";
    case FreeParam::freq_offset: return "freq_offset";
  }
  return "";
}

FreeParam parse_free_param(std::string_view name) {
  for (auto p : {FreeParam::a_ple_scale, FreeParam::strain_alpha, FreeParam::fwhm, FreeParam::amplitude,
                 FreeParam::freq_offset}) {
    if (free_param_name(p) == name) return p;
  }
  std::ostringstream msg;
  msg << "unknown free parameter '" << name
      << "'; expected one of a_ple_scale, strain_alpha, fwhm, amplitude, freq_offset";
  throw LookupError(msg.str());
}

std::vector<std::vector<double>> full_model_eval(const SpectralMap& layout, const EmitterModel& emitter,
                                                 double a_ple_scale, double alpha_ghz, double fwhm_mhz,
                                                 double amplitude, double freq_offset_mhz) {
  TransitionCache cache(emitter, row_fields(layout));
  const auto& tables = cache.get(a_ple_scale, alpha_ghz);
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < layout.rows.size(); ++r) {
    const auto& grid = layout.rows[r].freq_mhz;
    std::vector<double> row(grid.size(), 0.0);
    render(tables[r], grid, fwhm_mhz, amplitude, freq_offset_mhz, row);
    out.push_back(std::move(row));
  }
  return out;
}

FitResult fit_full_model(const SpectralMap& data, const FullModelConfig& config) {
  if (data.rows.empty()) throw DomainError("spectral map has no rows");
  if (config.free.empty()) throw PreconditionError("no free parameters selected");
  config.emitter.validate();
  std::size_t n_points = 0;
  for (const auto& row : data.rows) {
    if (row.freq_mhz.size() != row.signal.size()) throw DomainError("trace grid and signal differ in length");
    n_points += row.signal.size();
  }
  if (n_points <= config.free.size()) throw DomainError("too few data points for the free parameters");

  // Full parameter vector: scale, alpha, fwhm, amplitude, offset.
  const std::array<double, 5> start{config.a_ple_scale, config.emitter.strain.alpha_ghz, config.fwhm_mhz,
                                    config.amplitude, config.freq_offset_mhz};
  std::vector<int> slot;
  for (auto f : config.free) {
    const int k = static_cast<int>(f);
    if (std::find(slot.begin(), slot.end(), k) != slot.end()) throw PreconditionError("free parameter listed twice");
    slot.push_back(k);
  }

  TransitionCache cache(config.emitter, row_fields(data));
  auto expand = [&](const Eigen::VectorXd& p) {
    std::array<double, 5> full = start;
    for (std::size_t k = 0; k < slot.size(); ++k) full[static_cast<std::size_t>(slot[k])] = p(static_cast<Eigen::Index>(k));
    return full;
  };

  LeastSquaresProblem problem;
  problem.residuals = [&](const Eigen::VectorXd& p) {
    const auto full = expand(p);
    const auto& tables = cache.get(full[0], full[1]);
    Eigen::VectorXd r(static_cast<Eigen::Index>(n_points));
    Eigen::Index offset = 0;
    for (std::size_t row = 0; row < data.rows.size(); ++row) {
      const auto& trace = data.rows[row];
      std::vector<double> model(trace.freq_mhz.size(), 0.0);
      render(tables[row], trace.freq_mhz, full[2], full[3], full[4], model);
      for (std::size_t k = 0; k < model.size(); ++k) r(offset++) = model[k] - trace.signal[k];
    }
    return r;
  };
  problem.project = [&](Eigen::VectorXd& p) {
    for (std::size_t k = 0; k < slot.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      if (slot[k] == 0 || slot[k] == 1) p(i) = std::abs(p(i));
      if (slot[k] == 2) p(i) = std::max(std::abs(p(i)), 1e-6);
    }
  };

  Eigen::VectorXd p0(static_cast<Eigen::Index>(slot.size()));
  for (std::size_t k = 0; k < slot.size(); ++k) p0(static_cast<Eigen::Index>(k)) = start[static_cast<std::size_t>(slot[k])];
  const auto lm = levenberg_marquardt(problem, p0, config.options);

  FitResult fit;
  fit.model = "full";
  for (std::size_t k = 0; k < slot.size(); ++k) {
    fit.names.emplace_back(free_param_name(static_cast<FreeParam>(slot[k])));
    fit.params.push_back(lm.params(static_cast<Eigen::Index>(k)));
    fit.std_errs.push_back(lm.std_errs(static_cast<Eigen::Index>(k)));
  }
  const double base_aple = a_ple(config.emitter);
  const auto full = expand(lm.params);
  double scale_err = 0.0;
  for (std::size_t k = 0; k < slot.size(); ++k) {
    if (slot[k] == 0) scale_err = lm.std_errs(static_cast<Eigen::Index>(k));
  }
  fit.names.emplace_back("a_ple");
  fit.params.push_back(full[0] * base_aple);
  fit.std_errs.push_back(scale_err * std::abs(base_aple));

  const double m = static_cast<double>(n_points);
  fit.residual_rms = std::sqrt(lm.cost / m);
  fit.initial_residual_rms = std::sqrt(lm.initial_cost / m);
  fit.n_points = n_points;
  fit.converged = lm.converged;
  fit.n_iterations = lm.iterations;
  return fit;
}

FitResult fit_full_model(const SpectrumTrace& data, const FullModelConfig& config) {
  SpectralMap map;
  map.b_tesla = {data.b_tesla.norm()};
  map.freq_mhz = data.freq_mhz;
  map.rows = {data};
  return fit_full_model(map, config);
}

}  // namespace hfspec
