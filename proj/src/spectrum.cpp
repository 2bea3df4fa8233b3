#include "hfspec/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hfspec/errors.hpp"
#include "hfspec/kernels.hpp"

namespace hfspec {

namespace {

struct Branch {
  std::vector<double> levels;
  ComplexMatrix vectors;  // full-space eigenvectors, all columns
  std::vector<double> jsq;
  std::vector<double> mj;
};

double max_nuclear_coupling(const ManifoldParams& p, Spin i) {
  const double iv = i.value();
  return std::max({std::abs(a_parallel(p)), std::abs(a_perp(p)), std::abs(p.quad_q_mhz) * iv * iv,
                   std::abs(p.ioc_upsilon_mhz) * iv});
}

Branch solve_branch(const EmitterModel& emitter, Manifold manifold, const FieldVector& b) {
  const auto sys = diagonalize(emitter, manifold, b);
  const int n_low = lower_branch_size(emitter.nuclear_spin);
  const double coupling = max_nuclear_coupling(emitter.params(manifold), emitter.nuclear_spin);
  const double gap = sys.values[static_cast<std::size_t>(n_low)] - sys.values[static_cast<std::size_t>(n_low - 1)];
  if (coupling > 0.0 && gap <= 10.0 * coupling) {
    std::ostringstream msg;
    msg << manifold_name(manifold) << " spin-orbit branch gap " << gap
        << " MHz is not well above the nuclear couplings (" << coupling << " MHz)";
    throw PreconditionError(msg.str());
  }
  const auto& ops = product_operators(emitter.nuclear_spin);
  Branch out;
  out.levels.assign(sys.values.begin(), sys.values.end());
  out.vectors = sys.vectors;
  for (int k = 0; k < n_low; ++k) {
    const ComplexVector v = sys.vectors.col(k);
    out.jsq.push_back(expectation(ops.jsq, v));
    out.mj.push_back(expectation(ops.jz, v));
  }
  return out;
}

double lower_mean(const EmitterModel& emitter, Manifold manifold, const FieldVector& b) {
  const auto h = build_hamiltonian(emitter, manifold, b);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
  const int n_low = lower_branch_size(emitter.nuclear_spin);
  return solver.eigenvalues().head(n_low).mean();
}

}  // namespace

OperatorMatrix dipole_operator(Spin nuclear_spin) {
  return OperatorMatrix::identity(4 * nuclear_spin.multiplicity());
}

int lower_branch_size(Spin nuclear_spin) { return 2 * nuclear_spin.multiplicity(); }

EigenSystem diagonalize(const EmitterModel& emitter, Manifold manifold, const FieldVector& b) {
  const auto& ops = product_operators(emitter.nuclear_spin);
  const std::array<OperatorMatrix, 3> resolvers{ops.jsq, ops.jz, ops.orb_z};
  return eigh(build_hamiltonian(emitter, manifold, b), resolvers);
}

TransitionTable transitions(const EmitterModel& emitter_in, const FieldVector& b,
                            const std::optional<Strain>& strain_override) {
  EmitterModel emitter = emitter_in;
  if (strain_override) {
    emitter.strain = *strain_override;
    emitter.exc_strain.reset();
  }
  emitter.validate();

  const Branch gnd = solve_branch(emitter, Manifold::ground, b);
  const Branch exc = solve_branch(emitter, Manifold::excited, b);
  const EmitterModel bare = without_nuclear_couplings(emitter);
  const double mean_g = lower_mean(bare, Manifold::ground, b);
  const double mean_e = lower_mean(bare, Manifold::excited, b);

  const int n_low = lower_branch_size(emitter.nuclear_spin);
  const ComplexMatrix d = dipole_operator(emitter.nuclear_spin).matrix();
  const ComplexMatrix amplitudes = exc.vectors.adjoint() * d * gnd.vectors;

  TransitionTable table;
  table.reference_mhz = mean_e - mean_g;
  table.dipole_sum = amplitudes.cwiseAbs2().sum();
  for (int k = 0; k < n_low; ++k) {
    table.gnd_levels_mhz.push_back(gnd.levels[static_cast<std::size_t>(k)] - mean_g);
    table.exc_levels_mhz.push_back(exc.levels[static_cast<std::size_t>(k)] - mean_e);
  }
  table.gnd_jsq = gnd.jsq;
  table.exc_jsq = exc.jsq;

  const double population = 1.0 / n_low;
  std::vector<TransitionLine> all;
  double peak = 0.0;
  for (int g = 0; g < n_low; ++g) {
    for (int e = 0; e < n_low; ++e) {
      TransitionLine line;
      line.intensity = population * std::norm(amplitudes(e, g));
      line.freq_mhz = table.exc_levels_mhz[static_cast<std::size_t>(e)] - table.gnd_levels_mhz[static_cast<std::size_t>(g)];
      line.gnd_index = g;
      line.exc_index = e;
      line.jsq_gnd = gnd.jsq[static_cast<std::size_t>(g)];
      line.jsq_exc = exc.jsq[static_cast<std::size_t>(e)];
      line.mj_gnd = gnd.mj[static_cast<std::size_t>(g)];
      line.mj_exc = exc.mj[static_cast<std::size_t>(e)];
      peak = std::max(peak, line.intensity);
      all.push_back(line);
    }
  }
  for (const auto& line : all) {
    if (line.intensity > kLineRetention * peak) table.lines.push_back(line);
  }
  return table;
}

std::vector<MergedLine> merge_degenerate(const TransitionTable& table, double tolerance) {
  std::vector<TransitionLine> sorted = table.lines;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.freq_mhz < b.freq_mhz; });
  std::vector<MergedLine> out;
  double group_start = 0.0;
  double weighted = 0.0;
  for (const auto& line : sorted) {
    if (out.empty() || line.freq_mhz - group_start > tolerance) {
      if (!out.empty() && out.back().intensity > 0.0) out.back().freq_mhz = weighted / out.back().intensity;
      out.push_back({line.freq_mhz, 0.0, 0});
      group_start = line.freq_mhz;
      weighted = 0.0;
    }
    out.back().intensity += line.intensity;
    out.back().multiplicity += 1;
    weighted += line.intensity * line.freq_mhz;
  }
  if (!out.empty() && out.back().intensity > 0.0) out.back().freq_mhz = weighted / out.back().intensity;
  return out;
}

std::vector<double> make_grid(double min_mhz, double max_mhz, double step_mhz) {
  if (!(step_mhz > 0.0) || !std::isfinite(min_mhz) || !std::isfinite(max_mhz)) {
    throw DomainError("grid needs finite bounds and a positive step");
  }
  if (max_mhz < min_mhz) throw DomainError("grid maximum is below its minimum");
  const auto n = static_cast<std::size_t>(std::floor((max_mhz - min_mhz) / step_mhz + 0.5)) + 1;
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) grid[k] = min_mhz + static_cast<double>(k) * step_mhz;
  return grid;
}

SpectrumTrace synth_spectrum(const TransitionTable& table, double fwhm_mhz, std::span<const double> grid) {
  if (!(fwhm_mhz > 0.0) || !std::isfinite(fwhm_mhz)) throw DomainError("linewidth must be positive");
  if (grid.empty()) throw DomainError("frequency grid is empty");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw DomainError("frequency grid must be strictly increasing");
  }
  SpectrumTrace trace;
  trace.freq_mhz.assign(grid.begin(), grid.end());
  trace.signal.assign(grid.size(), 0.0);
  trace.fwhm_mhz = fwhm_mhz;
  std::vector<double> centers, weights;
  centers.reserve(table.lines.size());
  weights.reserve(table.lines.size());
  for (const auto& line : table.lines) {
    centers.push_back(line.freq_mhz);
    weights.push_back(line.intensity);
  }
  kernels::lorentzian_accumulate(centers, weights, fwhm_mhz, grid, trace.signal);
  return trace;
}

LevelSweep sweep_strain(const EmitterModel& emitter, Manifold manifold, std::span<const double> alpha_ghz) {
  for (std::size_t k = 1; k < alpha_ghz.size(); ++k) {
    if (!(alpha_ghz[k] > alpha_ghz[k - 1])) throw DomainError("strain axis must be strictly increasing");
  }
  const auto& ops = product_operators(emitter.nuclear_spin);
  const int n_low = lower_branch_size(emitter.nuclear_spin);
  LevelSweep sweep;
  sweep.axis.assign(alpha_ghz.begin(), alpha_ghz.end());
  for (double alpha : alpha_ghz) {
    EmitterModel m = emitter;
    m.strain = {alpha, emitter.strain.beta_ghz};
    m.exc_strain.reset();
    const auto sys = diagonalize(m, manifold, FieldVector::Zero());
    const double mean =
        std::accumulate(sys.values.begin(), sys.values.begin() + n_low, 0.0) / static_cast<double>(n_low);
    std::vector<double> levels, jsq;
    for (int k = 0; k < n_low; ++k) {
      levels.push_back(sys.values[static_cast<std::size_t>(k)] - mean);
      jsq.push_back(expectation(ops.jsq, sys.vectors.col(k)));
    }
    sweep.levels.push_back(std::move(levels));
    sweep.jsq.push_back(std::move(jsq));
  }
  return sweep;
}

SpectralMap sweep_field(const EmitterModel& emitter, const FieldVector& direction,
                        std::span<const double> b_magnitudes, double fwhm_mhz, std::span<const double> grid) {
  if (std::abs(direction.norm() - 1.0) > 1e-6) throw DomainError("field direction must be a unit vector");
  SpectralMap map;
  map.direction = direction;
  map.b_tesla.assign(b_magnitudes.begin(), b_magnitudes.end());
  map.freq_mhz.assign(grid.begin(), grid.end());
  for (double b : b_magnitudes) {
    const FieldVector field = b * direction;
    auto trace = synth_spectrum(transitions(emitter, field), fwhm_mhz, grid);
    trace.b_tesla = field;
    trace.strain = emitter.strain;
    trace.label = emitter.isotope_label;
    map.rows.push_back(std::move(trace));
  }
  return map;
}

TransitionDiagram transition_diagram_export(const EmitterModel& emitter, const FieldVector& b,
                                            const std::optional<Strain>& strain) {
  auto table = transitions(emitter, b, strain);
  return {std::move(table.gnd_levels_mhz), std::move(table.exc_levels_mhz), std::move(table.lines)};
}

}  // namespace hfspec
