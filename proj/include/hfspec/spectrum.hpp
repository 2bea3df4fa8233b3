#pragma once

// Optical C-line transitions between the lower spin-orbit branches of the
// ground and excited manifolds, broadened spectra, level sweeps and field maps.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hfspec/hamiltonian.hpp"
#include "hfspec/spinops.hpp"

namespace hfspec {

struct TransitionLine {
  double freq_mhz = 0.0;   // detuning from the hyperfine-free C line
  double intensity = 0.0;  // population-weighted |<e|D|g>|^2
  int gnd_index = 0;       // index into the ground lower-branch levels
  int exc_index = 0;
  double jsq_gnd = 0.0;
  double jsq_exc = 0.0;
  double mj_gnd = 0.0;  // <Sz + Iz>
  double mj_exc = 0.0;
};

struct TransitionTable {
  std::vector<TransitionLine> lines;
  // Lower-branch levels relative to the hyperfine-free lower-branch mean, MHz.
  std::vector<double> gnd_levels_mhz;
  std::vector<double> exc_levels_mhz;
  std::vector<double> gnd_jsq;
  std::vector<double> exc_jsq;
  // Unweighted sum of |<e|D|g>|^2 over every ground/excited eigenstate pair.
  double dipole_sum = 0.0;
  // Hyperfine-free C-line energy difference subtracted from every line, MHz.
  double reference_mhz = 0.0;
};

struct MergedLine {
  double freq_mhz = 0.0;
  double intensity = 0.0;
  int multiplicity = 0;
};

struct SpectrumTrace {
  std::vector<double> freq_mhz;
  std::vector<double> signal;
  double fwhm_mhz = 0.0;
  FieldVector b_tesla = FieldVector::Zero();
  Strain strain;
  std::string label;
};

struct LevelSweep {
  std::vector<double> axis;
  std::vector<std::vector<double>> levels;  // per point, MHz relative to the branch mean
  std::vector<std::vector<double>> jsq;
};

struct SpectralMap {
  FieldVector direction = FieldVector::UnitZ();
  std::vector<double> b_tesla;
  std::vector<double> freq_mhz;
  std::vector<SpectrumTrace> rows;
};

inline constexpr double kLineRetention = 1e-9;
inline constexpr double kMergeTolerance = 0.01;  // MHz

// Orbital-character-preserving map from the ground to the excited space.
OperatorMatrix dipole_operator(Spin nuclear_spin);

// Number of lower-branch states, 2(2I+1).
int lower_branch_size(Spin nuclear_spin);

// Eigenvectors resolved by <J^2>, <Jz> and orbital character.
EigenSystem diagonalize(const EmitterModel& emitter, Manifold manifold, const FieldVector& b_tesla);

TransitionTable transitions(const EmitterModel& emitter, const FieldVector& b_tesla,
                            const std::optional<Strain>& strain_override = std::nullopt);

// Lines closer than `tolerance` are combined; frequency is the
// intensity-weighted mean. Result sorted by frequency.
std::vector<MergedLine> merge_degenerate(const TransitionTable& table, double tolerance = kMergeTolerance);

// Inclusive grid from min to max; the last point is kept if within step/2 of max.
std::vector<double> make_grid(double min_mhz, double max_mhz, double step_mhz);

// Sum of unit-area Lorentzians weighted by line intensity.
SpectrumTrace synth_spectrum(const TransitionTable& table, double fwhm_mhz, std::span<const double> grid);

LevelSweep sweep_strain(const EmitterModel& emitter, Manifold manifold, std::span<const double> alpha_ghz);

SpectralMap sweep_field(const EmitterModel& emitter, const FieldVector& direction,
                        std::span<const double> b_magnitudes, double fwhm_mhz, std::span<const double> grid);

struct TransitionDiagram {
  std::vector<double> gnd_levels_mhz;
  std::vector<double> exc_levels_mhz;
  std::vector<TransitionLine> lines;
};

TransitionDiagram transition_diagram_export(const EmitterModel& emitter, const FieldVector& b_tesla,
                                            const std::optional<Strain>& strain = std::nullopt);

}  // namespace hfspec
