#pragma once

// Electro-nuclear Hamiltonian of a group-IV split-vacancy center: spin-orbit,
// strain, Zeeman (spin, orbital, nuclear), hyperfine, quadrupole and nuclear
// spin-orbit terms for either orbital manifold. All terms are in MHz.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hfspec/spinops.hpp"

namespace hfspec {

struct PhysicalConstants {
  static constexpr double mu_b_over_h = 13996.2449;  // MHz/T
  static constexpr double mu_n_over_h = 7.622593;    // MHz/T
};

inline constexpr double kDefaultElectronG = 2.0023;
inline constexpr double kMhzPerGhz = 1000.0;
// Ground-state quadrupole estimate for 73Ge, MHz. Not applied by default.
inline constexpr double kGe73GroundQuadrupoleMhz = 4.3;

using FieldVector = Eigen::Vector3d;  // Tesla, z along the symmetry axis

enum class Manifold { ground, excited };

std::string_view manifold_name(Manifold m);

struct ManifoldParams {
  double lambda_soc_ghz = 0.0;
  double q_orb = 0.1;
  double a_fc_mhz = 0.0;
  double a_dd_mhz = 0.0;
  double quad_q_mhz = 0.0;
  double ioc_upsilon_mhz = 0.0;

  friend bool operator==(const ManifoldParams&, const ManifoldParams&) = default;
};

struct Strain {
  double alpha_ghz = 0.0;
  double beta_ghz = 0.0;

  friend bool operator==(const Strain&, const Strain&) = default;
};

struct EmitterModel {
  std::string isotope_label;
  Spin nuclear_spin;
  double g_nuclear = 0.0;
  double g_electron = kDefaultElectronG;
  Strain strain;
  ManifoldParams gnd;
  ManifoldParams exc;
  // Excited-manifold strain when it should differ from the shared value.
  std::optional<Strain> exc_strain;

  const ManifoldParams& params(Manifold m) const { return m == Manifold::ground ? gnd : exc; }
  ManifoldParams& params(Manifold m) { return m == Manifold::ground ? gnd : exc; }
  Strain strain_for(Manifold m) const {
    return (m == Manifold::excited && exc_strain) ? *exc_strain : strain;
  }
  Eigen::Index dim() const { return 4 * nuclear_spin.multiplicity(); }

  // Throws DomainError on non-finite values, lambda <= 0, or a quadrupole
  // term on a spin <= 1/2 nucleus.
  void validate() const;

  friend bool operator==(const EmitterModel&, const EmitterModel&) = default;
};

// Operators embedded in the full orbital (x) spin (x) nuclear space.
struct ProductOperators {
  OperatorMatrix orb_x, orb_y, orb_z;
  OperatorMatrix sx, sy, sz;
  OperatorMatrix ix, iy, iz;
  OperatorMatrix jz;   // Sz + Iz
  OperatorMatrix jsq;  // (S + I)^2
  OperatorMatrix identity;
};

// Built once per spin value and shared; the reference stays valid for the
// lifetime of the program.
const ProductOperators& product_operators(Spin nuclear_spin);

OperatorMatrix term_soc(const ManifoldParams& params, Spin nuclear_spin);
OperatorMatrix term_strain(double alpha_ghz, double beta_ghz, Spin nuclear_spin);
OperatorMatrix term_zeeman(const EmitterModel& emitter, Manifold manifold, const FieldVector& b_tesla);
OperatorMatrix term_hyperfine(const ManifoldParams& params, Spin nuclear_spin);
OperatorMatrix term_quadrupole(const ManifoldParams& params, Spin nuclear_spin);
OperatorMatrix term_ioc(const ManifoldParams& params, Spin nuclear_spin);

OperatorMatrix build_hamiltonian(const EmitterModel& emitter, Manifold manifold, const FieldVector& b_tesla);

double a_parallel(const ManifoldParams& params);
double a_perp(const ManifoldParams& params);
// Optical hyperfine spacing 1/2 (A_par^exc - A_par^gnd), MHz.
double a_ple(const EmitterModel& emitter);

// Copy with the contact and dipolar couplings shifted, e.g. by a
// symmetry-lowering distortion.
ManifoldParams jt_shifted_params(const ManifoldParams& params, double delta_fc_mhz, double delta_dd_mhz);

// Copy with all four hyperfine couplings multiplied by `scale`.
EmitterModel with_hyperfine_scale(const EmitterModel& emitter, double scale);
// Copy with hyperfine, quadrupole and nuclear spin-orbit couplings zeroed.
EmitterModel without_nuclear_couplings(const EmitterModel& emitter);

// Built-in isotope registry.
EmitterModel registry_lookup(std::string_view isotope_label);
std::vector<std::string> registry_labels();
bool registry_contains(std::string_view isotope_label);

// Measured optical hyperfine spacing for the isotopes where one is tabulated.
struct MeasuredAple {
  double value_mhz;
  double uncertainty_mhz;
};
std::optional<MeasuredAple> measured_a_ple(std::string_view isotope_label);

}  // namespace hfspec
