#include "hfspec/hamiltonian.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "hfspec/errors.hpp"

namespace hfspec {

namespace {

OperatorMatrix spin_half(int axis) {
  auto s = spin_matrices(Spin::from_twice(1));
  return axis == 0 ? s.x : axis == 1 ? s.y : s.z;
}

bool finite(const ManifoldParams& p) {
  return std::isfinite(p.lambda_soc_ghz) && std::isfinite(p.q_orb) && std::isfinite(p.a_fc_mhz) &&
         std::isfinite(p.a_dd_mhz) && std::isfinite(p.quad_q_mhz) && std::isfinite(p.ioc_upsilon_mhz);
}

void validate_manifold(const ManifoldParams& p, Spin nuclear_spin, std::string_view name) {
  std::ostringstream msg;
  if (!finite(p)) {
    msg << name << " manifold has non-finite parameters";
    throw DomainError(msg.str());
  }
  if (p.lambda_soc_ghz <= 0.0) {
    msg << name << " manifold spin-orbit splitting must be positive, got " << p.lambda_soc_ghz;
    throw DomainError(msg.str());
  }
  if (p.quad_q_mhz != 0.0 && nuclear_spin.twice() <= 1) {
    msg << name << " manifold quadrupole coupling requires nuclear spin > 1/2";
    throw DomainError(msg.str());
  }
}

}  // namespace

std::string_view manifold_name(Manifold m) {
  return m == Manifold::ground ? "gnd" : "exc";
}

void EmitterModel::validate() const {
  if (!std::isfinite(strain.alpha_ghz) || !std::isfinite(strain.beta_ghz) ||
      (exc_strain && (!std::isfinite(exc_strain->alpha_ghz) || !std::isfinite(exc_strain->beta_ghz)))) {
    throw DomainError("strain parameters must be finite");
  }
  if (!std::isfinite(g_nuclear) || !std::isfinite(g_electron)) {
    throw DomainError("g factors must be finite");
  }
  validate_manifold(gnd, nuclear_spin, "gnd");
  validate_manifold(exc, nuclear_spin, "exc");
}

static ProductOperators make_product_operators(Spin nuclear_spin) {
  const auto id2 = OperatorMatrix::identity(2);
  const auto idn = OperatorMatrix::identity(nuclear_spin.multiplicity());
  const auto nuc = spin_matrices(nuclear_spin);
  const auto sx = spin_half(0), sy = spin_half(1), sz = spin_half(2);
  const auto px = Pauli::x(), py = Pauli::y(), pz = Pauli::z();

  ProductOperators ops{
      kron({&px, &id2, &idn}), kron({&py, &id2, &idn}), kron({&pz, &id2, &idn}),
      kron({&id2, &sx, &idn}), kron({&id2, &sy, &idn}), kron({&id2, &sz, &idn}),
      kron({&id2, &id2, &nuc.x}), kron({&id2, &id2, &nuc.y}), kron({&id2, &id2, &nuc.z}),
      {}, {}, OperatorMatrix::identity(4 * nuclear_spin.multiplicity())};
  ops.jz = ops.sz + ops.iz;
  const auto jx = ops.sx + ops.ix;
  const auto jy = ops.sy + ops.iy;
  ComplexMatrix jsq = (jx * jx + jy * jy + ops.jz * ops.jz).matrix();
  jsq = 0.5 * (jsq + jsq.adjoint()).eval();
  ops.jsq = OperatorMatrix(std::move(jsq), true);
  return ops;
}

const ProductOperators& product_operators(Spin nuclear_spin) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<ProductOperators>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[nuclear_spin.twice()];
  if (!slot) slot = std::make_unique<ProductOperators>(make_product_operators(nuclear_spin));
  return *slot;
}

OperatorMatrix term_soc(const ManifoldParams& params, Spin nuclear_spin) {
  const auto& ops = product_operators(nuclear_spin);
  // sigma_z^S = 2 Sz.
  return (0.5 * params.lambda_soc_ghz * kMhzPerGhz * 2.0) * (ops.orb_z * ops.sz);
}

OperatorMatrix term_strain(double alpha_ghz, double beta_ghz, Spin nuclear_spin) {
  const auto& ops = product_operators(nuclear_spin);
  return (-alpha_ghz * kMhzPerGhz) * ops.orb_x + (-beta_ghz * kMhzPerGhz) * ops.orb_y;
}

OperatorMatrix term_zeeman(const EmitterModel& emitter, Manifold manifold, const FieldVector& b) {
  const auto& ops = product_operators(emitter.nuclear_spin);
  const double mu_b = PhysicalConstants::mu_b_over_h;
  const double ge = emitter.g_electron * mu_b;
  const double gn = emitter.g_nuclear * PhysicalConstants::mu_n_over_h;
  auto h = (ge * b.x()) * ops.sx + (ge * b.y()) * ops.sy + (ge * b.z()) * ops.sz;
  h += (emitter.params(manifold).q_orb * mu_b * b.z()) * ops.orb_z;
  if (emitter.nuclear_spin.twice() > 0) {
    h += (gn * b.x()) * ops.ix + (gn * b.y()) * ops.iy + (gn * b.z()) * ops.iz;
  }
  return OperatorMatrix(h.matrix(), true);
}

OperatorMatrix term_hyperfine(const ManifoldParams& params, Spin nuclear_spin) {
  const auto& ops = product_operators(nuclear_spin);
  if (nuclear_spin.twice() == 0) return OperatorMatrix::zero(ops.identity.dim());
  const auto h = a_perp(params) * (ops.sx * ops.ix + ops.sy * ops.iy) + a_parallel(params) * (ops.sz * ops.iz);
  return OperatorMatrix(h.matrix(), true);
}

OperatorMatrix term_quadrupole(const ManifoldParams& params, Spin nuclear_spin) {
  const auto& ops = product_operators(nuclear_spin);
  if (nuclear_spin.twice() <= 1) return OperatorMatrix::zero(ops.identity.dim());
  const auto h = params.quad_q_mhz * (ops.iz * ops.iz - nuclear_spin.casimir() / 3.0 * ops.identity);
  return OperatorMatrix(h.matrix(), true);
}

OperatorMatrix term_ioc(const ManifoldParams& params, Spin nuclear_spin) {
  const auto& ops = product_operators(nuclear_spin);
  return OperatorMatrix((0.5 * params.ioc_upsilon_mhz * (ops.orb_z * ops.iz)).matrix(), true);
}

OperatorMatrix build_hamiltonian(const EmitterModel& emitter, Manifold manifold, const FieldVector& b) {
  emitter.validate();
  if (!b.allFinite()) throw DomainError("magnetic field must be finite");
  const auto& p = emitter.params(manifold);
  const Spin i = emitter.nuclear_spin;
  const Strain s = emitter.strain_for(manifold);
  ComplexMatrix h = term_soc(p, i).matrix();
  h += term_strain(s.alpha_ghz, s.beta_ghz, i).matrix();
  h += term_zeeman(emitter, manifold, b).matrix();
  h += term_hyperfine(p, i).matrix();
  h += term_quadrupole(p, i).matrix();
  h += term_ioc(p, i).matrix();
  h = 0.5 * (h + h.adjoint()).eval();
  return OperatorMatrix(std::move(h), true);
}

double a_parallel(const ManifoldParams& params) { return params.a_fc_mhz + params.a_dd_mhz; }

double a_perp(const ManifoldParams& params) { return params.a_fc_mhz - 2.0 * params.a_dd_mhz; }

double a_ple(const EmitterModel& emitter) {
  return 0.5 * (a_parallel(emitter.exc) - a_parallel(emitter.gnd));
}

ManifoldParams jt_shifted_params(const ManifoldParams& params, double delta_fc_mhz, double delta_dd_mhz) {
  ManifoldParams out = params;
  out.a_fc_mhz += delta_fc_mhz;
  out.a_dd_mhz += delta_dd_mhz;
  return out;
}

EmitterModel with_hyperfine_scale(const EmitterModel& emitter, double scale) {
  EmitterModel out = emitter;
  for (auto* p : {&out.gnd, &out.exc}) {
    p->a_fc_mhz *= scale;
    p->a_dd_mhz *= scale;
  }
  return out;
}

EmitterModel without_nuclear_couplings(const EmitterModel& emitter) {
  EmitterModel out = emitter;
  for (auto* p : {&out.gnd, &out.exc}) {
    p->a_fc_mhz = 0.0;
    p->a_dd_mhz = 0.0;
    p->quad_q_mhz = 0.0;
    p->ioc_upsilon_mhz = 0.0;
  }
  return out;
}

}  // namespace hfspec
