#include <algorithm>
#include <array>
#include <sstream>

#include "hfspec/errors.hpp"
#include "hfspec/hamiltonian.hpp"

namespace hfspec {

namespace {

struct Entry {
  std::string_view label;
  int twice_spin;
  double g_nuclear;
  double fc_gnd, dd_gnd, fc_exc, dd_exc;
  double lambda_gnd_ghz, lambda_exc_ghz;
};

// Hyperfine couplings from first-principles estimates, MHz. Spin-orbit
// splittings are literature-typical values per element, GHz.
constexpr std::array<Entry, 9> kEntries{{
    {"28Si", 0, 0.0, 0.0, 0.0, 0.0, 0.0, 46.0, 250.0},
    {"29Si", 1, -1.110, 64.20, -2.34, -30.68, 32.57, 46.0, 250.0},
    {"73Ge", 9, -0.195, 48.23, -1.35, 5.03, 14.30, 170.0, 980.0},
    {"74Ge", 0, 0.0, 0.0, 0.0, 0.0, 0.0, 170.0, 980.0},
    {"115Sn", 1, -1.836, 1275.04, -24.47, 386.74, 230.43, 850.0, 3000.0},
    {"117Sn", 1, -2.000, 1389.09, -26.65, 421.34, 251.05, 850.0, 3000.0},
    {"118Sn", 0, 0.0, 0.0, 0.0, 0.0, 0.0, 850.0, 3000.0},
    {"119Sn", 1, -2.092, 1453.27, -27.89, 440.80, 262.65, 850.0, 3000.0},
    {"120Sn", 0, 0.0, 0.0, 0.0, 0.0, 0.0, 850.0, 3000.0},
}};

constexpr double kDefaultQ = 0.1;

struct Measured {
  std::string_view label;
  MeasuredAple value;
};

constexpr std::array<Measured, 3> kMeasured{{
    {"73Ge", {-12.5, 0.5}},
    {"117Sn", {-445.0, 9.0}},
    {"119Sn", {-484.0, 8.0}},
}};

const Entry* find(std::string_view label) {
  auto it = std::find_if(kEntries.begin(), kEntries.end(), [&](const Entry& e) { return e.label == label; });
  return it == kEntries.end() ? nullptr : &*it;
}

}  // namespace

EmitterModel registry_lookup(std::string_view isotope_label) {
  const Entry* e = find(isotope_label);
  if (e == nullptr) {
    std::ostringstream msg;
    msg << "unknown isotope '" << isotope_label << "'; known:";
    for (const auto& k : kEntries) msg << ' ' << k.label;
    throw LookupError(msg.str());
  }
  EmitterModel m;
  m.isotope_label = std::string(e->label);
  m.nuclear_spin = Spin::from_twice(e->twice_spin);
  m.g_nuclear = e->g_nuclear;
  m.gnd = {e->lambda_gnd_ghz, kDefaultQ, e->fc_gnd, e->dd_gnd, 0.0, 0.0};
  m.exc = {e->lambda_exc_ghz, kDefaultQ, e->fc_exc, e->dd_exc, 0.0, 0.0};
  return m;
}

std::vector<std::string> registry_labels() {
  std::vector<std::string> out;
  for (const auto& e : kEntries) out.emplace_back(e.label);
  return out;
}

bool registry_contains(std::string_view isotope_label) { return find(isotope_label) != nullptr; }

std::optional<MeasuredAple> measured_a_ple(std::string_view isotope_label) {
  for (const auto& m : kMeasured) {
    if (m.label == isotope_label) return m.value;
  }
  return std::nullopt;
}

}  // namespace hfspec
