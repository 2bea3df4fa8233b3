#include <algorithm>
#include <cstdio>
#include <random>

#include <json.hpp>

#include "hfspec/errors.hpp"
#include "hfspec/io.hpp"

namespace hfspec::io {

std::vector<SynthTrace> synth_traces(const SynthConfig& config) {
  if (!(config.noise_sigma >= 0.0)) throw DomainError("noise sigma must be non-negative");
  if (config.grid.empty()) throw DomainError("synthetic dataset needs a frequency grid");
  config.emitter.validate();
  const double base_aple = a_ple(config.emitter);
  const double target = config.truth.a_ple_mhz != 0.0 ? config.truth.a_ple_mhz : base_aple;
  if (base_aple == 0.0 && target != 0.0) throw DomainError("cannot impose an optical spacing on a spin-0 emitter");

  std::vector<SynthTrace> out;
  for (std::size_t k = 0; k < config.n_emitters; ++k) {
    const std::uint64_t seed = splitmix64(config.seed + k);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double a = target + config.jitter.a_ple_sd_mhz * normal(rng);
    const double alpha = config.truth.strain_alpha_ghz + config.jitter.strain_alpha_sd_ghz * normal(rng);
    const double fwhm =
        std::max(config.truth.fwhm_mhz + config.jitter.fwhm_sd_mhz * normal(rng), 1e-3 * config.truth.fwhm_mhz);

    EmitterModel m = base_aple == 0.0 ? config.emitter : with_hyperfine_scale(config.emitter, a / base_aple);
    m.strain.alpha_ghz = alpha;
    m.exc_strain.reset();
    auto trace = synth_spectrum(transitions(m, config.truth.b_tesla), fwhm, config.grid);
    const double peak = *std::max_element(trace.signal.begin(), trace.signal.end());
    for (auto& v : trace.signal) {
      v = peak > 0.0 ? v / peak : v;
      v += config.noise_sigma * normal(rng);
    }
    char id[64];
    std::snprintf(id, sizeof id, "%s_%03zu", config.prefix.c_str(), k);
    trace.label = id;
    trace.b_tesla = config.truth.b_tesla;
    trace.strain = m.strain;
    SynthRecord rec{id, std::string(id) + ".csv", seed, base_aple == 0.0 ? 0.0 : a, alpha, fwhm};
    out.push_back({std::move(rec), std::move(trace)});
  }
  return out;
}

std::vector<SynthRecord> synth_dataset(const SynthConfig& config) {
  const auto traces = synth_traces(config);
  nlohmann::ordered_json emitters = nlohmann::ordered_json::array();
  std::vector<SynthRecord> records;
  for (const auto& t : traces) {
    write_file_atomic(config.out_dir / t.record.file, spectrum_csv(t.trace));
    emitters.push_back({{"id", t.record.id},
                        {"file", t.record.file},
                        {"seed", t.record.seed},
                        {"a_ple_mhz", printed_value(t.record.a_ple_mhz)},
                        {"strain_alpha_ghz", printed_value(t.record.strain_alpha_ghz)},
                        {"fwhm_mhz", printed_value(t.record.fwhm_mhz)}});
    records.push_back(t.record);
  }
  nlohmann::ordered_json truth{{"schema_version", std::string(kSchemaVersion)},
                               {"isotope", config.emitter.isotope_label},
                               {"seed", config.seed},
                               {"noise_sigma", printed_value(config.noise_sigma)},
                               {"b_tesla", {config.truth.b_tesla.x(), config.truth.b_tesla.y(), config.truth.b_tesla.z()}},
                               {"emitters", std::move(emitters)}};
  write_file_atomic(config.out_dir / "truth.json", truth.dump(2) + "\n");
  return records;
}

}  // namespace hfspec::io
