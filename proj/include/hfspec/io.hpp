#pragma once

// File formats: emitter JSON, spectrum/map/sweep CSV, fit and diagram JSON,
// and the seeded synthetic dataset generator.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hfspec/analysis.hpp"
#include "hfspec/hamiltonian.hpp"
#include "hfspec/spectrum.hpp"

namespace hfspec::io {

inline constexpr std::string_view kSchemaVersion = "1";

// Shortest round-trip-safe text with 9 significant digits, locale independent.
std::string format_number(double v);
// The value as it reads back after format_number.
double printed_value(double v);

// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// Locale-independent parse of one finite number; ParseError otherwise.
double parse_number(std::string_view text);

// Grid spec "min:max:step" in MHz.
std::vector<double> parse_grid(std::string_view spec);
// Comma-separated field vector "bx,by,bz" in Tesla, or a single number for an axial field.
FieldVector parse_field(std::string_view spec);

// Existing file path, or a registry label.
EmitterModel load_emitter(std::string_view path_or_label);
EmitterModel parse_emitter_json(std::string_view text);
std::string emitter_to_json(const EmitterModel& emitter);

struct MeasuredTrace {
  SpectrumTrace trace;
  std::string source;
  std::string emitter_id;
};

// Header `freq_mhz,intensity`, at least three rows, strictly increasing
// frequencies, finite values. Errors carry the 1-based line number.
MeasuredTrace ingest_csv(const std::filesystem::path& path);
MeasuredTrace parse_spectrum_csv(std::string_view text, std::string source = {});

// Header `b_tesla,freq_mhz,intensity`, field-outer order, one shared grid.
SpectralMap parse_map_csv(std::string_view text, const FieldVector& direction);
SpectralMap ingest_map_csv(const std::filesystem::path& path, const FieldVector& direction);

std::string spectrum_csv(const SpectrumTrace& trace);
std::string map_csv(const SpectralMap& map);
std::string level_sweep_csv(const LevelSweep& sweep);
std::string diagram_json(const TransitionDiagram& diagram);
std::string fit_report_json(const FitResult& fit);
std::string ensemble_json(const EnsembleStats& stats);
// JSON array of fit reports, each tagged with its trace label.
std::string batch_report_json(std::span<const FitResult> fits, std::span<const std::string> labels);

struct BatchRow {
  std::string label;
  std::string model;
  double a_ple_abs_mhz = 0.0;
  double delta_mhz = 0.0;
  double fwhm_mhz = 0.0;
  double residual_rms = 0.0;
};

std::string batch_summary_csv(std::span<const BatchRow> rows);
std::vector<BatchRow> parse_batch_summary_csv(std::string_view text);

struct SynthTruth {
  double a_ple_mhz = 0.0;  // target optical spacing; 0 keeps the emitter's own
  double strain_alpha_ghz = 0.0;
  double fwhm_mhz = 100.0;
  FieldVector b_tesla = FieldVector::Zero();
};

struct SynthJitter {
  double a_ple_sd_mhz = 0.0;
  double strain_alpha_sd_ghz = 0.0;
  double fwhm_sd_mhz = 0.0;
};

struct SynthConfig {
  EmitterModel emitter;
  SynthTruth truth;
  SynthJitter jitter;
  double noise_sigma = 0.0;  // additive Gaussian noise, fraction of the trace peak
  std::uint64_t seed = 0;
  std::size_t n_emitters = 1;
  std::vector<double> grid;
  std::filesystem::path out_dir;
  std::string prefix = "emitter";
};

struct SynthRecord {
  std::string id;
  std::string file;
  std::uint64_t seed = 0;
  double a_ple_mhz = 0.0;
  double strain_alpha_ghz = 0.0;
  double fwhm_mhz = 0.0;
};

// Peak-normalized traces, noise added after normalization.
struct SynthTrace {
  SynthRecord record;
  SpectrumTrace trace;
};

// Generates traces in memory; the same config always yields the same traces.
std::vector<SynthTrace> synth_traces(const SynthConfig& config);
// Writes one CSV per emitter plus truth.json into out_dir.
std::vector<SynthRecord> synth_dataset(const SynthConfig& config);

// Deterministic 64-bit mixing used to derive per-job seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace hfspec::io
