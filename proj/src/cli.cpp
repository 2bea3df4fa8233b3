#include "hfspec/cli.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hfspec/analysis.hpp"
#include "hfspec/errors.hpp"
#include "hfspec/io.hpp"
#include "hfspec/spectrum.hpp"

namespace hfspec {

namespace {

struct Sink {
  std::ostream& out;
  void emit(const std::string& path, const std::string& text) const {
    if (path.empty() || path == "-") {
      out << text;
    } else {
      io::write_file_atomic(path, text);
    }
  }
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(io::parse_number(item));
  }
  return out;
}

std::vector<double> parse_axis(const std::string& spec) {
  if (spec.find(':') != std::string::npos) return io::parse_grid(spec);
  return parse_list(spec);
}

struct CommonEmitter {
  std::string emitter;
  std::optional<double> alpha;
  std::optional<double> beta;

  void add(CLI::App* app) {
    app->add_option("emitter", emitter, "Isotope label or emitter JSON file")->required();
    app->add_option("--alpha", alpha, "Strain alpha override, GHz");
    app->add_option("--beta", beta, "Strain beta override, GHz");
  }
  EmitterModel load() const {
    auto m = io::load_emitter(emitter);
    if (alpha) m.strain.alpha_ghz = *alpha;
    if (beta) m.strain.beta_ghz = *beta;
    m.validate();
    return m;
  }
};

std::string describe_aple(const EmitterModel& m) {
  std::string s = "isotope: " + m.isotope_label + "\n";
  s += "a_ple_mhz: " + io::format_number(a_ple(m)) + "\n";
  for (auto manifold : {Manifold::ground, Manifold::excited}) {
    const auto& p = m.params(manifold);
    const std::string name(manifold_name(manifold));
    s += name + "_a_par_mhz: " + io::format_number(a_parallel(p)) + "\n";
    s += name + "_a_perp_mhz: " + io::format_number(a_perp(p)) + "\n";
  }
  return s;
}

io::BatchRow batch_row(const std::string& label, const FitResult& fit) {
  io::BatchRow row{label, fit.model, 0.0, 0.0, 0.0, fit.residual_rms};
  if (fit.has("a_ple")) row.a_ple_abs_mhz = std::abs(fit.param("a_ple"));
  if (fit.has("delta")) row.delta_mhz = fit.param("delta");
  if (fit.has("fwhm")) row.fwhm_mhz = fit.param("fwhm");
  return row;
}

std::vector<double> read_centers(const std::string& path) {
  std::istringstream in(io::read_file(path));
  std::vector<double> values;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (n == 1 && !(std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-' || line[0] == '+' ||
                    line[0] == '.')) {
      continue;
    }
    try {
      values.push_back(io::parse_number(line));
    } catch (const ParseError&) {
      throw ParseError(path + ":" + std::to_string(n) + ": cannot parse '" + line + "'", n);
    }
  }
  if (values.empty()) throw ParseError(path + ": no values");
  return values;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperfine spectra of group-IV color centers in diamond", "hfspec"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");
  Sink sink{out};

  // simulate
  CommonEmitter sim_em;
  std::string sim_b = "0", sim_grid, sim_out, sim_diagram;
  double sim_fwhm = 0.0;
  auto* sim = app.add_subcommand("simulate", "Broadened C-line spectrum at one field");
  sim_em.add(sim);
  sim->add_option("--b", sim_b, "Field in Tesla: bz or bx,by,bz")->capture_default_str();
  sim->add_option("--fwhm", sim_fwhm, "Lorentzian FWHM, MHz")->required();
  sim->add_option("--grid", sim_grid, "Frequency grid min:max:step, MHz")->required();
  sim->add_option("--out,-o", sim_out, "Spectrum CSV path (default stdout)");
  sim->add_option("--diagram", sim_diagram, "Also write the transition diagram JSON here");

  // sweep-strain
  CommonEmitter ss_em;
  std::string ss_manifold = "gnd", ss_axis, ss_out;
  auto* ss = app.add_subcommand("sweep-strain", "Lower-branch levels versus strain");
  ss_em.add(ss);
  ss->add_option("--manifold", ss_manifold, "gnd or exc")->check(CLI::IsMember({"gnd", "exc"}))->capture_default_str();
  ss->add_option("--alpha-range", ss_axis, "Strain axis min:max:step or list, GHz")->required();
  ss->add_option("--out,-o", ss_out, "Level sweep CSV path (default stdout)");

  // sweep-field
  CommonEmitter sf_em;
  std::string sf_dir = "0,0,1", sf_b, sf_grid, sf_out;
  double sf_fwhm = 0.0;
  double sf_theta = -1.0;
  auto* sf = app.add_subcommand("sweep-field", "Spectral map versus field magnitude");
  sf_em.add(sf);
  sf->add_option("--direction", sf_dir, "Field direction bx,by,bz (normalized)")->capture_default_str();
  sf->add_option("--theta-deg", sf_theta, "Polar angle from the symmetry axis, azimuth 0 (overrides --direction)");
  sf->add_option("--b-range", sf_b, "Field magnitudes min:max:step or list, Tesla")->required();
  sf->add_option("--fwhm", sf_fwhm, "Lorentzian FWHM, MHz")->required();
  sf->add_option("--grid", sf_grid, "Frequency grid min:max:step, MHz")->required();
  sf->add_option("--out,-o", sf_out, "Map CSV path (default stdout)");

  // aple
  CommonEmitter ap_em;
  auto* ap = app.add_subcommand("aple", "Optical hyperfine spacing and A_par/A_perp per manifold");
  ap_em.add(ap);

  // fit
  std::vector<std::string> fit_inputs;
  std::string fit_model = "auto", fit_out, fit_summary, fit_emitter, fit_free = "a_ple_scale,fwhm,amplitude",
              fit_dir = "0,0,1", fit_init;
  double fit_theta = -1.0, fit_fwhm0 = 100.0, fit_amp0 = 1.0, fit_scale0 = 1.0;
  std::optional<double> fit_alpha0;
  bool fit_map = false;
  std::uint64_t fit_seed = 0;
  auto* ft = app.add_subcommand("fit", "Fit Lorentzian or full-model spectra");
  ft->add_option("traces", fit_inputs, "Spectrum CSV files (or one map CSV with --map)")->required();
  ft->add_option("--model", fit_model, "single, triplet, full or auto")
      ->check(CLI::IsMember({"single", "triplet", "full", "auto"}))
      ->capture_default_str();
  ft->add_option("--init", fit_init, "Comma-separated starting parameters");
  ft->add_option("--emitter", fit_emitter, "Emitter for the full model");
  ft->add_option("--free", fit_free, "Freed full-model parameters")->capture_default_str();
  ft->add_flag("--map", fit_map, "Input is a b_tesla,freq_mhz,intensity map");
  ft->add_option("--direction", fit_dir, "Map field direction")->capture_default_str();
  ft->add_option("--theta-deg", fit_theta, "Map polar angle, azimuth 0 (overrides --direction)");
  ft->add_option("--fwhm0", fit_fwhm0, "Full-model starting FWHM, MHz")->capture_default_str();
  ft->add_option("--amplitude0", fit_amp0, "Full-model starting amplitude")->capture_default_str();
  ft->add_option("--scale0", fit_scale0, "Full-model starting hyperfine scale")->capture_default_str();
  ft->add_option("--alpha0", fit_alpha0, "Full-model starting strain, GHz");
  ft->add_option("--seed", fit_seed, "Seed echoed into the report")->capture_default_str();
  ft->add_option("--out,-o", fit_out, "Fit report JSON path (default stdout)");
  ft->add_option("--summary", fit_summary, "Batch CSV summary path");

  // fit-pl
  std::vector<std::string> pl_traces;
  std::string pl_centers, pl_out, pl_report;
  double pl_bw = 0.0;
  auto* pl = app.add_subcommand("fit-pl", "Gaussian ZPL fits and kernel density of centers");
  pl->add_option("--traces", pl_traces, "PL spectrum CSV files to fit with a Gaussian");
  pl->add_option("--centers", pl_centers, "File with one center value per line");
  pl->add_option("--bandwidth", pl_bw, "KDE bandwidth in the units of the centers")->required();
  pl->add_option("--out,-o", pl_out, "KDE CSV path (default stdout)");
  pl->add_option("--report", pl_report, "Gaussian fit reports JSON path");

  // stats
  std::string st_summary, st_group2, st_column = "a_ple_abs_mhz", st_out, st_contingency;
  double st_bin = 10.0;
  bool st_dft = false;
  auto* st = app.add_subcommand("stats", "Ensemble statistics, chi-squared test and DFT comparison");
  st->add_option("--summary", st_summary, "Batch summary CSV (spin-active group)");
  st->add_option("--group2", st_group2, "Second batch summary CSV (spin-neutral group)");
  st->add_option("--column", st_column, "Summary column for the ensemble")
      ->check(CLI::IsMember({"a_ple_abs_mhz", "delta_mhz", "fwhm_mhz", "residual_rms"}))
      ->capture_default_str();
  st->add_option("--bin-width", st_bin, "Histogram bin width")->capture_default_str();
  st->add_option("--contingency", st_contingency, "Counts active_with,active_without,neutral_with,neutral_without");
  st->add_flag("--dft", st_dft, "Compare registry A_PLE against measured values");
  st->add_option("--out,-o", st_out, "Stats JSON path (default stdout)");

  // synth
  CommonEmitter sy_em;
  std::string sy_dir, sy_grid, sy_b = "0";
  std::size_t sy_n = 1;
  std::uint64_t sy_seed = 0;
  double sy_noise = 0.0, sy_fwhm = 100.0, sy_aple = 0.0, sy_ja = 0.0, sy_jalpha = 0.0, sy_jfwhm = 0.0;
  auto* sy = app.add_subcommand("synth", "Seeded synthetic spectra with a truth table");
  sy_em.add(sy);
  sy->add_option("--out-dir", sy_dir, "Output directory")->required();
  sy->add_option("--grid", sy_grid, "Frequency grid min:max:step, MHz")->required();
  sy->add_option("--n", sy_n, "Number of emitters")->capture_default_str();
  sy->add_option("--seed", sy_seed, "Base seed")->capture_default_str();
  sy->add_option("--noise", sy_noise, "Noise sigma as a fraction of the peak")->capture_default_str();
  sy->add_option("--fwhm", sy_fwhm, "Lorentzian FWHM, MHz")->capture_default_str();
  sy->add_option("--a-ple", sy_aple, "Target A_PLE, MHz (0 keeps the emitter's)")->capture_default_str();
  sy->add_option("--b", sy_b, "Field in Tesla: bz or bx,by,bz")->capture_default_str();
  sy->add_option("--jitter-a-ple", sy_ja, "A_PLE jitter s.d., MHz")->capture_default_str();
  sy->add_option("--jitter-alpha", sy_jalpha, "Strain jitter s.d., GHz")->capture_default_str();
  sy->add_option("--jitter-fwhm", sy_jfwhm, "FWHM jitter s.d., MHz")->capture_default_str();

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("hfspec");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  auto direction_from = [](const std::string& dir, double theta) -> FieldVector {
    if (theta >= 0.0) {
      const double t = theta * std::numbers::pi / 180.0;
      return {std::sin(t), 0.0, std::cos(t)};
    }
    FieldVector d = io::parse_field(dir);
    if (d.norm() == 0.0) throw DomainError("field direction is zero");
    return d.normalized();
  };

  try {
    if (sim->parsed()) {
      const auto m = sim_em.load();
      const auto grid = io::parse_grid(sim_grid);
      const auto b = io::parse_field(sim_b);
      const auto table = transitions(m, b);
      auto trace = synth_spectrum(table, sim_fwhm, grid);
      sink.emit(sim_out, io::spectrum_csv(trace));
      if (!sim_diagram.empty()) {
        io::write_file_atomic(sim_diagram,
                              io::diagram_json({table.gnd_levels_mhz, table.exc_levels_mhz, table.lines}));
      }
      return kExitOk;
    }
    if (ss->parsed()) {
      const auto m = ss_em.load();
      const auto axis = parse_axis(ss_axis);
      const auto sweep = sweep_strain(m, ss_manifold == "gnd" ? Manifold::ground : Manifold::excited, axis);
      sink.emit(ss_out, io::level_sweep_csv(sweep));
      return kExitOk;
    }
    if (sf->parsed()) {
      const auto m = sf_em.load();
      const auto map = sweep_field(m, direction_from(sf_dir, sf_theta), parse_axis(sf_b), sf_fwhm,
                                   io::parse_grid(sf_grid));
      sink.emit(sf_out, io::map_csv(map));
      return kExitOk;
    }
    if (ap->parsed()) {
      out << describe_aple(ap_em.load());
      return kExitOk;
    }
    if (ft->parsed()) {
      std::optional<std::vector<double>> init;
      if (!fit_init.empty()) init = parse_list(fit_init);
      std::vector<FitResult> fits;
      std::vector<std::string> labels;
      if (fit_model == "full") {
        if (fit_emitter.empty()) throw PreconditionError("--emitter is required for the full model");
        FullModelConfig cfg;
        cfg.emitter = io::load_emitter(fit_emitter);
        if (fit_alpha0) cfg.emitter.strain.alpha_ghz = *fit_alpha0;
        std::stringstream ss_free(fit_free);
        for (std::string item; std::getline(ss_free, item, ',');) cfg.free.push_back(parse_free_param(item));
        cfg.fwhm_mhz = fit_fwhm0;
        cfg.amplitude = fit_amp0;
        cfg.a_ple_scale = fit_scale0;
        for (const auto& path : fit_inputs) {
          SpectralMap map;
          if (fit_map) {
            map = io::ingest_map_csv(path, direction_from(fit_dir, fit_theta));
          } else {
            auto t = io::ingest_csv(path).trace;
            map.rows = {t};
            map.b_tesla = {0.0};
            map.freq_mhz = t.freq_mhz;
          }
          fits.push_back(fit_full_model(map, cfg));
          labels.push_back(std::filesystem::path(path).stem().string());
        }
      } else {
        if (fit_map) throw PreconditionError("--map requires --model full");
        for (const auto& path : fit_inputs) {
          const auto measured = io::ingest_csv(path);
          FitResult fit;
          if (fit_model == "single") {
            fit = fit_lorentzians(measured.trace, LorentzModel::single, init);
          } else if (fit_model == "triplet") {
            fit = fit_lorentzians(measured.trace, LorentzModel::triplet211, init);
          } else {
            const auto a = fit_lorentzians(measured.trace, LorentzModel::single);
            const auto b = fit_lorentzians(measured.trace, LorentzModel::triplet211);
            fit = bic(b) < bic(a) ? b : a;
          }
          fits.push_back(std::move(fit));
          labels.push_back(measured.emitter_id);
        }
      }
      bool all_converged = true;
      for (auto& f : fits) {
        f.seed = fit_seed;
        all_converged = all_converged && f.converged;
      }
      if (fits.size() == 1) {
        sink.emit(fit_out, io::fit_report_json(fits.front()));
      } else {
        sink.emit(fit_out, io::batch_report_json(fits, labels));
      }
      if (!fit_summary.empty()) {
        std::vector<io::BatchRow> rows;
        for (std::size_t k = 0; k < fits.size(); ++k) rows.push_back(batch_row(labels[k], fits[k]));
        io::write_file_atomic(fit_summary, io::batch_summary_csv(rows));
      }
      if (!all_converged) {
        err << "warning: at least one fit did not converge\n";
        return kExitNotConverged;
      }
      return kExitOk;
    }
    if (pl->parsed()) {
      std::vector<double> centers;
      std::vector<FitResult> fits;
      std::vector<std::string> labels;
      for (const auto& path : pl_traces) {
        const auto measured = io::ingest_csv(path);
        fits.push_back(fit_gaussian(measured.trace));
        labels.push_back(measured.emitter_id);
        centers.push_back(fits.back().param("center"));
      }
      if (!pl_centers.empty()) {
        const auto more = read_centers(pl_centers);
        centers.insert(centers.end(), more.begin(), more.end());
      }
      if (centers.empty()) throw PreconditionError("fit-pl needs --traces or --centers");
      const auto density = kde(centers, pl_bw);
      std::string csv = "x,density\n";
      for (std::size_t k = 0; k < density.x.size(); ++k) {
        csv += io::format_number(density.x[k]) + ',' + io::format_number(density.density[k]) + '\n';
      }
      sink.emit(pl_out, csv);
      if (!pl_report.empty()) io::write_file_atomic(pl_report, io::batch_report_json(fits, labels));
      bool ok = true;
      for (const auto& f : fits) ok = ok && f.converged;
      return ok ? kExitOk : kExitNotConverged;
    }
    if (st->parsed()) {
      nlohmann::ordered_json doc{{"schema_version", std::string(io::kSchemaVersion)}};
      auto column = [&](const std::vector<io::BatchRow>& rows) {
        std::vector<double> v;
        for (const auto& r : rows) {
          if (st_column == "a_ple_abs_mhz") v.push_back(r.a_ple_abs_mhz);
          if (st_column == "delta_mhz") v.push_back(r.delta_mhz);
          if (st_column == "fwhm_mhz") v.push_back(r.fwhm_mhz);
          if (st_column == "residual_rms") v.push_back(r.residual_rms);
        }
        return v;
      };
      std::optional<ContingencyTable2x2> table;
      if (!st_summary.empty()) {
        const auto rows = io::parse_batch_summary_csv(io::read_file(st_summary));
        const auto values = column(rows);
        doc["column"] = st_column;
        doc["ensemble"] = nlohmann::ordered_json::parse(io::ensemble_json(ensemble_stats(values, st_bin)));
        if (!st_group2.empty()) {
          const auto rows2 = io::parse_batch_summary_csv(io::read_file(st_group2));
          doc["ensemble_group2"] =
              nlohmann::ordered_json::parse(io::ensemble_json(ensemble_stats(column(rows2), st_bin)));
          auto count = [](const std::vector<io::BatchRow>& rs, bool with) {
            long n = 0;
            for (const auto& r : rs) n += ((r.model == "triplet211") == with) ? 1 : 0;
            return n;
          };
          table = ContingencyTable2x2{count(rows, true), count(rows, false), count(rows2, true), count(rows2, false)};
        }
      }
      if (!st_contingency.empty()) {
        const auto c = parse_list(st_contingency);
        if (c.size() != 4) throw ParseError("--contingency needs four counts");
        for (double v : c) {
          if (v < 0.0 || v != std::floor(v)) throw ParseError("--contingency counts must be non-negative integers");
        }
        table = ContingencyTable2x2{static_cast<long>(c[0]), static_cast<long>(c[1]), static_cast<long>(c[2]),
                                    static_cast<long>(c[3])};
      }
      if (table) {
        const auto r = chi2_independence(*table);
        doc["chi2"] = {{"variant", r.variant},
                       {"counts", {table->active_with, table->active_without, table->neutral_with, table->neutral_without}},
                       {"chi2", io::printed_value(r.chi2)},
                       {"dof", r.dof},
                       {"p_value", r.p_value}};
      }
      if (st_dft) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& label : registry_labels()) {
          const auto measured = measured_a_ple(label);
          if (!measured) continue;
          const double dft = a_ple(registry_lookup(label));
          rows.push_back({{"isotope", label},
                          {"a_ple_dft_mhz", io::printed_value(dft)},
                          {"a_ple_measured_mhz", io::printed_value(measured->value_mhz)},
                          {"discrepancy_percent", io::printed_value(dft_discrepancy_percent(measured->value_mhz, dft))}});
        }
        doc["dft_comparison"] = std::move(rows);
      }
      if (doc.size() == 1) throw PreconditionError("stats needs --summary, --contingency or --dft");
      sink.emit(st_out, doc.dump(2) + "\n");
      return kExitOk;
    }
    if (sy->parsed()) {
      io::SynthConfig cfg;
      cfg.emitter = sy_em.load();
      cfg.truth.a_ple_mhz = sy_aple;
      cfg.truth.strain_alpha_ghz = cfg.emitter.strain.alpha_ghz;
      cfg.truth.fwhm_mhz = sy_fwhm;
      cfg.truth.b_tesla = io::parse_field(sy_b);
      cfg.jitter = {sy_ja, sy_jalpha, sy_jfwhm};
      cfg.noise_sigma = sy_noise;
      cfg.seed = sy_seed;
      cfg.n_emitters = sy_n;
      cfg.grid = io::parse_grid(sy_grid);
      cfg.out_dir = sy_dir;
      const auto records = io::synth_dataset(cfg);
      out << "wrote " << records.size() << " traces and truth.json to " << sy_dir << " (seed " << sy_seed << ")\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  err << app.help();
  return kExitValidation;
}

}  // namespace hfspec
