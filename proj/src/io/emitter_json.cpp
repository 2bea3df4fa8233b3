#include <algorithm>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "hfspec/errors.hpp"
#include "hfspec/io.hpp"

namespace hfspec::io {

namespace {

using Json = nlohmann::ordered_json;

const std::set<std::string> kTopKeys{"schema_version", "isotope",         "nuclear_spin",    "g_nuclear",
                                     "g_electron",     "strain_alpha_ghz", "strain_beta_ghz", "gnd",
                                     "exc"};
const std::set<std::string> kManifoldKeys{"lambda_ghz", "q", "a_fc_mhz", "a_dd_mhz", "quad_q_mhz", "ioc_upsilon_mhz"};

// Rounded to the printed precision so dumps show 9 significant digits.
double printable(double v) { return printed_value(v); }

double number_at(const Json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ParseError("key '" + path + key + "' must be a number");
  return v.get<double>();
}

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& path) {
  if (!obj.is_object()) throw ParseError("'" + (path.empty() ? std::string("document") : path) + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) throw ParseError("unknown key '" + path + key + "'");
  }
}

void read_manifold(const Json& obj, const std::string& name, ManifoldParams& p, bool lambda_required) {
  const std::string path = name + ".";
  check_keys(obj, kManifoldKeys, path);
  if (lambda_required && !obj.contains("lambda_ghz")) throw ParseError("missing key '" + path + "lambda_ghz'");
  if (obj.contains("lambda_ghz")) p.lambda_soc_ghz = number_at(obj, "lambda_ghz", path);
  if (obj.contains("q")) p.q_orb = number_at(obj, "q", path);
  if (obj.contains("a_fc_mhz")) p.a_fc_mhz = number_at(obj, "a_fc_mhz", path);
  if (obj.contains("a_dd_mhz")) p.a_dd_mhz = number_at(obj, "a_dd_mhz", path);
  if (obj.contains("quad_q_mhz")) p.quad_q_mhz = number_at(obj, "quad_q_mhz", path);
  if (obj.contains("ioc_upsilon_mhz")) p.ioc_upsilon_mhz = number_at(obj, "ioc_upsilon_mhz", path);
}

Json manifold_json(const ManifoldParams& p) {
  return Json{{"lambda_ghz", printable(p.lambda_soc_ghz)}, {"q", printable(p.q_orb)},
              {"a_fc_mhz", printable(p.a_fc_mhz)},       {"a_dd_mhz", printable(p.a_dd_mhz)},
              {"quad_q_mhz", printable(p.quad_q_mhz)},   {"ioc_upsilon_mhz", printable(p.ioc_upsilon_mhz)}};
}

Json line_json(const TransitionLine& l) {
  return Json{{"freq_mhz", printable(l.freq_mhz)}, {"intensity", printable(l.intensity)},
              {"gnd_index", l.gnd_index},          {"exc_index", l.exc_index},
              {"jsq_gnd", printable(l.jsq_gnd)},   {"jsq_exc", printable(l.jsq_exc)}};
}

Json number_array(std::span<const double> values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(printable(v));
  return arr;
}

}  // namespace

EmitterModel parse_emitter_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed emitter JSON: ") + e.what());
  }
  check_keys(doc, kTopKeys, "");
  if (doc.contains("schema_version") && doc["schema_version"] != std::string(kSchemaVersion)) {
    throw ParseError("key 'schema_version' must be \"" + std::string(kSchemaVersion) + "\"");
  }
  if (!doc.contains("isotope") || !doc["isotope"].is_string()) throw ParseError("key 'isotope' must be a string");
  const auto label = doc["isotope"].get<std::string>();

  const bool known = registry_contains(label);
  EmitterModel m = known ? registry_lookup(label) : EmitterModel{};
  m.isotope_label = label;
  if (!known && !doc.contains("nuclear_spin")) throw ParseError("missing key 'nuclear_spin' for unregistered isotope");
  try {
    if (doc.contains("nuclear_spin")) m.nuclear_spin = Spin::from_value(number_at(doc, "nuclear_spin", ""));
  } catch (const DomainError& e) {
    throw ParseError(std::string("key 'nuclear_spin': ") + e.what());
  }
  if (doc.contains("g_nuclear")) m.g_nuclear = number_at(doc, "g_nuclear", "");
  if (doc.contains("g_electron")) m.g_electron = number_at(doc, "g_electron", "");
  if (doc.contains("strain_alpha_ghz")) m.strain.alpha_ghz = number_at(doc, "strain_alpha_ghz", "");
  if (doc.contains("strain_beta_ghz")) m.strain.beta_ghz = number_at(doc, "strain_beta_ghz", "");
  for (const auto* name : {"gnd", "exc"}) {
    if (doc.contains(name)) {
      read_manifold(doc[name], name, name == std::string("gnd") ? m.gnd : m.exc, !known);
    } else if (!known) {
      throw ParseError(std::string("missing key '") + name + "' for unregistered isotope");
    }
  }
  try {
    m.validate();
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid emitter: ") + e.what());
  }
  return m;
}

std::string emitter_to_json(const EmitterModel& m) {
  Json doc{{"schema_version", std::string(kSchemaVersion)},
           {"isotope", m.isotope_label},
           {"nuclear_spin", m.nuclear_spin.value()},
           {"g_nuclear", printable(m.g_nuclear)},
           {"g_electron", printable(m.g_electron)},
           {"strain_alpha_ghz", printable(m.strain.alpha_ghz)},
           {"strain_beta_ghz", printable(m.strain.beta_ghz)},
           {"gnd", manifold_json(m.gnd)},
           {"exc", manifold_json(m.exc)}};
  return doc.dump(2) + "\n";
}

EmitterModel load_emitter(std::string_view path_or_label) {
  const std::filesystem::path path{std::string(path_or_label)};
  std::error_code ec;
  if (std::filesystem::is_regular_file(path, ec)) return parse_emitter_json(read_file(path));
  return registry_lookup(path_or_label);
}

std::string diagram_json(const TransitionDiagram& d) {
  Json lines = Json::array();
  for (const auto& l : d.lines) lines.push_back(line_json(l));
  Json doc{{"schema_version", std::string(kSchemaVersion)},
           {"gnd_levels_mhz", number_array(d.gnd_levels_mhz)},
           {"exc_levels_mhz", number_array(d.exc_levels_mhz)},
           {"lines", std::move(lines)}};
  return doc.dump(2) + "\n";
}

static Json fit_json(const FitResult& fit) {
  Json params = Json::object();
  Json errs = Json::object();
  for (std::size_t k = 0; k < fit.names.size(); ++k) {
    params[fit.names[k]] = printable(fit.params[k]);
    errs[fit.names[k]] = printable(fit.std_errs[k]);
  }
  Json doc{{"schema_version", std::string(kSchemaVersion)},
           {"model", fit.model},
           {"params", std::move(params)},
           {"std_errs", std::move(errs)},
           {"residual_rms", printable(fit.residual_rms)},
           {"converged", fit.converged},
           {"n_iterations", fit.n_iterations},
           {"seed", fit.seed}};
  return doc;
}

std::string fit_report_json(const FitResult& fit) { return fit_json(fit).dump(2) + "\n"; }

std::string batch_report_json(std::span<const FitResult> fits, std::span<const std::string> labels) {
  if (fits.size() != labels.size()) throw PreconditionError("one label per fit is required");
  Json arr = Json::array();
  for (std::size_t k = 0; k < fits.size(); ++k) {
    Json entry{{"label", labels[k]}};
    const Json report = fit_json(fits[k]);
    for (const auto& [key, value] : report.items()) entry[key] = value;
    arr.push_back(std::move(entry));
  }
  return arr.dump(2) + "\n";
}

std::string ensemble_json(const EnsembleStats& s) {
  Json doc{{"schema_version", std::string(kSchemaVersion)},
           {"n", s.n},
           {"mean", printable(s.mean)},
           {"std_err_of_mean", printable(s.std_err_of_mean)},
           {"histogram", Json{{"bin_edges", number_array(s.bin_edges)}, {"counts", s.counts}}}};
  return doc.dump(2) + "\n";
}

}  // namespace hfspec::io
