#include <charconv>
#include <cmath>
#include <sstream>

#include "hfspec/errors.hpp"
#include "hfspec/io.hpp"

namespace hfspec::io {

namespace {

struct Lines {
  std::vector<std::string_view> rows;
  std::vector<std::size_t> numbers;  // 1-based
};

// Non-empty lines with trailing '\r' stripped.
Lines split_lines(std::string_view text) {
  Lines out;
  std::size_t start = 0;
  std::size_t number = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    auto line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      out.rows.push_back(line);
      out.numbers.push_back(number);
    }
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    auto f = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!f.empty() && f.front() == ' ') f.remove_prefix(1);
    while (!f.empty() && f.back() == ' ') f.remove_suffix(1);
    out.push_back(f);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double field_number(std::string_view f, std::size_t line, const std::string& source) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
    std::ostringstream msg;
    msg << source << ":" << line << ": cannot parse '" << f << "' as a number";
    throw ParseError(msg.str(), line);
  }
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << source << ":" << line << ": non-finite value";
    throw ParseError(msg.str(), line);
  }
  return v;
}

void expect_header(const Lines& lines, std::string_view header, const std::string& source) {
  if (lines.rows.empty() || lines.rows.front() != header) {
    std::ostringstream msg;
    msg << source << ":" << (lines.numbers.empty() ? 1 : lines.numbers.front()) << ": expected header '" << header
        << "'";
    throw ParseError(msg.str(), lines.numbers.empty() ? 1 : lines.numbers.front());
  }
}

std::string row(std::initializer_list<double> values) {
  std::string out;
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_number(v);
    first = false;
  }
  out += '\n';
  return out;
}

}  // namespace

MeasuredTrace parse_spectrum_csv(std::string_view text, std::string source) {
  if (source.empty()) source = "<input>";
  const auto lines = split_lines(text);
  expect_header(lines, "freq_mhz,intensity", source);
  MeasuredTrace out;
  out.source = source;
  out.emitter_id = std::filesystem::path(source).stem().string();
  auto& t = out.trace;
  for (std::size_t k = 1; k < lines.rows.size(); ++k) {
    const auto n = lines.numbers[k];
    const auto f = fields(lines.rows[k]);
    if (f.size() != 2) {
      std::ostringstream msg;
      msg << source << ":" << n << ": expected 2 columns, found " << f.size();
      throw ParseError(msg.str(), n);
    }
    const double freq = field_number(f[0], n, source);
    const double value = field_number(f[1], n, source);
    if (!t.freq_mhz.empty() && !(freq > t.freq_mhz.back())) {
      std::ostringstream msg;
      msg << source << ":" << n << ": frequencies must be strictly increasing";
      throw ParseError(msg.str(), n);
    }
    t.freq_mhz.push_back(freq);
    t.signal.push_back(value);
  }
  if (t.freq_mhz.size() < 3) throw ParseError(source + ": need at least 3 data rows");
  t.label = out.emitter_id;
  return out;
}

MeasuredTrace ingest_csv(const std::filesystem::path& path) {
  return parse_spectrum_csv(read_file(path), path.string());
}

SpectralMap parse_map_csv(std::string_view text, const FieldVector& direction) {
  const std::string source = "<map>";
  const auto lines = split_lines(text);
  expect_header(lines, "b_tesla,freq_mhz,intensity", source);
  SpectralMap map;
  map.direction = direction;
  for (std::size_t k = 1; k < lines.rows.size(); ++k) {
    const auto n = lines.numbers[k];
    const auto f = fields(lines.rows[k]);
    if (f.size() != 3) {
      std::ostringstream msg;
      msg << source << ":" << n << ": expected 3 columns, found " << f.size();
      throw ParseError(msg.str(), n);
    }
    const double b = field_number(f[0], n, source);
    const double freq = field_number(f[1], n, source);
    const double value = field_number(f[2], n, source);
    if (map.b_tesla.empty() || b != map.b_tesla.back()) {
      map.b_tesla.push_back(b);
      SpectrumTrace row;
      row.b_tesla = b * direction;
      map.rows.push_back(std::move(row));
    }
    auto& row = map.rows.back();
    if (!row.freq_mhz.empty() && !(freq > row.freq_mhz.back())) {
      std::ostringstream msg;
      msg << source << ":" << n << ": frequencies must be strictly increasing within a field row";
      throw ParseError(msg.str(), n);
    }
    row.freq_mhz.push_back(freq);
    row.signal.push_back(value);
  }
  if (map.rows.empty()) throw ParseError("map has no data rows");
  map.freq_mhz = map.rows.front().freq_mhz;
  for (const auto& r : map.rows) {
    if (r.freq_mhz != map.freq_mhz) throw ParseError("map rows do not share one frequency grid");
  }
  return map;
}

SpectralMap ingest_map_csv(const std::filesystem::path& path, const FieldVector& direction) {
  return parse_map_csv(read_file(path), direction);
}

std::string spectrum_csv(const SpectrumTrace& trace) {
  std::string out = "freq_mhz,intensity\n";
  for (std::size_t k = 0; k < trace.freq_mhz.size(); ++k) out += row({trace.freq_mhz[k], trace.signal[k]});
  return out;
}

std::string map_csv(const SpectralMap& map) {
  std::string out = "b_tesla,freq_mhz,intensity\n";
  for (std::size_t r = 0; r < map.rows.size(); ++r) {
    const auto& t = map.rows[r];
    for (std::size_t k = 0; k < t.freq_mhz.size(); ++k) out += row({map.b_tesla[r], t.freq_mhz[k], t.signal[k]});
  }
  return out;
}

std::string level_sweep_csv(const LevelSweep& sweep) {
  std::string out = "alpha_ghz,level_index,energy_mhz,jsq\n";
  for (std::size_t p = 0; p < sweep.axis.size(); ++p) {
    for (std::size_t k = 0; k < sweep.levels[p].size(); ++k) {
      out += format_number(sweep.axis[p]) + ',' + std::to_string(k) + ',' + format_number(sweep.levels[p][k]) + ',' +
             format_number(sweep.jsq[p][k]) + '\n';
    }
  }
  return out;
}

std::string batch_summary_csv(std::span<const BatchRow> rows) {
  std::string out = "label,model,a_ple_abs_mhz,delta_mhz,fwhm_mhz,residual_rms\n";
  for (const auto& r : rows) {
    out += r.label + ',' + r.model + ',' + format_number(r.a_ple_abs_mhz) + ',' + format_number(r.delta_mhz) + ',' +
           format_number(r.fwhm_mhz) + ',' + format_number(r.residual_rms) + '\n';
  }
  return out;
}

std::vector<BatchRow> parse_batch_summary_csv(std::string_view text) {
  const std::string source = "<summary>";
  const auto lines = split_lines(text);
  expect_header(lines, "label,model,a_ple_abs_mhz,delta_mhz,fwhm_mhz,residual_rms", source);
  std::vector<BatchRow> out;
  for (std::size_t k = 1; k < lines.rows.size(); ++k) {
    const auto n = lines.numbers[k];
    const auto f = fields(lines.rows[k]);
    if (f.size() != 6) {
      std::ostringstream msg;
      msg << source << ":" << n << ": expected 6 columns, found " << f.size();
      throw ParseError(msg.str(), n);
    }
    out.push_back({std::string(f[0]), std::string(f[1]), field_number(f[2], n, source), field_number(f[3], n, source),
                   field_number(f[4], n, source), field_number(f[5], n, source)});
  }
  return out;
}

}  // namespace hfspec::io
