#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "hfspec/errors.hpp"
#include "hfspec/io.hpp"

namespace hfspec::io {

namespace {

double parse_double(std::string_view text, std::string_view what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << "invalid " << what << " '" << text << "'";
    throw ParseError(msg.str());
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) throw DomainError("cannot format a non-finite number");
  if (v == 0.0) return "0";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 9);
  if (ec != std::errc()) throw DomainError("number formatting failed");
  return std::string(buf.data(), ptr);
}

double printed_value(double v) {
  const auto text = format_number(v);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  const auto parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::random_device rd;
  auto tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_number(std::string_view text) { return parse_double(text, "number"); }

std::vector<double> parse_grid(std::string_view spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw ParseError("grid must be min:max:step, got '" + std::string(spec) + "'");
  const double lo = parse_double(parts[0], "grid minimum");
  const double hi = parse_double(parts[1], "grid maximum");
  const double step = parse_double(parts[2], "grid step");
  if (!(step > 0.0)) throw ParseError("grid step must be positive");
  if (hi < lo) throw ParseError("grid maximum is below its minimum");
  return make_grid(lo, hi, step);
}

FieldVector parse_field(std::string_view spec) {
  const auto parts = split(spec, ',');
  if (parts.size() == 1) return {0.0, 0.0, parse_double(parts[0], "field")};
  if (parts.size() != 3) throw ParseError("field must be bz or bx,by,bz in Tesla");
  return {parse_double(parts[0], "field"), parse_double(parts[1], "field"), parse_double(parts[2], "field")};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace hfspec::io
