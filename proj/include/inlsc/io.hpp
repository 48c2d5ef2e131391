#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "inlsc/evolution.hpp"
#include "inlsc/model.hpp"

namespace inlsc::io {

class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

template <typename T>
void put_le(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8);
  auto bits = std::bit_cast<std::uint64_t>(value);
  unsigned char buf[8];
  for (int k = 0; k < 8; ++k) buf[k] = static_cast<unsigned char>(bits >> (8 * k));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) throw IoError("field file truncated");
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
  return std::bit_cast<T>(bits);
}

}  // namespace detail

// FNV-1a, 64 bit.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string file_hash(const std::filesystem::path& path) { return hex64(fnv1a64(read_text(path))); }

// ---------------------------------------------------------------------------
// Binary field file: d (i64), b, sigma, c, omega (f64), n (i64), r_max (f64),
// then n real amplitudes (f64), all little-endian.

inline void write_field(const std::filesystem::path& path, const RadialField& u, const ModelParams& p) {
  double peak = 0.0;
  for (const auto& z : u.values()) peak = std::max(peak, std::abs(z));
  if (!u.is_real(1e-12 * peak))
    throw IoError("write_field: field has an imaginary part; the format stores real amplitudes");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  detail::put_le<std::int64_t>(os, p.d);
  detail::put_le<double>(os, p.b);
  detail::put_le<double>(os, p.sigma);
  detail::put_le<double>(os, p.c);
  detail::put_le<double>(os, p.omega);
  detail::put_le<std::int64_t>(os, static_cast<std::int64_t>(u.size()));
  detail::put_le<double>(os, u.grid().r_max());
  for (const auto& z : u.values()) detail::put_le<double>(os, z.real());
  if (!os) throw IoError("write failed: " + path.string());
}

struct FieldFile {
  ModelParams params;
  RadialField field;
};

// The header does not carry the grid scheme; callers supply it (the sidecar
// written next to ground-state files records it).
inline FieldFile read_field(const std::filesystem::path& path, GridScheme scheme = GridScheme::Graded) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  ModelParams p;
  p.d = static_cast<int>(detail::get_le<std::int64_t>(is));
  p.b = detail::get_le<double>(is);
  p.sigma = detail::get_le<double>(is);
  p.c = detail::get_le<double>(is);
  p.omega = detail::get_le<double>(is);
  const auto n = detail::get_le<std::int64_t>(is);
  const double r_max = detail::get_le<double>(is);
  if (n < 16 || n > (std::int64_t{1} << 28)) throw IoError("field file: bad node count");
  auto grid = make_grid(r_max, static_cast<std::size_t>(n), scheme, p.d);
  std::vector<cplx> v(static_cast<std::size_t>(n));
  for (auto& z : v) z = detail::get_le<double>(is);
  if (is.peek() != std::char_traits<char>::eof()) throw IoError("field file: trailing bytes");
  return {p, RadialField(std::move(grid), std::move(v))};
}

// ---------------------------------------------------------------------------
// Trace: comma-separated, one row per sample. The first ten columns are the
// documented set; the rest are diagnostics.

inline void write_trace_csv(const std::filesystem::path& path, const EvolutionTrace& tr) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os << "t,M,E,H_omega,S_omega,K_omega,G,h1_norm,dist_orbit,b_member,"
        "dist_orbit_rel,P,hardy_sq,mass_drift,energy_drift,boundary_ratio,dt\n";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  for (const auto& s : tr.samples) {
    const auto& r = s.report;
    os << num(s.t) << ',' << num(r.mass) << ',' << num(r.energy) << ',' << num(r.h_omega) << ','
       << num(r.action) << ',' << num(r.nehari) << ',' << num(r.virial_g) << ',' << num(s.h1_norm) << ','
       << (s.distance ? num(s.distance->absolute) : "nan") << ','
       << (s.b_member ? (*s.b_member ? "1" : "0") : "") << ','
       << (s.distance ? num(s.distance->relative) : "nan") << ',' << num(r.potential) << ','
       << num(r.hardy_seminorm_sq) << ',' << num(s.mass_drift) << ',' << num(s.energy_drift) << ','
       << num(s.boundary_ratio) << ',' << num(s.dt) << '\n';
  }
  if (!os) throw IoError("write failed: " + path.string());
}

// Rows of a trace file as name -> column.
inline std::map<std::string, std::vector<std::string>> read_csv_columns(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::string line;
  std::vector<std::string> names;
  std::map<std::string, std::vector<std::string>> cols;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  if (!std::getline(is, line)) throw IoError("empty trace file");
  names = split(line);
  while (std::getline(is, line)) {
    auto cells = split(line);
    if (cells.size() != names.size()) throw IoError("ragged trace row");
    for (std::size_t k = 0; k < names.size(); ++k) cols[names[k]].push_back(cells[k]);
  }
  return cols;
}

// ---------------------------------------------------------------------------
// Flat key = value configuration. '#' starts a comment.

struct ConfigEntry {
  std::string value;
  int line = 0;
};

using ConfigMap = std::map<std::string, ConfigEntry>;

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline ConfigMap parse_config(std::istream& in) {
  ConfigMap out;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError("config line " + std::to_string(no) + ": expected key = value");
    auto key = trim(line.substr(0, eq));
    auto val = trim(line.substr(eq + 1));
    if (key.empty()) throw IoError("config line " + std::to_string(no) + ": empty key");
    if (out.count(key)) throw IoError("config line " + std::to_string(no) + ": duplicate key '" + key + "'");
    out[key] = {val, no};
  }
  return out;
}

inline ConfigMap parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config file not found: " + path.string());
  return parse_config(in);
}

}  // namespace inlsc::io
