#pragma once

/// Plain-text persistence: snapshot tables, profile dumps and JSON verdict /
/// run-metadata records. Numbers are written with %.17g so that doubles
/// survive a write/read cycle exactly.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "renyi/errors.hpp"
#include "renyi/functionals.hpp"
#include "renyi/grid.hpp"
#include "renyi/verification.hpp"

namespace renyi {

inline std::string format_double(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& cell, const std::string& what) {
  if (cell.empty()) return std::nan("");
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw FormatError("io: trailing characters in " + what + ": '" + cell + "'");
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("io: cannot parse " + what + ": '" + cell + "'");
  }
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// snapshot tables

inline constexpr const char* kSnapshotHeader = "t,mass,Ep,Hp,Np,Fp,Ip,Dp,upsilon";

/// Empty cells stand for absent values (D_p when not computed, E_p at p = 1).
inline void write_snapshots_csv(std::ostream& out, const Series& series) {
  out << kSnapshotHeader << '\n';
  for (const auto& s : series) {
    out << format_double(s.t) << ',' << format_double(s.mass) << ',' << format_double(s.E_p) << ','
        << format_double(s.H_p) << ',' << format_double(s.N_p) << ',' << format_double(s.F_p) << ','
        << format_double(s.I_p) << ',' << (s.D_p ? format_double(*s.D_p) : "") << ','
        << format_double(s.upsilon) << '\n';
  }
}

inline Series read_snapshots_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("io: empty snapshot table");
  detail::strip_cr(line);
  if (line != kSnapshotHeader) throw FormatError("io: unexpected snapshot header '" + line + "'");
  Series series;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 9) throw FormatError("io: snapshot row " + std::to_string(row) + " has " +
                                             std::to_string(cells.size()) + " fields, expected 9");
    FunctionalSnapshot s;
    s.t = detail::parse_double(cells[0], "t");
    s.mass = detail::parse_double(cells[1], "mass");
    s.E_p = detail::parse_double(cells[2], "Ep");
    s.H_p = detail::parse_double(cells[3], "Hp");
    s.N_p = detail::parse_double(cells[4], "Np");
    s.F_p = detail::parse_double(cells[5], "Fp");
    s.I_p = detail::parse_double(cells[6], "Ip");
    if (!cells[7].empty()) s.D_p = detail::parse_double(cells[7], "Dp");
    s.upsilon = detail::parse_double(cells[8], "upsilon");
    series.push_back(s);
  }
  return series;
}

// ---------------------------------------------------------------------------
// profile dumps

/// A leading comment line records the grid so that the field can be rebuilt
/// exactly: "# geometry=radial n=3 spacing=... origin=... t=...".
inline void write_profile(std::ostream& out, const DensityField& f, std::optional<double> t = std::nullopt) {
  const Grid& g = f.grid();
  out << "# geometry=" << to_string(g.geometry()) << " n=" << g.dimension() << " spacing=" << format_double(g.spacing())
      << " origin=" << format_double(g.origin_offset());
  if (t) out << " t=" << format_double(*t);
  out << '\n' << (g.is_radial() ? "r,u" : "x,u") << '\n';
  for (std::size_t i = 0; i < f.size(); ++i) out << format_double(g.coordinate(i)) << ',' << format_double(f[i]) << '\n';
}

struct LoadedProfile {
  DensityField field;
  std::optional<double> t;
};

/// Reads a profile written by write_profile, or a bare two-column `x,u` /
/// `r,u` table whose uniform grid is inferred from the coordinates (radial
/// coordinates must be cell centres (i + 1/2) h; the dimension then comes
/// from `radial_dimension`).
inline LoadedProfile read_profile(std::istream& in, int radial_dimension = 1) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("io: empty profile file");
  detail::strip_cr(line);
  std::string geometry;
  int n = radial_dimension;
  double spacing = std::nan(""), origin = std::nan("");
  std::optional<double> t;
  const bool has_header = line.rfind("# ", 0) == 0;
  if (has_header) {
    std::istringstream header(line.substr(2));
    std::string token;
    while (header >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) throw FormatError("io: malformed profile header token '" + token + "'");
      const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
      if (key == "geometry") geometry = value;
      else if (key == "n") n = static_cast<int>(detail::parse_double(value, "n"));
      else if (key == "spacing") spacing = detail::parse_double(value, "spacing");
      else if (key == "origin") origin = detail::parse_double(value, "origin");
      else if (key == "t") t = detail::parse_double(value, "t");
    }
    if (!std::getline(in, line)) throw FormatError("io: profile file lacks its column header");
    detail::strip_cr(line);
  }
  if (line != "x,u" && line != "r,u") throw FormatError("io: unexpected profile columns '" + line + "'");
  if (geometry.empty()) geometry = line == "r,u" ? "radial" : "cartesian1d";
  std::vector<double> coords, values;
  while (std::getline(in, line)) {
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 2) throw FormatError("io: profile rows need two fields");
    coords.push_back(detail::parse_double(cells[0], "coordinate"));
    values.push_back(detail::parse_double(cells[1], "u"));
  }
  if (coords.size() < 4) throw FormatError("io: profile needs at least 4 rows");
  if (!has_header) {
    spacing = geometry == "radial" ? 2.0 * coords[0] : coords[1] - coords[0];
    origin = geometry == "radial" ? 0.0 : coords[0];
    const double tol = 1e-9 * std::max(1.0, std::abs(coords.back()));
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const double expected =
          geometry == "radial" ? (static_cast<double>(i) + 0.5) * spacing : origin + static_cast<double>(i) * spacing;
      if (std::abs(coords[i] - expected) > tol)
        throw FormatError("io: profile coordinates are not a uniform cell-centred grid (row " + std::to_string(i + 1) +
                          ")");
    }
  }
  if (!(spacing > 0.0)) throw FormatError("io: profile grid needs a positive spacing");
  if (geometry != "radial" && geometry != "cartesian1d") throw FormatError("io: unknown geometry '" + geometry + "'");
  Grid grid = geometry == "radial" ? Grid::radial_spacing(n, values.size(), spacing)
                                   : Grid::cartesian(values.size(), spacing, origin);
  return {DensityField(std::move(grid), std::move(values)), t};
}

// ---------------------------------------------------------------------------
// JSON records

inline nlohmann::json to_json(const Verdict& v) {
  nlohmann::json j;
  j["check"] = v.check;
  j["value"] = v.value;
  j["tolerance"] = v.tolerance;
  j["pass"] = v.pass;
  j["detail"] = v.detail;
  return j;
}

inline nlohmann::json verdicts_json(const std::vector<Verdict>& verdicts) {
  nlohmann::json arr = nlohmann::json::array();
  bool all = true;
  for (const auto& v : verdicts) {
    arr.push_back(to_json(v));
    all = all && v.pass;
  }
  return {{"verdicts", arr}, {"all_pass", all}};
}

/// Human-readable table of verdicts.
inline std::string summary_table(const std::vector<Verdict>& verdicts) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-18s %-6s %14s %12s\n", "check", "result", "value", "tolerance");
  out << buf;
  for (const auto& v : verdicts) {
    std::snprintf(buf, sizeof buf, "%-18s %-6s %14.6e %12.3e\n", v.check.c_str(), v.pass ? "PASS" : "FAIL", v.value,
                  v.tolerance);
    out << buf;
  }
  return out.str();
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace renyi
