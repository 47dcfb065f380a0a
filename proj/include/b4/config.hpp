#pragma once

// Flat `key = value` run configuration shared by all subcommands.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "b4/csv.hpp"
#include "b4/errors.hpp"
#include "b4/model.hpp"
#include "b4/solver.hpp"

namespace b4 {

enum class InitialMode { Random, Uniform };

inline const char* to_string(InitialMode m) {
  return m == InitialMode::Random ? "random" : "uniform";
}

struct RunConfig {
  SystemParams params;

  std::size_t nx = 200;
  std::size_t ny = 200;
  double Lx = 500.0;
  double Ly = 500.0;
  BoundaryCondition bc = BoundaryCondition::Neumann;

  /// Unset: min(1/24, stability limit).
  std::optional<double> dt;
  double t_end = 100.0;
  std::size_t record_every = 24;
  /// Unset: grid centre.
  std::optional<std::size_t> probe_ix;
  std::optional<std::size_t> probe_iy;
  double ic_amplitude = 1e-3;
  std::uint64_t seed = 1;
  InitialMode ic_mode = InitialMode::Random;
  /// Write a field snapshot every this many recorded rows; 0 disables.
  std::size_t snapshot_every = 0;
  /// Polynomial order of the functional traced in norms.csv.
  std::size_t functional_n = 2;
  std::string resume;

  std::string series;
  std::string series_column = "u";
  /// Unset: spacing of a `t` column when present, otherwise 1.
  std::optional<double> sample_dt;
  /// Leading samples dropped before analysis.
  std::size_t discard = 0;
  double svd_threshold = 1e-2;
  std::size_t m_max = 50;
  /// Unset: tau * m.
  std::optional<std::size_t> theiler;
  double window_factor = 4.0;
  std::size_t max_points = 20000;
  std::size_t lyapunov_references = 2000;

  int N = 2;
  double K_prime = 1.0;
  double K1 = 1.0;
  double C_upper = 1.0;
  std::size_t max_modes = 200000;
  std::size_t feasibility_n = 6;

  std::string out_dir = ".";

  Grid grid() const {
    Grid g;
    g.nx = nx;
    g.ny = ny;
    g.dx = Lx / static_cast<double>(nx);
    g.dy = ny == 1 ? 1.0 : Ly / static_cast<double>(ny);
    return g;
  }

  double omega_volume() const { return ny == 1 ? Lx : Lx * Ly; }

  double effective_dt() const {
    if (dt) return *dt;
    return std::min(1.0 / 24.0, stability_limit(params, grid()).dt_max());
  }

  SolverConfig solver() const {
    SolverConfig s;
    s.dt = effective_dt();
    s.t_end = t_end;
    s.record_every = record_every;
    s.probe_ix = probe_ix.value_or(nx / 2);
    s.probe_iy = probe_iy.value_or(ny / 2);
    s.ic_amplitude = ic_amplitude;
    s.ic_seed = seed;
    return s;
  }

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_real(const std::string& v, std::size_t line) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
    throw ParseError(line, "expected a number, got '" + v + "'");
  return x;
}

inline std::uint64_t parse_count(const std::string& v, std::size_t line) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ParseError(line, "expected a nonnegative integer, got '" + v + "'");
  return x;
}

struct ConfigField {
  std::function<void(RunConfig&, const std::string&, std::size_t)> set;
  /// Empty optional: the key is unset and is not serialized.
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

template <typename T>
ConfigField real_field(T RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v, std::size_t l) {
            c.*m = parse_real(v, l);
          },
          [m](const RunConfig& c) -> std::optional<std::string> {
            return format_double(c.*m);
          }};
}

inline ConfigField param_field(double SystemParams::*m) {
  return {[m](RunConfig& c, const std::string& v, std::size_t l) {
            c.params.*m = parse_real(v, l);
          },
          [m](const RunConfig& c) -> std::optional<std::string> {
            return format_double(c.params.*m);
          }};
}

template <typename T>
ConfigField count_field(T RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v, std::size_t l) {
            c.*m = static_cast<T>(parse_count(v, l));
          },
          [m](const RunConfig& c) -> std::optional<std::string> {
            return std::to_string(c.*m);
          }};
}

template <typename T>
ConfigField optional_count_field(std::optional<T> RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v, std::size_t l) {
            c.*m = static_cast<T>(parse_count(v, l));
          },
          [m](const RunConfig& c) -> std::optional<std::string> {
            if (!(c.*m)) return std::nullopt;
            return std::to_string(*(c.*m));
          }};
}

inline ConfigField optional_real_field(std::optional<double> RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v, std::size_t l) {
            c.*m = parse_real(v, l);
          },
          [m](const RunConfig& c) -> std::optional<std::string> {
            if (!(c.*m)) return std::nullopt;
            return format_double(*(c.*m));
          }};
}

inline ConfigField string_field(std::string RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v, std::size_t) { c.*m = v; },
          [m](const RunConfig& c) -> std::optional<std::string> {
            if ((c.*m).empty()) return std::nullopt;
            return c.*m;
          }};
}

/// Ordered key table; serialization follows this order.
inline const std::vector<std::pair<std::string, ConfigField>>& config_fields() {
  static const std::vector<std::pair<std::string, ConfigField>> table = [] {
    std::vector<std::pair<std::string, ConfigField>> t;
    t.emplace_back("alpha", param_field(&SystemParams::alpha));
    t.emplace_back("beta", param_field(&SystemParams::beta));
    t.emplace_back("D1", param_field(&SystemParams::D1));
    t.emplace_back("D2", param_field(&SystemParams::D2));
    t.emplace_back("D3", param_field(&SystemParams::D3));
    t.emplace_back("D4", param_field(&SystemParams::D4));
    t.emplace_back("a", param_field(&SystemParams::a));
    t.emplace_back("b", param_field(&SystemParams::b));
    t.emplace_back("c", param_field(&SystemParams::c));
    t.emplace_back("d", param_field(&SystemParams::d));
    t.emplace_back("nx", count_field(&RunConfig::nx));
    t.emplace_back("ny", count_field(&RunConfig::ny));
    t.emplace_back("Lx", real_field(&RunConfig::Lx));
    t.emplace_back("Ly", real_field(&RunConfig::Ly));
    t.emplace_back(
        "bc", ConfigField{[](RunConfig& c, const std::string& v, std::size_t l) {
                            if (v == "neumann")
                              c.bc = BoundaryCondition::Neumann;
                            else if (v == "dirichlet")
                              c.bc = BoundaryCondition::DirichletZero;
                            else
                              throw ParseError(l, "bc must be neumann or dirichlet");
                          },
                          [](const RunConfig& c) -> std::optional<std::string> {
                            return to_string(c.bc);
                          }});
    t.emplace_back("dt", optional_real_field(&RunConfig::dt));
    t.emplace_back("t_end", real_field(&RunConfig::t_end));
    t.emplace_back("record_every", count_field(&RunConfig::record_every));
    t.emplace_back("probe_ix", optional_count_field(&RunConfig::probe_ix));
    t.emplace_back("probe_iy", optional_count_field(&RunConfig::probe_iy));
    t.emplace_back("ic_amplitude", real_field(&RunConfig::ic_amplitude));
    t.emplace_back("seed", count_field(&RunConfig::seed));
    t.emplace_back(
        "ic_mode",
        ConfigField{[](RunConfig& c, const std::string& v, std::size_t l) {
                      if (v == "random")
                        c.ic_mode = InitialMode::Random;
                      else if (v == "uniform")
                        c.ic_mode = InitialMode::Uniform;
                      else
                        throw ParseError(l, "ic_mode must be random or uniform");
                    },
                    [](const RunConfig& c) -> std::optional<std::string> {
                      return to_string(c.ic_mode);
                    }});
    t.emplace_back("snapshot_every", count_field(&RunConfig::snapshot_every));
    t.emplace_back("functional_n", count_field(&RunConfig::functional_n));
    t.emplace_back("resume", string_field(&RunConfig::resume));
    t.emplace_back("series", string_field(&RunConfig::series));
    t.emplace_back("series_column", string_field(&RunConfig::series_column));
    t.emplace_back("sample_dt", optional_real_field(&RunConfig::sample_dt));
    t.emplace_back("discard", count_field(&RunConfig::discard));
    t.emplace_back("svd_threshold", real_field(&RunConfig::svd_threshold));
    t.emplace_back("m_max", count_field(&RunConfig::m_max));
    t.emplace_back("theiler", optional_count_field(&RunConfig::theiler));
    t.emplace_back("window_factor", real_field(&RunConfig::window_factor));
    t.emplace_back("max_points", count_field(&RunConfig::max_points));
    t.emplace_back("lyapunov_references",
                   count_field(&RunConfig::lyapunov_references));
    t.emplace_back(
        "N", ConfigField{[](RunConfig& c, const std::string& v, std::size_t l) {
                           c.N = static_cast<int>(parse_count(v, l));
                         },
                         [](const RunConfig& c) -> std::optional<std::string> {
                           return std::to_string(c.N);
                         }});
    t.emplace_back("K_prime", real_field(&RunConfig::K_prime));
    t.emplace_back("K1", real_field(&RunConfig::K1));
    t.emplace_back("C_upper", real_field(&RunConfig::C_upper));
    t.emplace_back("max_modes", count_field(&RunConfig::max_modes));
    t.emplace_back("feasibility_n", count_field(&RunConfig::feasibility_n));
    t.emplace_back("out_dir", string_field(&RunConfig::out_dir));
    return t;
  }();
  return table;
}

}  // namespace detail

/// Range checks that need the whole config; returns the offending key and a
/// message, or nothing.
inline std::optional<std::pair<std::string, std::string>> config_range_error(
    const RunConfig& c) {
  // Diffusivities may be exactly zero so that a run without diffusion can be
  // configured; every other parameter must be strictly positive.
  const auto is_zero_diffusivity = [&](const std::string& name) {
    const auto& p = c.params;
    return (name == "a" && p.a == 0.0) || (name == "b" && p.b == 0.0) ||
           (name == "c" && p.c == 0.0) || (name == "d" && p.d == 0.0);
  };
  for (const auto& name : validate_params(c.params))
    if (!is_zero_diffusivity(name)) return std::pair{name, "parameter out of range"};
  if (c.nx < 3) return std::pair{"nx", "nx must be at least 3"};
  if (c.ny != 1 && c.ny < 3) return std::pair{"ny", "ny must be 1 or at least 3"};
  if (!(c.Lx > 0.0)) return std::pair{"Lx", "Lx must be positive"};
  if (!(c.Ly > 0.0)) return std::pair{"Ly", "Ly must be positive"};
  if (c.dt && !(*c.dt > 0.0)) return std::pair{"dt", "dt must be positive"};
  if (c.dt && *c.dt > stability_limit(c.params, c.grid()).dt_max())
    return std::pair{"dt", "dt exceeds the explicit stability limit " +
                               format_double(
                                   stability_limit(c.params, c.grid()).dt_max())};
  if (!(c.t_end > 0.0)) return std::pair{"t_end", "t_end must be positive"};
  if (c.record_every == 0)
    return std::pair{"record_every", "record_every must be at least 1"};
  if (c.probe_ix && *c.probe_ix >= c.nx)
    return std::pair{"probe_ix", "probe_ix outside the grid"};
  if (c.probe_iy && *c.probe_iy >= c.ny)
    return std::pair{"probe_iy", "probe_iy outside the grid"};
  if (c.ic_amplitude < 0.0)
    return std::pair{"ic_amplitude", "ic_amplitude must be nonnegative"};
  if (c.functional_n < 1)
    return std::pair{"functional_n", "functional_n must be at least 1"};
  if (c.sample_dt && !(*c.sample_dt > 0.0))
    return std::pair{"sample_dt", "sample_dt must be positive"};
  if (!(c.svd_threshold > 0.0 && c.svd_threshold < 1.0))
    return std::pair{"svd_threshold", "svd_threshold must lie in (0, 1)"};
  if (c.m_max < 2) return std::pair{"m_max", "m_max must be at least 2"};
  if (!(c.window_factor > 0.0))
    return std::pair{"window_factor", "window_factor must be positive"};
  if (c.max_points < 100)
    return std::pair{"max_points", "max_points must be at least 100"};
  if (c.lyapunov_references < 10)
    return std::pair{"lyapunov_references", "lyapunov_references must be at least 10"};
  if (c.N < 1 || c.N > 3) return std::pair{"N", "N must be 1, 2 or 3"};
  if (!(c.K1 > 0.0)) return std::pair{"K1", "K1 must be positive"};
  if (c.max_modes == 0) return std::pair{"max_modes", "max_modes must be at least 1"};
  if (c.feasibility_n < 2)
    return std::pair{"feasibility_n", "feasibility_n must be at least 2"};
  return std::nullopt;
}

/// One `key = value` per line; `#` starts a comment; blank lines ignored.
/// Unknown or repeated keys, malformed lines and out-of-range values raise
/// ParseError with the 1-based line number.
inline RunConfig parse_config(std::string_view text) {
  const auto& fields = detail::config_fields();
  RunConfig c;
  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos)
      raw = raw.substr(0, hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(line_no, "expected 'key = value'");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "missing key");
    if (value.empty()) throw ParseError(line_no, "missing value for '" + key + "'");
    const auto it = std::find_if(fields.begin(), fields.end(),
                                 [&](const auto& f) { return f.first == key; });
    if (it == fields.end()) throw ParseError(line_no, "unknown key '" + key + "'");
    if (seen.contains(key))
      throw ParseError(line_no, "duplicate key '" + key + "' (first on line " +
                                    std::to_string(seen[key]) + ")");
    seen[key] = line_no;
    it->second.set(c, value, line_no);
  }
  if (const auto err = config_range_error(c)) {
    const auto at = seen.find(err->first);
    throw ParseError(at == seen.end() ? 0 : at->second,
                     err->first + ": " + err->second);
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open config " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

/// Every set key in table order; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& c) {
  std::string out;
  for (const auto& [key, field] : detail::config_fields()) {
    if (const auto v = field.get(c)) out += key + " = " + *v + "\n";
  }
  return out;
}

}  // namespace b4
