#pragma once

// Subcommand drivers: each takes a validated RunConfig and writes its CSV
// outputs into cfg.out_dir.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "b4/checkpoint.hpp"
#include "b4/config.hpp"
#include "b4/csv.hpp"
#include "b4/errors.hpp"
#include "b4/functionals.hpp"
#include "b4/model.hpp"
#include "b4/solver.hpp"
#include "b4/spectral.hpp"
#include "b4/tsa.hpp"

namespace b4 {

namespace detail {

inline std::filesystem::path prepare_out_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir.empty() ? "." : cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw std::runtime_error("cannot create output directory " + dir.string());
  return dir;
}

inline std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%.10g.csv", t);
  return buf;
}

inline void write_snapshot(const std::filesystem::path& path, const GridState& s) {
  CsvWriter out(path.string(), {"x", "y", "u", "v", "w", "z"});
  const Grid& g = s.grid;
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const Point4 x = s.at(i, j);
      out.row({static_cast<double>(i) * g.dx,
               g.one_dimensional() ? 0.0 : static_cast<double>(j) * g.dy, x.u,
               x.v, x.w, x.z});
    }
  out.close();
}

}  // namespace detail

/// Coefficient sequences used for the traced polynomial functional: the
/// feasible generating triple of the diffusivities with decreasing ratios.
inline CoefficientSequences functional_sequences(const SystemParams& p,
                                                 std::size_t n) {
  const auto triple = feasible_triple(coupling_constants(p));
  return build_sequences(triple, decreasing_seeds(triple, n), n);
}

struct SimulateSummary {
  std::size_t start_step = 0;
  std::size_t final_step = 0;
  double final_time = 0.0;
  double dt = 0.0;
  double min_value = 0.0;
  std::size_t rows = 0;
  /// Probe trajectory at every solver step.
  std::vector<Point4> probe_series;
};

/// probe.csv   t,u,v,w,z
/// norms.csv   t,l2_u,l2_v,l2_w,l2_z,grad_l2_u,...,grad_l2_z,L2_functional,K2_functional
/// snapshot_<t>.csv every `snapshot_every` recorded rows, checkpoint.txt at the end.
inline SimulateSummary run_simulate(const RunConfig& cfg) {
  const auto dir = detail::prepare_out_dir(cfg);
  const SystemParams& p = cfg.params;
  const SolverConfig sc = cfg.solver();
  const Grid grid = cfg.grid();

  GridState state0;
  std::size_t start_step = 0;
  if (!cfg.resume.empty()) {
    const Checkpoint ck = load_checkpoint(cfg.resume);
    if (!(ck.params == p))
      throw DomainError("resume: checkpoint parameters differ from the config");
    if (!(ck.state.grid == grid) || ck.state.bc != cfg.bc)
      throw DomainError("resume: checkpoint grid differs from the config");
    if (ck.dt != sc.dt)
      throw DomainError("resume: checkpoint dt differs from the config");
    state0 = ck.state;
    start_step = ck.step;
  } else {
    state0 = initial_condition(grid, cfg.bc, stationary_solution(p),
                               sc.ic_amplitude, sc.ic_seed,
                               cfg.ic_mode == InitialMode::Uniform);
  }

  // The coupling constants need strictly positive diffusivities; without them
  // the L2_functional column is written as nan.
  const bool has_functional = p.a > 0.0 && p.b > 0.0 && p.c > 0.0 && p.d > 0.0;
  const auto seqs = has_functional ? functional_sequences(p, cfg.functional_n)
                                   : CoefficientSequences{};
  CsvWriter probe((dir / "probe.csv").string(), {"t", "u", "v", "w", "z"});
  CsvWriter norms((dir / "norms.csv").string(),
                  {"t", "l2_u", "l2_v", "l2_w", "l2_z", "grad_l2_u", "grad_l2_v",
                   "grad_l2_w", "grad_l2_z", "L2_functional", "K2_functional"});
  SimulateSummary sum;
  sum.start_step = start_step;
  sum.dt = sc.dt;
  const auto observer = [&](double t, std::size_t, const GridState& s) {
    const ObservableRecord r = observe(s, t, 0, sc.probe_ix, sc.probe_iy);
    probe.row({t, r.probe.u, r.probe.v, r.probe.w, r.probe.z});
    norms.row({t, r.l2[0], r.l2[1], r.l2[2], r.l2[3], r.grad_l2[0], r.grad_l2[1],
               r.grad_l2[2], r.grad_l2[3],
               has_functional ? eval_Ln(s, seqs, cfg.functional_n)
                              : std::numeric_limits<double>::quiet_NaN(),
               eval_Kp(s, 2.0, p.D2, p.D4)});
    if (cfg.snapshot_every && sum.rows % cfg.snapshot_every == 0)
      detail::write_snapshot(dir / detail::snapshot_name(t), s);
    ++sum.rows;
  };
  auto result = simulate(state0, p, sc, observer, start_step);
  probe.close();
  norms.close();
  save_checkpoint((dir / "checkpoint.txt").string(),
                  {p, result.final_state, result.final_step, sc.dt});
  sum.final_step = result.final_step;
  sum.final_time = result.final_time;
  sum.min_value = result.min_value;
  sum.probe_series = std::move(result.probe_series);
  return sum;
}

// ---------------------------------------------------------------------------

struct SeriesData {
  std::vector<double> values;
  /// Spacing of a `t` column, when the file has one.
  std::optional<double> t_spacing;
};

/// Reads one column from a comma- or whitespace-separated file. A first line
/// with any non-numeric field is a header; `column` is then matched by name,
/// otherwise it must be a 0-based index (a single-column file needs none).
inline SeriesData read_series(std::istream& is, const std::string& column) {
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
      if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  };
  auto number = [](const std::string& s, double& x) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    return ec == std::errc() && ptr == s.data() + s.size();
  };

  SeriesData out;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> col;
  std::optional<std::size_t> t_col;
  bool first = true;
  std::vector<double> t_values;
  while (std::getline(is, line)) {
    ++line_no;
    const auto fields = split(line);
    if (fields.empty()) continue;
    if (first) {
      first = false;
      double x = 0.0;
      const bool header = std::any_of(fields.begin(), fields.end(),
                                      [&](const auto& f) { return !number(f, x); });
      if (header) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
          if (fields[i] == column) col = i;
          if (fields[i] == "t") t_col = i;
        }
        if (!col && fields.size() == 1) col = 0;
        if (!col)
          throw ParseError(line_no, "column '" + column + "' not in header");
        continue;
      }
    }
    if (!col) {
      if (fields.size() == 1) {
        col = 0;
      } else {
        double idx = 0.0;
        if (!number(column, idx) || idx < 0 || idx != std::floor(idx))
          throw ParseError(line_no,
                           "headerless multi-column file needs a numeric column");
        col = static_cast<std::size_t>(idx);
      }
    }
    if (*col >= fields.size())
      throw ParseError(line_no, "row has no column " + std::to_string(*col));
    double x = 0.0;
    if (!number(fields[*col], x) || !std::isfinite(x))
      throw ParseError(line_no, "non-numeric value '" + fields[*col] + "'");
    out.values.push_back(x);
    if (t_col && *t_col < fields.size() && t_values.size() < 2) {
      double t = 0.0;
      if (number(fields[*t_col], t)) t_values.push_back(t);
    }
  }
  if (t_values.size() == 2 && t_values[1] > t_values[0])
    out.t_spacing = t_values[1] - t_values[0];
  return out;
}

inline SeriesData read_series(const std::string& path, const std::string& column) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open series " + path);
  return read_series(is, column);
}

inline constexpr std::size_t kMinAnalyzeSamples = 1000;

struct AnalyzeSummary {
  tsa::DimensionReport dimension;
  tsa::LyapunovResult lyapunov;
  double sample_dt = 1.0;
  std::size_t samples = 0;
};

inline tsa::AlbanoConfig albano_config(const RunConfig& cfg) {
  tsa::AlbanoConfig a;
  a.svd_threshold = cfg.svd_threshold;
  a.m_max = cfg.m_max;
  a.theiler = cfg.theiler;
  a.window_factor = cfg.window_factor;
  a.max_points = cfg.max_points;
  a.seed = cfg.seed;
  return a;
}

/// Dimension and largest exponent of a scalar series, with the output files
/// acf.csv (lag, acf), cint.csv (r, C, log10_r, log10_C) and report.csv.
inline AnalyzeSummary analyze_series(std::span<const double> x, double sample_dt,
                                     const RunConfig& cfg,
                                     const std::filesystem::path& dir) {
  if (x.size() < kMinAnalyzeSamples)
    throw DomainError("analyze: need at least " +
                      std::to_string(kMinAnalyzeSamples) + " samples, got " +
                      std::to_string(x.size()));
  AnalyzeSummary s;
  s.sample_dt = sample_dt;
  s.samples = x.size();
  s.dimension = tsa::albano_dimension(x, albano_config(cfg));
  const auto& d = s.dimension;

  tsa::LyapunovConfig lc;
  lc.sample_dt = sample_dt;
  lc.max_references = cfg.lyapunov_references;
  if (cfg.theiler) lc.theiler = *cfg.theiler;
  // Neighbour search is quadratic in the series length; keep a leading
  // stretch of at most max_points samples.
  const auto lx = x.first(std::min(x.size(), cfg.max_points));
  s.lyapunov = tsa::largest_lyapunov(lx, {d.m_used, d.tau}, lc);

  CsvWriter acf((dir / "acf.csv").string(), {"lag", "acf"});
  for (std::size_t k = 0; k < d.acf.size(); ++k)
    acf.row({static_cast<double>(k), d.acf[k]});
  acf.close();
  CsvWriter cint((dir / "cint.csv").string(), {"r", "C", "log10_r", "log10_C"});
  for (std::size_t k = 0; k < d.radii.size(); ++k)
    cint.row({d.radii[k], d.cint[k], std::log10(d.radii[k]),
              d.cint[k] > 0.0 ? std::log10(d.cint[k])
                              : -std::numeric_limits<double>::infinity()});
  cint.close();
  CsvWriter rep((dir / "report.csv").string(),
                {"d", "m", "tau", "r_lo", "r_hi", "fit_r2", "lambda1", "kept",
                 "takens_ok", "low_confidence"});
  rep.row({d.d, static_cast<double>(d.m_used), static_cast<double>(d.tau), d.r_lo,
           d.r_hi, d.fit_r2, s.lyapunov.lambda, static_cast<double>(d.kept),
           d.takens_ok ? 1.0 : 0.0, d.low_confidence ? 1.0 : 0.0});
  rep.close();
  return s;
}

inline AnalyzeSummary run_analyze(const RunConfig& cfg) {
  if (cfg.series.empty())
    throw DomainError("analyze: the config must name a series file");
  const auto dir = detail::prepare_out_dir(cfg);
  auto data = read_series(cfg.series, cfg.series_column);
  if (data.values.empty()) throw DomainError("analyze: series file is empty");
  if (cfg.discard >= data.values.size())
    throw DomainError("analyze: discard removes the whole series");
  const std::span<const double> x =
      std::span<const double>(data.values).subspan(cfg.discard);
  const double dt = cfg.sample_dt.value_or(data.t_spacing.value_or(1.0));
  return analyze_series(x, dt, cfg, dir);
}

// ---------------------------------------------------------------------------

struct BoundsSummary {
  BoundReport report;
  std::size_t modes_scanned = 0;
};

/// bounds.csv: base, lower, trace_count, full_count, upper, lower_active,
/// modes_scanned. trace_count is an exact lattice count; full_count scans the
/// first max_modes eigenvalues.
inline BoundsSummary run_bounds(const RunConfig& cfg) {
  const auto dir = detail::prepare_out_dir(cfg);
  const SystemParams& p = cfg.params;
  const bool one_d = cfg.ny == 1;
  BoundsSummary s;
  s.report = dimension_bounds(p, cfg.N, cfg.K_prime, cfg.K1, cfg.C_upper,
                              cfg.omega_volume());
  const auto mus = one_d ? neumann_eigenvalues_1d(cfg.Lx, cfg.max_modes)
                         : neumann_eigenvalues(cfg.Lx, cfg.Ly, cfg.max_modes);
  const auto counts = unstable_mode_count(p, mus);
  s.modes_scanned = mus.size();
  s.report.trace_unstable_count =
      trace_unstable_lattice_count(p, cfg.Lx, cfg.Ly, one_d);
  s.report.full_unstable_count = counts.full_count;
  CsvWriter out((dir / "bounds.csv").string(),
                {"base", "lower", "trace_count", "full_count", "upper",
                 "lower_active", "modes_scanned"});
  out.row({s.report.base, s.report.lower,
           static_cast<double>(s.report.trace_unstable_count),
           static_cast<double>(s.report.full_unstable_count), s.report.upper,
           s.report.lower_active ? 1.0 : 0.0, static_cast<double>(s.modes_scanned)});
  out.close();
  return s;
}

struct FeasibilitySummary {
  CouplingConstants A;
  GeneratorTriple triple;
  ConditionReport conditions;
  bool all_minors_positive = false;
  std::size_t matrices_checked = 0;
};

/// Checks every B_rqp, 0 <= r <= q <= p <= n - 2, built from sequences of
/// the feasible triple with decreasing ratios.
inline FeasibilitySummary feasibility_sweep(const SystemParams& p, std::size_t n) {
  FeasibilitySummary s;
  s.A = coupling_constants(p);
  s.triple = feasible_triple(s.A);
  s.conditions = check_conditions(s.A, s.triple);
  const auto seqs = build_sequences(s.triple, decreasing_seeds(s.triple, n), n);
  s.all_minors_positive = true;
  for (std::size_t pp = 0; pp + 2 <= n; ++pp)
    for (std::size_t q = 0; q <= pp; ++q)
      for (std::size_t r = 0; r <= q; ++r) {
        const auto M = brqp_matrix(r, q, pp, seqs, p.a, p.b, p.c, p.d);
        s.all_minors_positive =
            s.all_minors_positive && sylvester_minors(M).all_positive();
        ++s.matrices_checked;
      }
  return s;
}

/// feasibility.csv: A12,A13,A14,A23,A24,A34,theta2,sigma2,rho2,all_minors_positive
inline FeasibilitySummary run_feasibility(const RunConfig& cfg) {
  const auto dir = detail::prepare_out_dir(cfg);
  const auto s = feasibility_sweep(cfg.params, cfg.feasibility_n);
  CsvWriter out((dir / "feasibility.csv").string(),
                {"A12", "A13", "A14", "A23", "A24", "A34", "theta2", "sigma2",
                 "rho2", "all_minors_positive"});
  out.row({s.A.A12, s.A.A13, s.A.A14, s.A.A23, s.A.A24, s.A.A34, s.triple.theta2,
           s.triple.sigma2, s.triple.rho2, s.all_minors_positive ? 1.0 : 0.0});
  out.close();
  return s;
}

}  // namespace b4
