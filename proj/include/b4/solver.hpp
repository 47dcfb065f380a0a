#pragma once

// Explicit finite-difference integrator for the four-compartment system:
// five-point Laplacian, forward Euler in time, simultaneous update.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "b4/errors.hpp"
#include "b4/model.hpp"
#include "b4/parallel.hpp"

namespace b4 {

/// Magnitude above which a field value is treated as a blow-up.
inline constexpr double kBlowUpThreshold = 1e12;

namespace detail {

inline void require_stencil_grid(const Grid& g) {
  if (g.nx < 3 || (g.ny != 1 && g.ny < 3))
    throw DomainError("laplacian: grid needs at least 3 points per direction");
  if (!(g.dx > 0.0) || !(g.dy > 0.0))
    throw DomainError("laplacian: spacings must be positive");
}

// Value at (i, j) with ghost cells: reflection f[-1] = f[1] for Neumann,
// zero for homogeneous Dirichlet.
inline double ghosted(std::span<const double> f, const Grid& g,
                      BoundaryCondition bc, std::ptrdiff_t i,
                      std::ptrdiff_t j) {
  const auto nx = static_cast<std::ptrdiff_t>(g.nx);
  const auto ny = static_cast<std::ptrdiff_t>(g.ny);
  if (i < 0 || i >= nx || j < 0 || j >= ny) {
    if (bc == BoundaryCondition::DirichletZero) return 0.0;
    if (i < 0) i = -i;
    if (i >= nx) i = 2 * (nx - 1) - i;
    if (j < 0) j = -j;
    if (j >= ny) j = 2 * (ny - 1) - j;
  }
  return f[static_cast<std::size_t>(j * nx + i)];
}

inline double laplacian_at(std::span<const double> f, const Grid& g,
                           BoundaryCondition bc, std::size_t i,
                           std::size_t j) {
  const auto ii = static_cast<std::ptrdiff_t>(i);
  const auto jj = static_cast<std::ptrdiff_t>(j);
  const double centre = f[g.index(i, j)];
  const bool interior_x = i > 0 && i + 1 < g.nx;
  const double west = interior_x ? f[g.index(i - 1, j)]
                                 : ghosted(f, g, bc, ii - 1, jj);
  const double east = interior_x ? f[g.index(i + 1, j)]
                                 : ghosted(f, g, bc, ii + 1, jj);
  double lap = (west + east - 2.0 * centre) / (g.dx * g.dx);
  if (!g.one_dimensional()) {
    const bool interior_y = j > 0 && j + 1 < g.ny;
    const double south = interior_y ? f[g.index(i, j - 1)]
                                    : ghosted(f, g, bc, ii, jj - 1);
    const double north = interior_y ? f[g.index(i, j + 1)]
                                    : ghosted(f, g, bc, ii, jj + 1);
    lap += (south + north - 2.0 * centre) / (g.dy * g.dy);
  }
  return lap;
}

}  // namespace detail

/// Five-point discrete Laplacian (three-point when ny == 1).
inline std::vector<double> laplacian(std::span<const double> field,
                                     const Grid& grid, BoundaryCondition bc) {
  detail::require_stencil_grid(grid);
  if (field.size() != grid.size())
    throw DomainError("laplacian: field size does not match grid");
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < grid.ny; ++j)
    for (std::size_t i = 0; i < grid.nx; ++i)
      out[grid.index(i, j)] = detail::laplacian_at(field, grid, bc, i, j);
  return out;
}

struct StabilityLimit {
  double diffusive = std::numeric_limits<double>::infinity();
  double reaction = std::numeric_limits<double>::infinity();

  double dt_max() const { return std::min(diffusive, reaction); }
};

/// Explicit-scheme time-step guard. The diffusive part is the standard
/// (dx^-2 + dy^-2)^-1 / (2 max diffusivity); the reaction part is
/// 0.5 / (beta + 1 + max D_i).
inline StabilityLimit stability_limit(const SystemParams& p, double dx,
                                      double dy, bool one_dimensional = false) {
  StabilityLimit lim;
  double inv = 1.0 / (dx * dx);
  if (!one_dimensional) inv += 1.0 / (dy * dy);
  const double dmax = p.max_diffusivity();
  if (dmax > 0.0) lim.diffusive = (1.0 / inv) / (2.0 * dmax);
  lim.reaction = 0.5 / (p.beta + 1.0 + p.max_coupling());
  return lim;
}

inline StabilityLimit stability_limit(const SystemParams& p, const Grid& g) {
  return stability_limit(p, g.dx, g.dy, g.one_dimensional());
}

namespace detail {

inline std::array<double, 4> max_abs(const GridState& s) {
  std::array<double, 4> m{};
  for (std::size_t k = 0; k < 4; ++k)
    for (double x : s.fields[k])
      m[k] = std::isfinite(x) ? std::max(m[k], std::abs(x))
                              : std::numeric_limits<double>::infinity();
  return m;
}

inline bool blown_up(const GridState& s) {
  for (const auto& f : s.fields)
    for (double x : f)
      if (!(std::abs(x) <= kBlowUpThreshold)) return true;
  return false;
}

// next = cur + dt (D lap(cur) + R(cur)). `next` must already be sized.
inline void advance(const GridState& cur, GridState& next,
                    const SystemParams& p, double dt, std::size_t workers) {
  const Grid& g = cur.grid;
  const std::array<double, 4> diff = {p.a, p.b, p.c, p.d};
  parallel_chunks(g.ny, workers, [&](std::size_t j0, std::size_t j1,
                                     std::size_t) {
    for (std::size_t j = j0; j < j1; ++j) {
      for (std::size_t i = 0; i < g.nx; ++i) {
        const std::size_t n = g.index(i, j);
        const Point4 local = cur.at(n);
        const double u2v = local.u * local.u * local.v;
        const double w2z = local.w * local.w * local.z;
        const std::array<double, 4> react = {
            p.alpha - (p.beta + 1.0) * local.u + u2v + p.D1 * (local.w - local.u),
            p.beta * local.u - u2v + p.D2 * (local.z - local.v),
            p.alpha - (p.beta + 1.0) * local.w + w2z + p.D3 * (local.u - local.w),
            p.beta * local.w - w2z + p.D4 * (local.v - local.z),
        };
        for (std::size_t k = 0; k < 4; ++k) {
          const double lap =
              diff[k] == 0.0
                  ? 0.0
                  : laplacian_at(cur.fields[k], g, cur.bc, i, j);
          next.fields[k][n] = local[k] + dt * (diff[k] * lap + react[k]);
        }
      }
    }
  });
}

}  // namespace detail

/// One forward-Euler step. `time` is the time at the start of the step and is
/// only used for blow-up diagnostics.
inline GridState step(const GridState& state, const SystemParams& p, double dt,
                      double time = 0.0, std::size_t step_index = 0) {
  detail::require_stencil_grid(state.grid);
  GridState next = state;
  detail::advance(state, next, p, dt, 1);
  if (detail::blown_up(next))
    throw BlowUpError(time + dt, step_index + 1, detail::max_abs(next));
  return next;
}

/// Base state plus amplitude * xi with xi uniform in [-1, 1], clamped at zero.
/// With `uniform_perturbation` a single draw per species is shared by all
/// cells, which yields a spatially uniform state.
inline GridState initial_condition(const Grid& grid, BoundaryCondition bc,
                                   const Point4& base, double amplitude,
                                   std::uint64_t seed,
                                   bool uniform_perturbation = false) {
  if (amplitude < 0.0)
    throw DomainError("initial_condition: amplitude must be nonnegative");
  GridState s(grid, bc);
  std::mt19937_64 rng(seed);
  // Explicit 53-bit mapping keeps the draw identical across standard libraries.
  auto xi = [&rng] {
    return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
  };
  for (std::size_t k = 0; k < 4; ++k) {
    const double shared = uniform_perturbation ? xi() : 0.0;
    for (auto& x : s.fields[k]) {
      const double r = uniform_perturbation ? shared : xi();
      x = std::max(0.0, base[k] + amplitude * r);
    }
  }
  return s;
}

struct SolverConfig {
  double dt = 1.0 / 24.0;
  double t_end = 100.0;
  std::size_t record_every = 24;
  std::size_t probe_ix = 0;
  std::size_t probe_iy = 0;
  double ic_amplitude = 1e-3;
  std::uint64_t ic_seed = 1;

  std::size_t total_steps() const {
    return static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
  }
};

struct ObservableRecord {
  double t = 0.0;
  std::size_t step = 0;
  Point4 probe;
  std::array<double, 4> l2{};
  std::array<double, 4> grad_l2{};
  std::array<double, 4> min{};
  std::array<double, 4> max{};
};

/// Discrete L2 norm sqrt(sum f^2 dx dy).
inline double l2_norm(std::span<const double> f, const Grid& g) {
  double s = 0.0;
  for (double x : f) s += x * x;
  return std::sqrt(s * g.cell_area());
}

/// Discrete gradient L2 norm from forward differences between grid points.
inline double grad_l2_norm(std::span<const double> f, const Grid& g) {
  double s = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i + 1 < g.nx; ++i) {
      const double d = (f[g.index(i + 1, j)] - f[g.index(i, j)]) / g.dx;
      s += d * d;
    }
  }
  if (!g.one_dimensional()) {
    for (std::size_t j = 0; j + 1 < g.ny; ++j) {
      for (std::size_t i = 0; i < g.nx; ++i) {
        const double d = (f[g.index(i, j + 1)] - f[g.index(i, j)]) / g.dy;
        s += d * d;
      }
    }
  }
  return std::sqrt(s * g.cell_area());
}

inline ObservableRecord observe(const GridState& s, double t, std::size_t step,
                                std::size_t probe_ix, std::size_t probe_iy) {
  ObservableRecord r;
  r.t = t;
  r.step = step;
  r.probe = s.at(probe_ix, probe_iy);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto f = s.field(k);
    r.l2[k] = l2_norm(f, s.grid);
    r.grad_l2[k] = grad_l2_norm(f, s.grid);
    const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
    r.min[k] = *lo;
    r.max[k] = *hi;
  }
  return r;
}

struct SimulationResult {
  std::vector<ObservableRecord> records;
  /// Probe values at every solver step, starting with the initial state.
  std::vector<Point4> probe_series;
  double probe_dt = 0.0;
  GridState final_state;
  std::size_t final_step = 0;
  double final_time = 0.0;
  /// Most negative value seen in any field over the run.
  double min_value = std::numeric_limits<double>::infinity();
};

/// Called with (time, step, state) at every recorded step.
using RecordObserver =
    std::function<void(double, std::size_t, const GridState&)>;

/// Integrates from `state0` at step `start_step` (time start_step * dt) up to
/// cfg.total_steps(). Records at every multiple of cfg.record_every,
/// including the starting step when it is one.
inline SimulationResult simulate(const GridState& state0,
                                 const SystemParams& p, const SolverConfig& cfg,
                                 const RecordObserver& observer = {},
                                 std::size_t start_step = 0) {
  const Grid& g = state0.grid;
  detail::require_stencil_grid(g);
  if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0))
    throw DomainError("simulate: dt and t_end must be positive");
  if (cfg.record_every == 0)
    throw DomainError("simulate: record_every must be at least 1");
  if (cfg.probe_ix >= g.nx || cfg.probe_iy >= g.ny)
    throw DomainError("simulate: probe index outside grid");
  const double dt_max = stability_limit(p, g).dt_max();
  if (cfg.dt > dt_max)
    throw DomainError("simulate: dt = " + std::to_string(cfg.dt) +
                      " exceeds the stability limit " + std::to_string(dt_max));

  const std::size_t steps = cfg.total_steps();
  const std::size_t workers = worker_count();
  SimulationResult out;
  out.probe_dt = cfg.dt;
  out.probe_series.reserve(steps >= start_step ? steps - start_step + 1 : 1);

  GridState cur = state0;
  GridState next = state0;
  auto track = [&](const GridState& s, std::size_t n) {
    const double t = static_cast<double>(n) * cfg.dt;
    out.probe_series.push_back(s.at(cfg.probe_ix, cfg.probe_iy));
    for (const auto& f : s.fields)
      out.min_value =
          std::min(out.min_value, *std::min_element(f.begin(), f.end()));
    if (n % cfg.record_every == 0) {
      out.records.push_back(observe(s, t, n, cfg.probe_ix, cfg.probe_iy));
      if (observer) observer(t, n, s);
    }
  };

  track(cur, start_step);
  for (std::size_t n = start_step; n < steps; ++n) {
    detail::advance(cur, next, p, cfg.dt, workers);
    if (detail::blown_up(next))
      throw BlowUpError(static_cast<double>(n + 1) * cfg.dt, n + 1,
                        detail::max_abs(next));
    std::swap(cur, next);
    track(cur, n + 1);
  }
  out.final_step = std::max(steps, start_step);
  out.final_time = static_cast<double>(out.final_step) * cfg.dt;
  out.final_state = std::move(cur);
  return out;
}

}  // namespace b4
