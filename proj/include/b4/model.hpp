#pragma once

// Four-compartment Brusselator: parameters, pointwise states, reaction
// kinetics and the uniform stationary solution.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "b4/errors.hpp"

namespace b4 {

struct SystemParams {
  double alpha = 2.0;
  double beta = 5.5;
  double D1 = 0.0126;
  double D2 = 0.126;
  double D3 = 0.0125;
  double D4 = 0.125;
  double a = 1e-6;
  double b = 1e-6;
  double c = 1e-6;
  double d = 1e-6;

  /// Reference parameter set of the 2D and 1D simulations.
  static SystemParams standard() { return {}; }

  /// Limit-cycle / chaos study: beta = 5.9 with unequal diffusivities.
  static SystemParams chaotic() {
    SystemParams p;
    p.beta = 5.9;
    p.a = 1e-6;
    p.b = 2e-6;
    p.c = 3e-6;
    p.d = 4e-6;
    return p;
  }

  double coupling_sum() const { return D1 + D2 + D3 + D4; }
  double diffusivity_sum() const { return a + b + c + d; }
  double max_diffusivity() const;
  double max_coupling() const;

  bool operator==(const SystemParams&) const = default;
};

inline double SystemParams::max_diffusivity() const {
  return std::max(std::max(a, b), std::max(c, d));
}

inline double SystemParams::max_coupling() const {
  return std::max(std::max(D1, D2), std::max(D3, D4));
}

struct Point4 {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  double z = 0.0;

  double operator[](std::size_t i) const {
    switch (i) {
      case 0: return u;
      case 1: return v;
      case 2: return w;
      default: return z;
    }
  }
  double& operator[](std::size_t i) {
    switch (i) {
      case 0: return u;
      case 1: return v;
      case 2: return w;
      default: return z;
    }
  }

  bool finite() const {
    return std::isfinite(u) && std::isfinite(v) && std::isfinite(w) &&
           std::isfinite(z);
  }

  friend Point4 operator+(Point4 x, const Point4& y) {
    return {x.u + y.u, x.v + y.v, x.w + y.w, x.z + y.z};
  }
  friend Point4 operator-(Point4 x, const Point4& y) {
    return {x.u - y.u, x.v - y.v, x.w - y.w, x.z - y.z};
  }
  friend Point4 operator*(double s, const Point4& x) {
    return {s * x.u, s * x.v, s * x.w, s * x.z};
  }
  bool operator==(const Point4&) const = default;
};

/// Names of the four species, in storage order.
inline constexpr std::array<const char*, 4> kSpeciesNames = {"u", "v", "w",
                                                             "z"};

/// Positivity violations by field name; an empty result means valid.
inline std::vector<std::string> validate_params(const SystemParams& p) {
  std::vector<std::string> bad;
  auto check = [&](const char* name, double value) {
    if (!(value > 0.0)) bad.emplace_back(name);
  };
  check("alpha", p.alpha);
  check("beta", p.beta);
  check("D1", p.D1);
  check("D2", p.D2);
  check("D3", p.D3);
  check("D4", p.D4);
  check("a", p.a);
  check("b", p.b);
  check("c", p.c);
  check("d", p.d);
  return bad;
}

/// Returns (f, g, h, k), the local kinetics of the four compartments.
inline Point4 reaction_terms(const Point4& s, const SystemParams& p) {
  if (!s.finite()) throw DomainError("reaction_terms: non-finite state");
  const double u2v = s.u * s.u * s.v;
  const double w2z = s.w * s.w * s.z;
  return {
      p.alpha - (p.beta + 1.0) * s.u + u2v + p.D1 * (s.w - s.u),
      p.beta * s.u - u2v + p.D2 * (s.z - s.v),
      p.alpha - (p.beta + 1.0) * s.w + w2z + p.D3 * (s.u - s.w),
      p.beta * s.w - w2z + p.D4 * (s.v - s.z),
  };
}

/// Spatially uniform equilibrium (alpha, beta/alpha, alpha, beta/alpha).
inline Point4 stationary_solution(const SystemParams& p) {
  if (p.alpha == 0.0 || !std::isfinite(p.alpha))
    throw DomainError("stationary_solution: alpha must be nonzero");
  const double vz = p.beta / p.alpha;
  return {p.alpha, vz, p.alpha, vz};
}

enum class BoundaryCondition { Neumann, DirichletZero };

inline const char* to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Neumann ? "neumann" : "dirichlet";
}

/// Uniform rectangular grid. ny == 1 selects the 1D strip.
struct Grid {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double dx = 1.0;
  double dy = 1.0;

  std::size_t size() const { return nx * ny; }
  bool one_dimensional() const { return ny == 1; }
  double cell_area() const { return dx * dy; }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }

  bool operator==(const Grid&) const = default;
};

/// Four species fields on a grid, stored row-major (x fastest).
struct GridState {
  Grid grid;
  BoundaryCondition bc = BoundaryCondition::Neumann;
  std::array<std::vector<double>, 4> fields;

  GridState() = default;
  GridState(const Grid& g, BoundaryCondition boundary)
      : grid(g), bc(boundary) {
    if (!(g.dx > 0.0) || !(g.dy > 0.0))
      throw DomainError("GridState: spacings must be positive");
    for (auto& f : fields) f.assign(g.size(), 0.0);
  }

  /// Uniform state equal to `value` everywhere.
  static GridState uniform(const Grid& g, BoundaryCondition boundary,
                           const Point4& value) {
    GridState s(g, boundary);
    for (std::size_t k = 0; k < 4; ++k)
      std::fill(s.fields[k].begin(), s.fields[k].end(), value[k]);
    return s;
  }

  std::span<const double> field(std::size_t k) const { return fields[k]; }
  std::span<double> field(std::size_t k) { return fields[k]; }

  Point4 at(std::size_t i, std::size_t j) const {
    const std::size_t n = grid.index(i, j);
    return {fields[0][n], fields[1][n], fields[2][n], fields[3][n]};
  }
  Point4 at(std::size_t n) const {
    return {fields[0][n], fields[1][n], fields[2][n], fields[3][n]};
  }

  bool operator==(const GridState&) const = default;
};

}  // namespace b4
