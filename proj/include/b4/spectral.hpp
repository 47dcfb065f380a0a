#pragma once

// Linear stability of the uniform stationary state and the Hausdorff
// dimension bound formulas built on it.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "b4/errors.hpp"
#include "b4/model.hpp"

namespace b4 {

namespace detail {

template <typename Emit>
void neumann_lattice(double Lx, double Ly, bool one_dimensional, double bound,
                     Emit&& emit) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double cx = pi2 / (Lx * Lx);
  const double cy = one_dimensional ? 0.0 : pi2 / (Ly * Ly);
  for (std::size_t j = 0;; ++j) {
    const double mx = cx * static_cast<double>(j * j);
    if (mx > bound) break;
    if (one_dimensional) {
      emit(mx);
      continue;
    }
    for (std::size_t k = 0;; ++k) {
      const double mu = mx + cy * static_cast<double>(k * k);
      if (mu > bound) break;
      emit(mu);
    }
  }
}

inline std::vector<double> neumann_eigenvalues_impl(double Lx, double Ly,
                                                    bool one_dimensional,
                                                    std::size_t count) {
  if (!(Lx > 0.0) || (!one_dimensional && !(Ly > 0.0)))
    throw DomainError("neumann_eigenvalues: side lengths must be positive");
  if (count == 0) throw DomainError("neumann_eigenvalues: count must be >= 1");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double bound = pi2 / (Lx * Lx);
  if (!one_dimensional) bound = std::max(bound, pi2 / (Ly * Ly));
  std::vector<double> mus;
  for (;;) {
    mus.clear();
    neumann_lattice(Lx, Ly, one_dimensional, bound,
                    [&](double mu) { mus.push_back(mu); });
    if (mus.size() >= count) break;
    bound *= 2.0;
  }
  std::sort(mus.begin(), mus.end());
  mus.resize(count);
  return mus;
}

}  // namespace detail

/// First `count` eigenvalues of -Laplacian on [0,Lx]x[0,Ly] with homogeneous
/// Neumann conditions, pi^2 (j^2/Lx^2 + k^2/Ly^2), ascending with multiplicity.
inline std::vector<double> neumann_eigenvalues(double Lx, double Ly,
                                               std::size_t count) {
  return detail::neumann_eigenvalues_impl(Lx, Ly, false, count);
}

/// Interval [0, Lx]: pi^2 j^2 / Lx^2.
inline std::vector<double> neumann_eigenvalues_1d(double Lx, std::size_t count) {
  return detail::neumann_eigenvalues_impl(Lx, 0.0, true, count);
}

/// Linearization about (alpha, beta/alpha, alpha, beta/alpha) restricted to
/// the Laplacian mode with eigenvalue mu.
inline Eigen::Matrix4d linearized_matrix(double mu, const SystemParams& p) {
  const double a2 = p.alpha * p.alpha;
  Eigen::Matrix4d M;
  M << -p.a * mu + p.beta - 1.0 - p.D1, a2, p.D1, 0.0,
      -p.beta, -p.b * mu - p.D2 - a2, 0.0, p.D2,
      p.D3, 0.0, -p.c * mu + p.beta - 1.0 - p.D3, a2,
      0.0, p.D4, -p.beta, -p.d * mu - p.D4 - a2;
  return M;
}

/// Closed-form trace of the mode matrix: -(a+b+c+d) mu + 2(beta-1-alpha^2) - sum D.
inline double mode_trace(double mu, const SystemParams& p) {
  return -p.diffusivity_sum() * mu +
         (2.0 * (p.beta - 1.0 - p.alpha * p.alpha) - p.coupling_sum());
}

/// Lower-bound base [2(beta-1-alpha^2) - sum D] / (a+b+c+d); modes with
/// mu below it have positive trace.
inline double lower_bound_base(const SystemParams& p) {
  return (2.0 * (p.beta - 1.0 - p.alpha * p.alpha) - p.coupling_sum()) /
         p.diffusivity_sum();
}

struct ModeSpectrum {
  double mu = 0.0;
  std::array<std::complex<double>, 4> eigenvalues{};
  double trace = 0.0;

  double max_real_part() const {
    double m = eigenvalues[0].real();
    for (const auto& l : eigenvalues) m = std::max(m, l.real());
    return m;
  }
};

inline ModeSpectrum mode_spectrum(double mu, const SystemParams& p) {
  if (mu < 0.0) throw DomainError("mode_spectrum: mu must be nonnegative");
  const Eigen::Matrix4d M = linearized_matrix(mu, p);
  Eigen::EigenSolver<Eigen::Matrix4d> es(M, true);
  if (es.info() != Eigen::Success)
    throw NumericalError("mode_spectrum: eigenvalue iteration did not converge");
  const Eigen::Matrix4cd Mc = M.cast<std::complex<double>>();
  const double norm = M.norm();
  ModeSpectrum out;
  out.mu = mu;
  out.trace = M.trace();
  for (int i = 0; i < 4; ++i) {
    const std::complex<double> lambda = es.eigenvalues()(i);
    const Eigen::Vector4cd v = es.eigenvectors().col(i).normalized();
    const double residual = (Mc * v - lambda * v).norm();
    if (residual > 1e-8 * std::max(norm, 1.0))
      throw NumericalError("mode_spectrum: eigenpair residual too large");
    out.eigenvalues[static_cast<std::size_t>(i)] = lambda;
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](const auto& x, const auto& y) {
              return x.real() != y.real() ? x.real() > y.real()
                                          : x.imag() > y.imag();
            });
  return out;
}

struct UnstableModeCount {
  /// Modes whose trace (sum of the four roots) is positive.
  std::size_t trace_count = 0;
  /// Modes with at least one root in the open right half-plane.
  std::size_t full_count = 0;
};

inline UnstableModeCount unstable_mode_count(const SystemParams& p,
                                             std::span<const double> mus) {
  UnstableModeCount c;
  for (double mu : mus) {
    if (mode_trace(mu, p) > 0.0) ++c.trace_count;
    if (mode_spectrum(mu, p).max_real_part() > 0.0) ++c.full_count;
  }
  return c;
}

/// Counts over the first `max_modes` Neumann eigenvalues of the rectangle.
inline UnstableModeCount unstable_mode_count(const SystemParams& p, double Lx,
                                             double Ly, std::size_t max_modes) {
  if (max_modes == 0)
    throw DomainError("unstable_mode_count: max_modes must be >= 1");
  const auto mus = neumann_eigenvalues(Lx, Ly, max_modes);
  return unstable_mode_count(p, mus);
}

/// Exact number of Neumann modes of the rectangle (or interval when
/// `one_dimensional`) with positive mode trace, counted row by row over the
/// lattice without a mode cap.
inline std::size_t trace_unstable_lattice_count(const SystemParams& p, double Lx,
                                                double Ly, bool one_dimensional) {
  if (!(Lx > 0.0) || (!one_dimensional && !(Ly > 0.0)))
    throw DomainError("trace_unstable_lattice_count: side lengths must be positive");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double cx = pi2 / (Lx * Lx);
  const double cy = one_dimensional ? 0.0 : pi2 / (Ly * Ly);
  auto unstable = [&](std::size_t j, std::size_t k) {
    const double jj = static_cast<double>(j);
    const double kk = static_cast<double>(k);
    return mode_trace(cx * jj * jj + cy * kk * kk, p) > 0.0;
  };
  std::size_t count = 0;
  for (std::size_t j = 0; unstable(j, 0); ++j) {
    if (one_dimensional) {
      ++count;
      continue;
    }
    // Mode trace decreases in mu; start from the analytic crossing and fix
    // the last lattice point up against the floating-point predicate.
    const double jj = static_cast<double>(j);
    const double room = (lower_bound_base(p) - cx * jj * jj) / cy;
    auto k = static_cast<std::size_t>(std::sqrt(std::max(0.0, room)));
    while (unstable(j, k + 1)) ++k;
    while (k > 0 && !unstable(j, k)) --k;
    count += k + 1;
  }
  return count;
}

struct BoundReport {
  double base = 0.0;
  int N = 2;
  double K_prime = 1.0;
  double lower = 0.0;
  double upper = 0.0;
  /// sum D < 2(beta - 1 - alpha^2): the lower bound is nontrivial.
  bool lower_active = false;
  std::size_t trace_unstable_count = 0;
  std::size_t full_unstable_count = 0;
};

/// lower = K' max(base, 0)^(N/2); upper = (C/K1)^(3/2) |Omega| + 1. The upper
/// bound constants are not known numerically and are supplied by the caller.
inline BoundReport dimension_bounds(const SystemParams& p, int N,
                                    double K_prime, double K1, double C_upper,
                                    double omega_volume) {
  if (N < 1 || N > 3) throw DomainError("dimension_bounds: N must be 1, 2 or 3");
  if (!(K1 > 0.0)) throw DomainError("dimension_bounds: K1 must be positive");
  BoundReport r;
  r.N = N;
  r.K_prime = K_prime;
  r.base = lower_bound_base(p);
  r.lower_active = p.coupling_sum() < 2.0 * (p.beta - 1.0 - p.alpha * p.alpha);
  r.lower = K_prime * std::pow(std::max(r.base, 0.0), 0.5 * N);
  r.upper = std::pow(C_upper / K1, 1.5) * omega_volume + 1.0;
  return r;
}

/// K' implied by an observed dimension: d_observed / base^(N/2).
inline double extract_Kprime(double d_observed, const SystemParams& p, int N) {
  const double base = lower_bound_base(p);
  if (!(base > 0.0))
    throw DomainError("extract_Kprime: lower-bound base is not positive");
  return d_observed / std::pow(base, 0.5 * N);
}

}  // namespace b4
