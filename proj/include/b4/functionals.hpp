#pragma once

// Polynomial Lyapunov functionals for the four-compartment system: the
// pairwise diffusivity constants, the admissibility conditions on the
// generating triple, geometric-ratio coefficient sequences, the quadratic-form
// matrices B_rqp with their leading principal minors, and the H_n / L_n / K_p
// functionals together with an absorption monitor.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "b4/errors.hpp"
#include "b4/model.hpp"

namespace b4 {

using Matrix4 = Eigen::Matrix4d;

struct CouplingConstants {
  double A12 = 1.0;
  double A13 = 1.0;
  double A14 = 1.0;
  double A23 = 1.0;
  double A24 = 1.0;
  double A34 = 1.0;
};

/// A_xy = (x + y) / (2 sqrt(xy)); each is >= 1 by AM-GM.
inline CouplingConstants coupling_constants(double a, double b, double c,
                                            double d) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0 && d > 0.0))
    throw DomainError("coupling_constants: diffusivities must be positive");
  auto A = [](double x, double y) { return (x + y) / (2.0 * std::sqrt(x * y)); };
  return {A(a, b), A(a, c), A(a, d), A(b, c), A(b, d), A(c, d)};
}

inline CouplingConstants coupling_constants(const SystemParams& p) {
  return coupling_constants(p.a, p.b, p.c, p.d);
}

/// The squared generators (theta^2, sigma^2, rho^2).
struct GeneratorTriple {
  double theta2 = 1.0;
  double sigma2 = 1.0;
  double rho2 = 1.0;
};

struct ConditionReport {
  bool first = false;   // theta^2 > A12^2
  bool second = false;  // Lambda > 0
  bool third = false;   // Lambda V > Gamma^2
  double margin_first = 0.0;
  double margin_second = 0.0;
  double margin_third = 0.0;
  double Lambda = 0.0;
  double V = 0.0;
  double Gamma = 0.0;

  bool all() const { return first && second && third; }
};

inline ConditionReport check_conditions(const CouplingConstants& A,
                                        const GeneratorTriple& t) {
  if (!(t.theta2 > 0.0 && t.sigma2 > 0.0 && t.rho2 > 0.0))
    throw DomainError("check_conditions: generators must be positive");
  ConditionReport r;
  const double e12 = t.theta2 - A.A12 * A.A12;
  const double x13 = A.A13 - A.A12 * A.A23;
  const double x14 = A.A14 - A.A12 * A.A24;
  r.Lambda = e12 * (t.sigma2 - A.A23 * A.A23) - x13 * x13;
  r.V = e12 * (t.sigma2 * t.rho2 - A.A24 * A.A24) - x14 * x14;
  r.Gamma = e12 * (A.A34 * t.sigma2 - A.A23 * A.A24) - x13 * x14;
  r.margin_first = e12;
  r.margin_second = r.Lambda;
  r.margin_third = r.Lambda * r.V - r.Gamma * r.Gamma;
  r.first = r.margin_first > 0.0;
  r.second = r.margin_second > 0.0;
  r.third = r.margin_third > 0.0;
  return r;
}

namespace detail {

// Smallest x (to bisection accuracy) satisfying a monotone predicate, found by
// doubling from 1 and bisecting the last bracket. Returns twice the threshold.
template <typename Pred>
double threshold_with_margin(Pred&& holds, const char* what) {
  constexpr int kMaxGrowth = 1000000;
  double lo = 0.0;
  double hi = 1.0;
  int steps = 0;
  while (!holds(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++steps > kMaxGrowth || !std::isfinite(hi))
      throw NumericalError(std::string("feasible_triple: no admissible ") +
                           what + " found within the growth cap");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? hi : lo) = mid;
  }
  return 2.0 * hi;
}

}  // namespace detail

/// A generating triple satisfying all three admissibility conditions:
/// theta^2 = A12^2 + 1, then sigma^2 and rho^2 each set to twice their
/// admissibility threshold (located by doubling and bisection).
inline GeneratorTriple feasible_triple(const CouplingConstants& A) {
  GeneratorTriple t;
  t.theta2 = A.A12 * A.A12 + 1.0;
  t.sigma2 = detail::threshold_with_margin(
      [&](double s2) {
        return check_conditions(A, {t.theta2, s2, 1.0}).second;
      },
      "sigma^2");
  t.rho2 = detail::threshold_with_margin(
      [&](double r2) {
        return check_conditions(A, {t.theta2, t.sigma2, r2}).third;
      },
      "rho^2");
  const auto report = check_conditions(A, t);
  if (!report.all())
    throw NumericalError(
        "feasible_triple: search ended on an infeasible point (margins " +
        std::to_string(report.margin_first) + ", " +
        std::to_string(report.margin_second) + ", " +
        std::to_string(report.margin_third) + ")");
  return t;
}

/// x_0 = x0, x_{k+1} = x_k * C * g2^k, so x_k x_{k+2} / x_{k+1}^2 = g2.
inline std::vector<double> build_sequence(double x0, double C, double g2,
                                          std::size_t n) {
  if (!(x0 > 0.0 && C > 0.0 && g2 > 0.0))
    throw DomainError("build_sequence: x0, C and g2 must be positive");
  std::vector<double> seq(n + 1);
  seq[0] = x0;
  double ratio = C;
  for (std::size_t k = 0; k < n; ++k) {
    seq[k + 1] = seq[k] * ratio;
    ratio *= g2;
    if (!std::isfinite(seq[k + 1]) || seq[k + 1] == 0.0)
      throw std::range_error("build_sequence: entry " + std::to_string(k + 1) +
                             " over/underflows");
  }
  return seq;
}

struct SequenceSeeds {
  double theta0 = 1.0;
  double sigma0 = 1.0;
  double rho0 = 1.0;
  double C_theta = 1.0;
  double C_sigma = 1.0;
  double C_rho = 1.0;
};

struct CoefficientSequences {
  std::vector<double> theta;
  std::vector<double> sigma;
  std::vector<double> rho;
  GeneratorTriple triple;
  SequenceSeeds seeds;

  std::size_t length() const {
    return std::min({theta.size(), sigma.size(), rho.size()});
  }
};

/// Sequences of length n + 1 from a triple and seeds.
inline CoefficientSequences build_sequences(const GeneratorTriple& t,
                                           const SequenceSeeds& s,
                                           std::size_t n) {
  return {build_sequence(s.theta0, s.C_theta, t.theta2, n),
          build_sequence(s.sigma0, s.C_sigma, t.sigma2, n),
          build_sequence(s.rho0, s.C_rho, t.rho2, n), t, s};
}

/// Seeds whose consecutive ratios C g2^k all stay below 1 for k < n.
inline SequenceSeeds decreasing_seeds(const GeneratorTriple& t, std::size_t n) {
  auto C = [n](double g2) {
    return 0.5 / std::pow(std::max(1.0, g2), static_cast<double>(n));
  };
  SequenceSeeds s;
  s.C_theta = C(t.theta2);
  s.C_sigma = C(t.sigma2);
  s.C_rho = C(t.rho2);
  return s;
}

/// Quadratic-form matrix of the gradient terms for index triple (r, q, p).
/// Built symmetric from the first-row-consistent upper triangle.
inline Matrix4 brqp_matrix(std::size_t r, std::size_t q, std::size_t p,
                           const CoefficientSequences& s, double a, double b,
                           double c, double d) {
  if (r + 2 >= s.theta.size() || q + 2 >= s.sigma.size() ||
      p + 2 >= s.rho.size())
    throw std::out_of_range("brqp_matrix: index + 2 exceeds sequence length");
  const auto& T = s.theta;
  const auto& S = s.sigma;
  const auto& R = s.rho;
  Matrix4 M;
  M(0, 0) = a * R[p + 2] * S[q + 2] * T[r + 2];
  M(1, 1) = b * R[p + 2] * S[q + 2] * T[r];
  M(2, 2) = c * R[p + 2] * S[q] * T[r];
  M(3, 3) = d * R[p] * S[q] * T[r];
  M(0, 1) = 0.5 * (a + b) * R[p + 2] * S[q + 2] * T[r + 1];
  M(0, 2) = 0.5 * (a + c) * R[p + 2] * S[q + 1] * T[r + 1];
  M(0, 3) = 0.5 * (a + d) * R[p + 1] * S[q + 1] * T[r + 1];
  M(1, 2) = 0.5 * (b + c) * R[p + 2] * S[q + 1] * T[r];
  M(1, 3) = 0.5 * (b + d) * R[p + 1] * S[q + 1] * T[r];
  M(2, 3) = 0.5 * (c + d) * R[p + 1] * S[q] * T[r];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) M(i, j) = M(j, i);
  return M;
}

struct MinorSet {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double d4 = 0.0;
  // Minors of diag(M)^(-1/2) M diag(M)^(-1/2). Same signs as d1..d4 but
  // immune to underflow when the entries are tiny.
  std::optional<std::array<double, 4>> unit_diagonal;

  bool all_positive() const {
    if (unit_diagonal)
      return std::all_of(unit_diagonal->begin(), unit_diagonal->end(),
                         [](double x) { return x > 0.0; });
    return d1 > 0.0 && d2 > 0.0 && d3 > 0.0 && d4 > 0.0;
  }
};

namespace detail {

inline double det2(double a, double b, double c, double d) {
  return a * d - b * c;
}

inline double det3(const Matrix4& M) {
  return M(0, 0) * det2(M(1, 1), M(1, 2), M(2, 1), M(2, 2)) -
         M(0, 1) * det2(M(1, 0), M(1, 2), M(2, 0), M(2, 2)) +
         M(0, 2) * det2(M(1, 0), M(1, 1), M(2, 0), M(2, 1));
}

// Laplace expansion along the first row.
inline double det4(const Matrix4& M) {
  double det = 0.0;
  for (int col = 0; col < 4; ++col) {
    Eigen::Matrix3d minor;
    for (int i = 1; i < 4; ++i)
      for (int j = 0, jj = 0; j < 4; ++j)
        if (j != col) minor(i - 1, jj++) = M(i, j);
    const double cof =
        minor(0, 0) * det2(minor(1, 1), minor(1, 2), minor(2, 1), minor(2, 2)) -
        minor(0, 1) * det2(minor(1, 0), minor(1, 2), minor(2, 0), minor(2, 2)) +
        minor(0, 2) * det2(minor(1, 0), minor(1, 1), minor(2, 0), minor(2, 1));
    det += (col % 2 == 0 ? 1.0 : -1.0) * M(0, col) * cof;
  }
  return det;
}

}  // namespace detail

/// Leading principal minors by direct expansion. Rejects inputs whose
/// asymmetry exceeds 1e-10 relative to the largest entry.
inline MinorSet sylvester_minors(const Matrix4& M) {
  const double scale = M.cwiseAbs().maxCoeff();
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw DomainError("sylvester_minors: matrix is not symmetric");
  MinorSet m{M(0, 0), detail::det2(M(0, 0), M(0, 1), M(1, 0), M(1, 1)),
             detail::det3(M), detail::det4(M), std::nullopt};
  if ((M.diagonal().array() > 0.0).all()) {
    const Eigen::Vector4d s = M.diagonal().cwiseSqrt().cwiseInverse();
    const Matrix4 U = s.asDiagonal() * M * s.asDiagonal();
    m.unit_diagonal = std::array<double, 4>{
        U(0, 0), detail::det2(U(0, 0), U(0, 1), U(1, 0), U(1, 1)),
        detail::det3(U), detail::det4(U)};
  }
  return m;
}

/// Closed-form minors of B_rqp in terms of the generating triple; they equal
/// the direct determinants whenever the sequences obey the ratio recurrence.
inline MinorSet brqp_closed_form_minors(std::size_t r, std::size_t q,
                                        std::size_t p,
                                        const CoefficientSequences& s,
                                        double a, double b, double c,
                                        double d) {
  const auto& T = s.theta;
  const auto& S = s.sigma;
  const auto& R = s.rho;
  const auto A = coupling_constants(a, b, c, d);
  const auto cond = check_conditions(A, s.triple);
  const double e12 = s.triple.theta2 - A.A12 * A.A12;
  MinorSet m;
  m.d1 = a * R[p + 2] * S[q + 2] * T[r + 2];
  m.d2 = a * b * R[p + 2] * R[p + 2] * S[q + 2] * S[q + 2] * T[r + 1] *
         T[r + 1] * e12;
  m.d3 = a * b * c * std::pow(R[p + 2], 3) * S[q + 2] * S[q + 1] * S[q + 1] *
         T[r + 1] * T[r + 1] * T[r] * cond.Lambda;
  m.d4 = a * b * c * d * R[p + 2] * R[p + 2] * R[p + 1] * R[p + 1] *
         std::pow(S[q + 1], 4) * T[r + 1] * T[r + 1] * T[r] * T[r] *
         cond.margin_third / e12;
  return m;
}

/// Schur-complement terms of a symmetric 4x4 matrix A with
/// a11^2 (a11 a22 - a12^2) det A = P Q - R^2.
struct SchurTerms {
  double P = 0.0;
  double Q = 0.0;
  double R = 0.0;
};

inline SchurTerms schur_terms(const Matrix4& A) {
  const double m12 = A(0, 0) * A(1, 1) - A(0, 1) * A(0, 1);
  const double x23 = A(0, 0) * A(1, 2) - A(0, 1) * A(0, 2);
  const double x24 = A(0, 0) * A(1, 3) - A(0, 1) * A(0, 3);
  return {
      m12 * (A(0, 0) * A(2, 2) - A(0, 2) * A(0, 2)) - x23 * x23,
      m12 * (A(0, 0) * A(3, 3) - A(0, 3) * A(0, 3)) - x24 * x24,
      m12 * (A(0, 0) * A(2, 3) - A(0, 2) * A(0, 3)) - x23 * x24,
  };
}

/// Index offsets applied to (theta_r, sigma_q, rho_p) inside H_n; the
/// derivative identities express partials of H_n as shifted lower-degree H.
struct SequenceShift {
  std::size_t theta = 0;
  std::size_t sigma = 0;
  std::size_t rho = 0;
};

namespace detail {

inline double binomial(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

inline double ipow(double x, std::size_t e) {
  double r = 1.0;
  while (e) {
    if (e & 1u) r *= x;
    x *= x;
    e >>= 1u;
  }
  return r;
}

}  // namespace detail

/// H_n(u,v,w,z) = sum_{p<=n} sum_{q<=p} sum_{r<=q}
///   C(n,p) C(p,q) C(q,r) theta_r sigma_q rho_p u^r v^(q-r) w^(p-q) z^(n-p).
inline double eval_Hn(const Point4& x, const CoefficientSequences& s,
                      std::size_t n, SequenceShift shift = {}) {
  if (n + shift.theta >= s.theta.size() || n + shift.sigma >= s.sigma.size() ||
      n + shift.rho >= s.rho.size())
    throw std::out_of_range("eval_Hn: sequences shorter than n + 1 + shift");
  double total = 0.0;
  for (std::size_t p = 0; p <= n; ++p) {
    const double cp = detail::binomial(n, p) * s.rho[p + shift.rho] *
                      detail::ipow(x.z, n - p);
    for (std::size_t q = 0; q <= p; ++q) {
      const double cq = detail::binomial(p, q) * s.sigma[q + shift.sigma] *
                        detail::ipow(x.w, p - q);
      for (std::size_t r = 0; r <= q; ++r) {
        total += cp * cq * detail::binomial(q, r) * s.theta[r + shift.theta] *
                 detail::ipow(x.u, r) * detail::ipow(x.v, q - r);
      }
    }
  }
  return total;
}

/// Midpoint quadrature of H_n over the grid: sum_cells H_n * dx * dy.
inline double eval_Ln(const GridState& state, const CoefficientSequences& s,
                      std::size_t n) {
  double sum = 0.0;
  for (std::size_t c = 0; c < state.grid.size(); ++c)
    sum += eval_Hn(state.at(c), s, n);
  return sum * state.grid.cell_area();
}

/// Quadrature of v^p + (D2/D4) z^p.
inline double eval_Kp(const GridState& state, double p, double D2, double D4) {
  if (p < 2.0) throw DomainError("eval_Kp: exponent must be at least 2");
  if (!(D4 != 0.0)) throw DomainError("eval_Kp: D4 must be nonzero");
  const double delta = D2 / D4;
  double sum = 0.0;
  const auto& v = state.fields[1];
  const auto& z = state.fields[3];
  for (std::size_t c = 0; c < v.size(); ++c)
    sum += std::pow(v[c], p) + delta * std::pow(z[c], p);
  return sum * state.grid.cell_area();
}

struct DecayReport {
  bool absorbed = false;
  /// Median of the sup-envelope over the last quartile.
  double plateau = 0.0;
  double tail_max = 0.0;
  /// Block maxima of the input trajectory.
  std::vector<double> envelope;
};

/// Plateau detection on the sup-envelope (block maxima). The trajectory is
/// "absorbed" when the last quartile of the envelope has max <= 1.05 * median.
inline DecayReport decay_monitor(std::span<const double> values,
                                 std::size_t blocks = 40) {
  if (values.size() < 2)
    throw DomainError("decay_monitor: need at least two samples");
  blocks = std::clamp<std::size_t>(blocks, 1, values.size());
  DecayReport rep;
  rep.envelope.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * values.size() / blocks;
    const std::size_t hi = (b + 1) * values.size() / blocks;
    rep.envelope.push_back(
        *std::max_element(values.begin() + static_cast<std::ptrdiff_t>(lo),
                          values.begin() + static_cast<std::ptrdiff_t>(hi)));
  }
  const std::size_t tail = std::max<std::size_t>(1, blocks / 4);
  std::vector<double> last(rep.envelope.end() - static_cast<std::ptrdiff_t>(tail),
                           rep.envelope.end());
  rep.tail_max = *std::max_element(last.begin(), last.end());
  std::sort(last.begin(), last.end());
  const std::size_t m = last.size();
  rep.plateau = m % 2 ? last[m / 2] : 0.5 * (last[m / 2 - 1] + last[m / 2]);
  rep.absorbed = std::isfinite(rep.tail_max) &&
                 rep.tail_max <= 1.05 * rep.plateau;
  return rep;
}

}  // namespace b4
