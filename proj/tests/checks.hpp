#pragma once

// Property checks used both by the module tests and by the acceptance run.
// Each returns the worst observed error (or a pass flag) so the caller owns
// the tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "b4/functionals.hpp"
#include "b4/model.hpp"

namespace b4::test {

inline CoefficientSequences random_sequences(std::mt19937_64& rng, std::size_t len) {
  std::uniform_real_distribution<double> U(0.5, 2.0);
  CoefficientSequences s;
  for (std::size_t i = 0; i < len; ++i) {
    s.theta.push_back(U(rng));
    s.sigma.push_back(U(rng));
    s.rho.push_back(U(rng));
  }
  return s;
}

inline CoefficientSequences ones_sequences(std::size_t len) {
  CoefficientSequences s;
  s.theta.assign(len, 1.0);
  s.sigma.assign(len, 1.0);
  s.rho.assign(len, 1.0);
  return s;
}

inline Point4 random_positive_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.2, 2.0);
  return {U(rng), U(rng), U(rng), U(rng)};
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// Worst relative error of H_n with unit coefficients against (u+v+w+z)^n.
inline double hn_multinomial_error(std::size_t max_n, int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto ones = ones_sequences(max_n + 1);
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const Point4 x = random_positive_point(rng);
    for (std::size_t n = 1; n <= max_n; ++n)
      worst = std::max(worst, rel_err(eval_Hn(x, ones, n),
                                      std::pow(x.u + x.v + x.w + x.z, n)));
  }
  return worst;
}

/// The ten-term quadratic expansion with independent coefficients.
inline double h2_expansion(const Point4& x, const CoefficientSequences& s) {
  const auto& T = s.theta;
  const auto& S = s.sigma;
  const auto& R = s.rho;
  const double u = x.u, v = x.v, w = x.w, z = x.z;
  return T[0] * S[0] * R[0] * z * z + 2 * T[0] * S[0] * R[1] * w * z +
         2 * T[0] * S[1] * R[1] * v * z + 2 * T[1] * S[1] * R[1] * u * z +
         T[0] * S[0] * R[2] * w * w + 2 * T[0] * S[1] * R[2] * v * w +
         2 * T[1] * S[1] * R[2] * u * w + T[0] * S[2] * R[2] * v * v +
         2 * T[1] * S[2] * R[2] * u * v + T[2] * S[2] * R[2] * u * u;
}

inline double h2_expansion_error(int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const auto s = random_sequences(rng, 3);
    const Point4 x = random_positive_point(rng);
    worst = std::max(worst, rel_err(eval_Hn(x, s, 2), h2_expansion(x, s)));
  }
  return worst;
}

struct ShiftErrors {
  double first = 0.0;
  double second = 0.0;
};

/// First partials against n H_{n-1}(shifted) by central differences with step
/// 1e-5; second partials against n(n-1) H_{n-2}(shifted) with step 1e-3.
inline ShiftErrors derivative_shift_errors(std::size_t n, int points,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::array<SequenceShift, 4> first{
      SequenceShift{1, 1, 1}, SequenceShift{0, 1, 1}, SequenceShift{0, 0, 1},
      SequenceShift{0, 0, 0}};
  // Shift for the pair (i, j), i <= j, in the order uu uv uw uz vv vw vz ww wz zz.
  const std::array<std::array<SequenceShift, 4>, 4> second{{
      {SequenceShift{2, 2, 2}, SequenceShift{1, 2, 2}, SequenceShift{1, 1, 2},
       SequenceShift{1, 1, 1}},
      {SequenceShift{}, SequenceShift{0, 2, 2}, SequenceShift{0, 1, 2},
       SequenceShift{0, 1, 1}},
      {SequenceShift{}, SequenceShift{}, SequenceShift{0, 0, 2},
       SequenceShift{0, 0, 1}},
      {SequenceShift{}, SequenceShift{}, SequenceShift{}, SequenceShift{0, 0, 0}},
  }};
  ShiftErrors worst;
  const double nn = static_cast<double>(n);
  for (int it = 0; it < points; ++it) {
    const auto s = random_sequences(rng, n + 3);
    const Point4 x = random_positive_point(rng);
    auto H = [&](Point4 y) { return eval_Hn(y, s, n); };
    auto bump = [](Point4 y, std::size_t k, double h) {
      y[k] += h;
      return y;
    };
    const double h1 = 1e-5;
    for (std::size_t k = 0; k < 4; ++k) {
      const double fd = (H(bump(x, k, h1)) - H(bump(x, k, -h1))) / (2 * h1);
      worst.first = std::max(worst.first, rel_err(fd, nn * eval_Hn(x, s, n - 1, first[k])));
    }
    const double h2 = 1e-3;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i; j < 4; ++j) {
        double fd = 0.0;
        if (i == j) {
          fd = (H(bump(x, i, h2)) - 2 * H(x) + H(bump(x, i, -h2))) / (h2 * h2);
        } else {
          fd = (H(bump(bump(x, i, h2), j, h2)) - H(bump(bump(x, i, h2), j, -h2)) -
                H(bump(bump(x, i, -h2), j, h2)) + H(bump(bump(x, i, -h2), j, -h2))) /
               (4 * h2 * h2);
        }
        const double want = nn * (nn - 1) * eval_Hn(x, s, n - 2, second[i][j]);
        worst.second = std::max(worst.second, rel_err(fd, want));
      }
  }
  return worst;
}

/// Diffusivity quadruples drawn log-uniformly from [lo, hi].
inline std::array<double, 4> random_diffusivities(std::mt19937_64& rng, double lo,
                                                  double hi) {
  std::uniform_real_distribution<double> L(std::log(lo), std::log(hi));
  return {std::exp(L(rng)), std::exp(L(rng)), std::exp(L(rng)), std::exp(L(rng))};
}

struct SylvesterOutcome {
  bool all_positive = true;
  std::size_t matrices = 0;
  double closed_form_err = 0.0;  // worst over Delta^2 and Delta^3
};

/// For each quadruple: feasible triple, decreasing-ratio sequences of length
/// n + 1, and every B_rqp with 0 <= r <= q <= p <= n - 2.
inline SylvesterOutcome sylvester_suite(int quadruples, std::size_t n,
                                        std::uint64_t seed, double lo = 1e-6,
                                        double hi = 1e-4) {
  std::mt19937_64 rng(seed);
  SylvesterOutcome out;
  for (int t = 0; t < quadruples; ++t) {
    const auto D = random_diffusivities(rng, lo, hi);
    const auto triple = feasible_triple(coupling_constants(D[0], D[1], D[2], D[3]));
    const auto seqs = build_sequences(triple, decreasing_seeds(triple, n), n);
    for (std::size_t p = 0; p + 2 <= n; ++p)
      for (std::size_t q = 0; q <= p; ++q)
        for (std::size_t r = 0; r <= q; ++r) {
          const auto M = brqp_matrix(r, q, p, seqs, D[0], D[1], D[2], D[3]);
          const auto m = sylvester_minors(M);
          out.all_positive = out.all_positive && m.all_positive();
          ++out.matrices;
        }
  }
  return out;
}

/// Closed-form Delta^2 and Delta^3 against direct determinants on sequences
/// with random seeds obeying the ratio recurrence.
inline double closed_form_minor_error(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.3, 1.5);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto D = random_diffusivities(rng, 1e-3, 1.0);
    const GeneratorTriple g{U(rng) + 1.0, U(rng) + 1.0, U(rng) + 1.0};
    SequenceSeeds sd;
    sd.theta0 = U(rng);
    sd.sigma0 = U(rng);
    sd.rho0 = U(rng);
    sd.C_theta = U(rng);
    sd.C_sigma = U(rng);
    sd.C_rho = U(rng);
    const std::size_t n = 6;
    const auto seqs = build_sequences(g, sd, n);
    for (std::size_t p = 0; p + 2 <= n; ++p)
      for (std::size_t q = 0; q <= p; ++q)
        for (std::size_t r = 0; r <= q; ++r) {
          const auto M = brqp_matrix(r, q, p, seqs, D[0], D[1], D[2], D[3]);
          const auto direct = sylvester_minors(M);
          const auto closed = brqp_closed_form_minors(r, q, p, seqs, D[0], D[1], D[2], D[3]);
          worst = std::max(worst, rel_err(direct.d2, closed.d2));
          worst = std::max(worst, rel_err(direct.d3, closed.d3));
        }
  }
  return worst;
}

/// Worst relative error of a11^2 (a11 a22 - a12^2) det A = P Q - R^2 over
/// random symmetric matrices with a11 > 0.
inline double schur_identity_error(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Matrix4 A;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) A(i, j) = A(j, i) = U(rng);
    A(0, 0) = std::abs(A(0, 0)) + 0.1;
    const auto st = schur_terms(A);
    const double lhs = A(0, 0) * A(0, 0) * (A(0, 0) * A(1, 1) - A(0, 1) * A(0, 1)) *
                       A.determinant();
    const double rhs = st.P * st.Q - st.R * st.R;
    worst = std::max(worst, rel_err(rhs, lhs));
  }
  return worst;
}

}  // namespace b4::test
