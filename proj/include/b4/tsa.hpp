#pragma once

// Attractor reconstruction from a scalar time series: delay selection from
// the autocorrelation, delay embedding, singular-value noise reduction,
// Grassberger-Procaccia correlation dimension, the iterative embedding loop
// that ties them together, and a nearest-neighbour divergence estimate of the
// largest Lyapunov exponent.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "b4/errors.hpp"
#include "b4/parallel.hpp"

namespace b4::tsa {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// ---------------------------------------------------------------------------
// Delay selection

/// Mean-removed autocorrelation normalized by the lag-0 sum, lags 0..max_lag.
inline std::vector<double> autocorrelation(std::span<const double> x,
                                           std::size_t max_lag) {
  if (x.size() <= max_lag)
    throw DomainError("autocorrelation: series must be longer than max_lag");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  std::vector<double> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = x[i] - mean;
  double var = 0.0;
  for (double v : c) var += v * v;
  if (!(var > 0.0)) throw DomainError("autocorrelation: series has zero variance");
  std::vector<double> acf(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i + k < c.size(); ++i) s += c[i] * c[i + k];
    acf[k] = s / var;
  }
  return acf;
}

/// Smallest lag k >= 1 with acf[k] <= 1/e.
inline std::size_t select_delay(std::span<const double> acf) {
  const double target = std::exp(-1.0);
  for (std::size_t k = 1; k < acf.size(); ++k)
    if (acf[k] <= target) return k;
  throw NumericalError("select_delay: autocorrelation never falls to 1/e within " +
                       std::to_string(acf.empty() ? 0 : acf.size() - 1) +
                       " lags; increase max_lag");
}

// ---------------------------------------------------------------------------
// Embedding

struct EmbeddingMatrix {
  std::size_t m = 1;
  std::size_t tau = 1;
  std::size_t l = 1;
  /// One embedding vector per row: rows(i, j) = series[i*l + j*tau].
  RowMatrix rows;

  std::size_t window() const { return (m - 1) * tau; }
  std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
};

inline std::size_t embedding_rows(std::size_t len, std::size_t m,
                                  std::size_t tau, std::size_t l) {
  return (len - 1 - (m - 1) * tau) / l + 1;
}

inline EmbeddingMatrix embed(std::span<const double> x, std::size_t m,
                             std::size_t tau, std::size_t l = 1) {
  if (m == 0 || tau == 0 || l == 0)
    throw DomainError("embed: m, tau and l must be at least 1");
  if (x.size() < (m - 1) * tau + 1)
    throw DomainError("embed: series too short for m = " + std::to_string(m) +
                      ", tau = " + std::to_string(tau));
  EmbeddingMatrix e;
  e.m = m;
  e.tau = tau;
  e.l = l;
  const std::size_t s = embedding_rows(x.size(), m, tau, l);
  e.rows.resize(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < m; ++j)
      e.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          x[i * l + j * tau];
  return e;
}

// ---------------------------------------------------------------------------
// Singular-value reduction

/// Singular values below this fraction of the largest are roundoff from the
/// second-moment route and count as exact zeros, whatever the threshold.
inline constexpr double kRankFloor = 1e-7;

struct SvdReduction {
  /// Centered rows projected on the kept right-singular directions.
  RowMatrix coords;
  std::size_t kept = 0;
  /// Singular values of the centered matrix, descending.
  std::vector<double> singular_values;
  /// singular_values / singular_values[0].
  std::vector<double> relative;
  /// Right-singular directions as columns, same order as singular_values.
  Eigen::MatrixXd directions;
  Eigen::RowVectorXd column_mean;
};

/// Keeps directions whose relative singular value is >= threshold. The SVD is
/// taken through the symmetric eigendecomposition of the m x m second-moment
/// matrix of the centered columns.
inline SvdReduction svd_reduce(const RowMatrix& Y, double threshold) {
  if (Y.rows() < Y.cols() || Y.cols() == 0)
    throw DomainError("svd_reduce: need at least m rows");
  SvdReduction out;
  out.column_mean = Y.colwise().mean();
  const RowMatrix centered = Y.rowwise() - out.column_mean;
  const Eigen::MatrixXd moment = centered.transpose() * centered;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(moment);
  if (es.info() != Eigen::Success)
    throw NumericalError("svd_reduce: eigendecomposition failed");
  const auto m = static_cast<std::size_t>(Y.cols());
  out.directions.resize(Y.cols(), Y.cols());
  for (std::size_t i = 0; i < m; ++i) {
    // SelfAdjointEigenSolver sorts ascending; reverse for descending order.
    const auto src = static_cast<Eigen::Index>(m - 1 - i);
    out.singular_values.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(src))));
    out.directions.col(static_cast<Eigen::Index>(i)) = es.eigenvectors().col(src);
  }
  const double top = out.singular_values.front();
  if (!(top > 0.0))
    throw DomainError("svd_reduce: degenerate embedding (all rows identical)");
  for (double s : out.singular_values) {
    const double rel = s / top;
    out.relative.push_back(rel);
    if (rel >= threshold && rel > kRankFloor) ++out.kept;
  }
  out.coords = centered * out.directions.leftCols(static_cast<Eigen::Index>(out.kept));
  return out;
}

inline SvdReduction svd_reduce(const EmbeddingMatrix& e, double threshold) {
  return svd_reduce(e.rows, threshold);
}

// ---------------------------------------------------------------------------
// Correlation integral

/// Number of pairs (i, j), i < j, with j - i > theiler.
inline double eligible_pairs(std::size_t M, std::size_t theiler) {
  if (M <= theiler + 1) return 0.0;
  const double k = static_cast<double>(M - theiler - 1);
  return 0.5 * k * (k + 1.0);
}

/// C(r) = #{(i,j): i < j, j - i > theiler, ||y_i - y_j||_inf < r} divided by
/// the number of eligible pairs. Radii must be ascending.
inline std::vector<double> correlation_integral(const RowMatrix& pts,
                                                std::span<const double> radii,
                                                std::size_t theiler) {
  if (radii.empty()) return {};
  if (!std::is_sorted(radii.begin(), radii.end()) || !(radii.front() > 0.0))
    throw DomainError("correlation_integral: radii must be positive ascending");
  const auto M = static_cast<std::size_t>(pts.rows());
  const auto dim = static_cast<Eigen::Index>(pts.cols());
  const double total = eligible_pairs(M, theiler);
  if (total <= 0.0)
    throw DomainError("correlation_integral: fewer than one usable pair");
  const double rmax = radii.back();
  const std::size_t nr = radii.size();
  const std::size_t workers = worker_count();
  // Per-chunk histograms of the first radius index exceeding each distance;
  // integer counts make the combined result independent of the split.
  std::vector<std::vector<std::uint64_t>> hist(
      std::max<std::size_t>(1, std::min(workers, M)),
      std::vector<std::uint64_t>(nr + 1, 0));
  parallel_chunks(M, workers, [&](std::size_t lo, std::size_t hi,
                                  std::size_t chunk) {
    auto& h = hist[chunk];
    for (std::size_t i = lo; i < hi; ++i) {
      const double* yi = pts.row(static_cast<Eigen::Index>(i)).data();
      for (std::size_t j = i + theiler + 1; j < M; ++j) {
        const double* yj = pts.row(static_cast<Eigen::Index>(j)).data();
        double dist = 0.0;
        for (Eigen::Index k = 0; k < dim && dist < rmax; ++k)
          dist = std::max(dist, std::abs(yi[k] - yj[k]));
        if (dist >= rmax) continue;
        const auto bin = static_cast<std::size_t>(
            std::upper_bound(radii.begin(), radii.end(), dist) - radii.begin());
        ++h[bin];
      }
    }
  });
  std::vector<double> C(nr);
  std::uint64_t running = 0;
  for (std::size_t k = 0; k < nr; ++k) {
    for (const auto& h : hist) running += h[k];
    C[k] = static_cast<double>(running) / total;
  }
  return C;
}

/// `count` log-spaced radii between the 1st and 50th percentiles of up to
/// `samples` randomly drawn eligible pair distances (max norm). Distances at
/// roundoff level relative to the median are left out of the percentiles.
inline std::vector<double> radii_grid(const RowMatrix& pts, std::size_t theiler,
                                      std::size_t count = 40,
                                      std::uint64_t seed = 7,
                                      std::size_t samples = 20000) {
  const auto M = static_cast<std::size_t>(pts.rows());
  const double total = eligible_pairs(M, theiler);
  if (total <= 0.0 || count < 2)
    throw DomainError("radii_grid: not enough points for the Theiler window");
  auto dist = [&](std::size_t i, std::size_t j) {
    return (pts.row(static_cast<Eigen::Index>(i)) -
            pts.row(static_cast<Eigen::Index>(j)))
        .cwiseAbs()
        .maxCoeff();
  };
  std::vector<double> d;
  if (total <= static_cast<double>(samples)) {
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = i + theiler + 1; j < M; ++j) d.push_back(dist(i, j));
  } else {
    std::mt19937_64 rng(seed);
    d.reserve(samples);
    while (d.size() < samples) {
      const std::size_t i = rng() % M;
      const std::size_t j = rng() % M;
      const std::size_t gap = i > j ? i - j : j - i;
      if (gap > theiler) d.push_back(dist(i, j));
    }
  }
  std::sort(d.begin(), d.end());
  const double median = d[d.size() / 2];
  std::erase_if(d, [&](double x) { return !(x > 1e-12 * median); });
  if (d.size() < 2) throw DomainError("radii_grid: degenerate pair distances");
  auto pct = [&](double q) {
    return d[static_cast<std::size_t>(q * static_cast<double>(d.size() - 1))];
  };
  const double lo = pct(0.01);
  const double hi = pct(0.50);
  if (!(hi > lo)) throw DomainError("radii_grid: degenerate pair distances");
  std::vector<double> r(count);
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (std::size_t k = 0; k < count; ++k)
    r[k] = std::exp(llo + (lhi - llo) * static_cast<double>(k) /
                              static_cast<double>(count - 1));
  return r;
}

// ---------------------------------------------------------------------------
// Correlation dimension

struct DimensionFit {
  double d = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  double r2 = 0.0;
  /// Best window has R^2 < 0.95 or could not span half a decade.
  bool low_confidence = false;
  /// Indices into the input radii of the fitted window (inclusive).
  std::size_t first = 0;
  std::size_t last = 0;
};

inline constexpr std::size_t kMinWindowPoints = 5;
inline constexpr double kMinWindowDecades = 0.5;

/// Slope of log C against log r over the contiguous window (>= 5 points,
/// >= 0.5 decades) with the best linear-fit R^2; ties go to the wider window.
inline DimensionFit correlation_dimension(std::span<const double> r,
                                          std::span<const double> C) {
  if (r.size() != C.size())
    throw DomainError("correlation_dimension: r and C differ in length");
  std::vector<double> lx, ly;
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (C[k] > 0.0 && r[k] > 0.0) {
      lx.push_back(std::log10(r[k]));
      ly.push_back(std::log10(C[k]));
      idx.push_back(k);
    }
  }
  if (lx.size() < 8)
    throw DomainError("correlation_dimension: need at least 8 radii with C > 0");

  struct Line {
    double slope = 0.0;
    double r2 = 0.0;
  };
  auto fit = [&](std::size_t a, std::size_t b) {  // [a, b)
    const double n = static_cast<double>(b - a);
    double sx = 0, sy = 0;
    for (std::size_t k = a; k < b; ++k) {
      sx += lx[k];
      sy += ly[k];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = a; k < b; ++k) {
      sxx += (lx[k] - mx) * (lx[k] - mx);
      sxy += (lx[k] - mx) * (ly[k] - my);
      syy += (ly[k] - my) * (ly[k] - my);
    }
    Line line;
    line.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    line.r2 = (sxx > 0.0 && syy > 0.0)
                  ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0)
                  : 0.0;
    return line;
  };

  const std::size_t n = lx.size();
  DimensionFit best;
  bool found = false;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + kMinWindowPoints; b <= n; ++b) {
      if (lx[b - 1] - lx[a] < kMinWindowDecades) continue;
      const Line line = fit(a, b);
      const bool wider = (b - a) > (best.last - best.first + 1);
      if (!found || line.r2 > best.r2 + 1e-12 ||
          (std::abs(line.r2 - best.r2) <= 1e-12 && wider)) {
        best.d = line.slope;
        best.r2 = line.r2;
        best.first = a;
        best.last = b - 1;
        found = true;
      }
    }
  }
  if (!found) {
    const Line line = fit(0, n);
    best.d = line.slope;
    best.r2 = line.r2;
    best.first = 0;
    best.last = n - 1;
    best.low_confidence = true;
  }
  if (best.r2 < 0.95) best.low_confidence = true;
  best.r_lo = r[idx[best.first]];
  best.r_hi = r[idx[best.last]];
  best.first = idx[best.first];
  best.last = idx[best.last];
  return best;
}

// ---------------------------------------------------------------------------
// Iterative embedding / dimension loop

struct AlbanoConfig {
  /// Lags of the autocorrelation; 0 picks min(len / 4, 5000).
  std::size_t max_lag = 0;
  /// Initial window (m - 1) tau as a multiple of the correlation time.
  double window_factor = 4.0;
  double svd_threshold = 1e-2;
  std::size_t m_max = 50;
  std::optional<std::size_t> theiler;
  /// Sampling interval between embedding vectors, in samples.
  std::size_t l = 1;
  /// Point cap; longer embeddings are subsampled with a uniform stride.
  std::size_t max_points = 20000;
  std::size_t radii = 40;
  /// Refinement scans m in [m_takens, m_takens + refine_span].
  std::size_t refine_span = 10;
  std::uint64_t seed = 7;
};

struct DimensionAttempt {
  std::size_t m = 0;
  std::size_t kept = 0;
  DimensionFit fit;
};

struct DimensionReport {
  double d = 0.0;
  std::size_t m_used = 0;
  std::size_t tau = 0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  double fit_r2 = 0.0;
  bool low_confidence = false;
  std::vector<double> singular_values;
  std::size_t kept = 0;
  bool takens_ok = false;
  std::size_t theiler = 0;
  std::vector<double> acf;
  /// Correlation integral at m_used.
  std::vector<double> radii;
  std::vector<double> cint;
  std::vector<DimensionAttempt> attempts;
};

namespace detail {

struct DimensionAtM {
  DimensionFit fit;
  SvdReduction svd;
  std::vector<double> radii;
  std::vector<double> cint;
  std::size_t theiler = 0;
};

inline DimensionAtM dimension_at(std::span<const double> x, std::size_t m,
                                 std::size_t tau, const AlbanoConfig& cfg) {
  DimensionAtM out;
  const std::size_t len_rows = embedding_rows(x.size(), m, tau, cfg.l);
  const std::size_t stride =
      len_rows > cfg.max_points ? (len_rows + cfg.max_points - 1) / cfg.max_points : 1;
  const auto e = embed(x, m, tau, cfg.l * stride);
  out.svd = svd_reduce(e, cfg.svd_threshold);
  const std::size_t window_samples = cfg.theiler ? *cfg.theiler : tau * m;
  const std::size_t row_gap = cfg.l * stride;
  out.theiler = (window_samples + row_gap - 1) / row_gap;
  out.radii = radii_grid(out.svd.coords, out.theiler, cfg.radii, cfg.seed);
  out.cint = correlation_integral(out.svd.coords, out.radii, out.theiler);
  out.fit = correlation_dimension(out.radii, out.cint);
  return out;
}

}  // namespace detail

/// Delay from the 1/e autocorrelation time, an initial m whose window spans
/// `window_factor` correlation times, SVD reduction, correlation dimension;
/// m grows until m > 2d + 1, then the m with the straightest log-log fit in
/// the refinement range is kept.
inline DimensionReport albano_dimension(std::span<const double> x,
                                        const AlbanoConfig& cfg = {}) {
  DimensionReport rep;
  const std::size_t max_lag =
      cfg.max_lag ? cfg.max_lag : std::min<std::size_t>(x.size() / 4, 5000);
  rep.acf = autocorrelation(x, max_lag);
  const std::size_t tau = select_delay(rep.acf);
  rep.tau = tau;
  const double corr_time = static_cast<double>(tau);
  const std::size_t m0 = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(cfg.window_factor * corr_time /
                                            static_cast<double>(tau))) + 1);
  auto fits = [&](std::size_t m) {
    return x.size() >= (m - 1) * tau + 1 &&
           embedding_rows(x.size(), m, tau, cfg.l) > 2 * m + 10;
  };
  if (!fits(m0)) throw DomainError("albano_dimension: series too short");

  std::optional<std::size_t> m_takens;
  std::size_t m_last = m0;
  for (std::size_t m = m0; m <= cfg.m_max && fits(m); ++m) {
    const auto r = detail::dimension_at(x, m, tau, cfg);
    rep.attempts.push_back({m, r.svd.kept, r.fit});
    m_last = m;
    if (static_cast<double>(m) > 2.0 * r.fit.d + 1.0) {
      m_takens = m;
      break;
    }
  }

  std::size_t best_m = m_last;
  if (m_takens) {
    double best_r2 = -1.0;
    for (std::size_t m = *m_takens;
         m <= std::min(*m_takens + cfg.refine_span, cfg.m_max) && fits(m); ++m) {
      const DimensionAttempt* known = nullptr;
      for (const auto& a : rep.attempts)
        if (a.m == m) known = &a;
      DimensionFit f;
      if (known) {
        f = known->fit;
      } else {
        const auto r = detail::dimension_at(x, m, tau, cfg);
        rep.attempts.push_back({m, r.svd.kept, r.fit});
        f = r.fit;
      }
      if (f.r2 > best_r2 + 1e-12) {
        best_r2 = f.r2;
        best_m = m;
      }
    }
  }

  const auto final = detail::dimension_at(x, best_m, tau, cfg);
  rep.d = final.fit.d;
  rep.m_used = best_m;
  rep.r_lo = final.fit.r_lo;
  rep.r_hi = final.fit.r_hi;
  rep.fit_r2 = final.fit.r2;
  rep.low_confidence = final.fit.low_confidence;
  rep.singular_values = final.svd.relative;
  rep.kept = final.svd.kept;
  rep.theiler = final.theiler;
  rep.radii = final.radii;
  rep.cint = final.cint;
  rep.takens_ok = m_takens.has_value() &&
                  static_cast<double>(best_m) >= 2.0 * rep.d + 1.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Largest Lyapunov exponent

struct LyapunovConfig {
  /// Temporal exclusion for neighbour search, in samples; 0 picks tau * m.
  std::size_t theiler = 0;
  /// Steps the divergence is followed; 0 picks max(10, 4 tau).
  std::size_t horizon = 0;
  /// First step of the fitted region (skips the neighbour-alignment jump).
  std::size_t fit_start = 1;
  /// The fit ends where the mean log divergence has covered this fraction of
  /// its total rise, when that rise exceeds ln 2; otherwise the whole horizon.
  double fit_fraction = 0.5;
  std::size_t min_fit_steps = 3;
  /// Neighbours closer than this fraction of the series RMS are ignored.
  double min_separation = 1e-9;
  /// Time between samples; the exponent is reported per unit time.
  double sample_dt = 1.0;
  /// Reference points (evenly spaced) whose neighbours are followed.
  std::size_t max_references = 2000;
};

struct EmbedParams {
  std::size_t m = 2;
  std::size_t tau = 1;
};

struct LyapunovResult {
  double lambda = 0.0;
  /// Mean log separation against step k = 0..horizon.
  std::vector<double> divergence;
  std::size_t fit_first = 0;
  std::size_t fit_last = 0;
  std::size_t references = 0;
};

/// Mean log-divergence of nearest-neighbour pairs in the delay embedding,
/// slope fitted over the initial linear region.
inline LyapunovResult largest_lyapunov(std::span<const double> x,
                                       const EmbedParams& ep,
                                       const LyapunovConfig& cfg = {}) {
  const auto e = embed(x, ep.m, ep.tau, 1);
  const std::size_t M = e.size();
  if (M < 200)
    throw DomainError("largest_lyapunov: need at least 200 embedded points");
  const std::size_t horizon =
      cfg.horizon ? cfg.horizon : std::max<std::size_t>(10, 4 * ep.tau);
  const std::size_t theiler = cfg.theiler ? cfg.theiler : ep.tau * ep.m;
  if (M <= horizon + theiler + 2)
    throw DomainError("largest_lyapunov: series too short for the horizon");
  const std::size_t usable = M - horizon;

  double rms = 0.0;
  for (double v : x) rms += v * v;
  rms = std::sqrt(rms / static_cast<double>(x.size()));
  const double floor_dist = cfg.min_separation * std::max(rms, 1e-300);

  const std::size_t refs = std::min(cfg.max_references, usable);
  const std::size_t workers = worker_count();
  const std::size_t nchunks = std::max<std::size_t>(1, std::min(workers, refs));
  std::vector<std::vector<double>> sums(nchunks,
                                        std::vector<double>(horizon + 1, 0.0));
  std::vector<std::vector<std::uint64_t>> counts(
      nchunks, std::vector<std::uint64_t>(horizon + 1, 0));
  std::vector<std::uint64_t> found(nchunks, 0);
  const auto& Y = e.rows;
  parallel_chunks(refs, workers, [&](std::size_t lo, std::size_t hi,
                                     std::size_t chunk) {
    for (std::size_t rix = lo; rix < hi; ++rix) {
      const std::size_t i = rix * usable / refs;
      const auto yi = Y.row(static_cast<Eigen::Index>(i));
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_j = usable;
      for (std::size_t j = 0; j < usable; ++j) {
        const std::size_t gap = i > j ? i - j : j - i;
        if (gap <= theiler) continue;
        const double dd = (Y.row(static_cast<Eigen::Index>(j)) - yi).squaredNorm();
        if (dd < best && dd > floor_dist * floor_dist) {
          best = dd;
          best_j = j;
        }
      }
      if (best_j == usable) continue;
      ++found[chunk];
      for (std::size_t k = 0; k <= horizon; ++k) {
        const double dk = (Y.row(static_cast<Eigen::Index>(i + k)) -
                           Y.row(static_cast<Eigen::Index>(best_j + k)))
                              .norm();
        if (dk > 0.0) {
          sums[chunk][k] += std::log(dk);
          ++counts[chunk][k];
        }
      }
    }
  });

  std::uint64_t pairs = 0;
  for (auto f : found) pairs += f;
  if (pairs < 10)
    throw NumericalError("largest_lyapunov: insufficient nearest neighbours");

  LyapunovResult res;
  res.references = static_cast<std::size_t>(pairs);
  res.divergence.assign(horizon + 1, 0.0);
  for (std::size_t k = 0; k <= horizon; ++k) {
    double s = 0.0;
    std::uint64_t c = 0;
    for (std::size_t ch = 0; ch < nchunks; ++ch) {
      s += sums[ch][k];
      c += counts[ch][k];
    }
    res.divergence[k] = c ? s / static_cast<double>(c) : 0.0;
  }

  const auto& S = res.divergence;
  const std::size_t k0 = std::min(cfg.fit_start, horizon - 1);
  const double top = *std::max_element(S.begin() + static_cast<std::ptrdiff_t>(k0),
                                       S.end());
  const double rise = top - S[k0];
  std::size_t k1 = horizon;
  if (rise > std::numbers::ln2) {
    const double target = S[k0] + cfg.fit_fraction * rise;
    for (std::size_t k = k0; k <= horizon; ++k) {
      if (S[k] >= target) {
        k1 = k;
        break;
      }
    }
    k1 = std::min(horizon, std::max(k1, k0 + cfg.min_fit_steps));
  }
  double sx = 0, sy = 0;
  const double n = static_cast<double>(k1 - k0 + 1);
  for (std::size_t k = k0; k <= k1; ++k) {
    sx += static_cast<double>(k);
    sy += S[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = k0; k <= k1; ++k) {
    sxx += (static_cast<double>(k) - mx) * (static_cast<double>(k) - mx);
    sxy += (static_cast<double>(k) - mx) * (S[k] - my);
  }
  res.lambda = (sxy / sxx) / cfg.sample_dt;
  res.fit_first = k0;
  res.fit_last = k1;
  return res;
}

}  // namespace b4::tsa
