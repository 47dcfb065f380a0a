#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// They deliberately avoid the library's own helpers.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "b4/model.hpp"

namespace b4::test {

/// The four reaction polynomials written out term by term.
inline std::array<double, 4> reaction_oracle(double u, double v, double w,
                                             double z, const SystemParams& p) {
  return {p.alpha - (p.beta + 1.0) * u + u * u * v + p.D1 * (w - u),
          p.beta * u - u * u * v + p.D2 * (z - v),
          p.alpha - (p.beta + 1.0) * w + w * w * z + p.D3 * (u - w),
          p.beta * w - w * w * z + p.D4 * (v - z)};
}

/// Random valid parameter set with moderate magnitudes.
inline SystemParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.1, 5.0);
  std::uniform_real_distribution<double> D(1e-3, 0.5);
  std::uniform_real_distribution<double> diff(1e-7, 1e-2);
  SystemParams p;
  p.alpha = U(rng);
  p.beta = U(rng);
  p.D1 = D(rng);
  p.D2 = D(rng);
  p.D3 = D(rng);
  p.D4 = D(rng);
  p.a = diff(rng);
  p.b = diff(rng);
  p.c = diff(rng);
  p.d = diff(rng);
  return p;
}

/// Logistic map orbit x_{k+1} = 4 x_k (1 - x_k) after a burn-in, together
/// with the orbit average of ln|f'(x)| = ln|4 - 8x|.
struct LogisticOrbit {
  std::vector<double> x;
  double lyapunov_oracle = 0.0;
};

inline LogisticOrbit logistic_orbit(std::size_t n, double x0 = 0.3,
                                    std::size_t burn_in = 1000) {
  LogisticOrbit o;
  double x = x0;
  for (std::size_t i = 0; i < burn_in; ++i) x = 4.0 * x * (1.0 - x);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    o.x.push_back(x);
    acc += std::log(std::abs(4.0 - 8.0 * x));
    x = 4.0 * x * (1.0 - x);
  }
  o.lyapunov_oracle = acc / static_cast<double>(n);
  return o;
}

/// Sine with a non-integer period so no two samples coincide exactly.
inline std::vector<double> sine_series(std::size_t n, double period = 37.3) {
  std::vector<double> s(n);
  const double pi = 3.14159265358979323846;
  for (std::size_t i = 0; i < n; ++i)
    s[i] = std::sin(2.0 * pi * static_cast<double>(i) / period);
  return s;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/// Rows of a CSV file with a header, as doubles.
inline std::vector<std::vector<double>> read_csv(const std::filesystem::path& p,
                                                 std::vector<std::string>* header = nullptr) {
  std::ifstream is(p);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool first = true;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      first = false;
      if (header) *header = cells;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::stod(c));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Fresh scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("b4_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace b4::test
