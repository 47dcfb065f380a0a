#pragma once

// Plain-text solver checkpoint.
//
//   b4-checkpoint <version>
//   params <alpha> <beta> <D1> <D2> <D3> <D4> <a> <b> <c> <d>
//   grid <nx> <ny> <dx> <dy> <neumann|dirichlet>
//   clock <step> <dt>
//   field <u|v|w|z>
//   <ny lines of nx values>        (repeated for the four species)
//
// Reals are written with 17 significant digits, so a reload reproduces every
// double exactly and a resumed run is bit-identical to an uninterrupted one.
// The time of the snapshot is step * dt.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "b4/csv.hpp"
#include "b4/errors.hpp"
#include "b4/model.hpp"

namespace b4 {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  SystemParams params;
  GridState state;
  std::size_t step = 0;
  double dt = 0.0;

  double time() const { return static_cast<double>(step) * dt; }
};

inline void write_checkpoint(std::ostream& os, const Checkpoint& c) {
  const auto& p = c.params;
  const auto& g = c.state.grid;
  os << "b4-checkpoint " << kCheckpointVersion << '\n';
  os << "params";
  for (double x : {p.alpha, p.beta, p.D1, p.D2, p.D3, p.D4, p.a, p.b, p.c, p.d})
    os << ' ' << format_double(x);
  os << '\n';
  os << "grid " << g.nx << ' ' << g.ny << ' ' << format_double(g.dx) << ' '
     << format_double(g.dy) << ' ' << to_string(c.state.bc) << '\n';
  os << "clock " << c.step << ' ' << format_double(c.dt) << '\n';
  for (std::size_t k = 0; k < 4; ++k) {
    os << "field " << kSpeciesNames[k] << '\n';
    const auto& f = c.state.fields[k];
    for (std::size_t j = 0; j < g.ny; ++j) {
      for (std::size_t i = 0; i < g.nx; ++i) {
        if (i) os << ' ';
        os << format_double(f[g.index(i, j)]);
      }
      os << '\n';
    }
  }
}

inline Checkpoint read_checkpoint(std::istream& is) {
  std::size_t line_no = 0;
  std::string line;
  auto next_line = [&]() -> std::istringstream {
    if (!std::getline(is, line))
      throw ParseError(line_no + 1, "checkpoint truncated");
    ++line_no;
    return std::istringstream(line);
  };
  auto expect_tag = [&](std::istringstream& ss, const std::string& tag) {
    std::string got;
    ss >> got;
    if (got != tag)
      throw ParseError(line_no, "expected '" + tag + "', found '" + got + "'");
  };
  auto read_real = [&](std::istringstream& ss) {
    std::string tok;
    if (!(ss >> tok)) throw ParseError(line_no, "missing value");
    char* end = nullptr;
    const double x = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw ParseError(line_no, "not a number: '" + tok + "'");
    return x;
  };

  Checkpoint c;
  {
    auto ss = next_line();
    expect_tag(ss, "b4-checkpoint");
    int version = 0;
    if (!(ss >> version)) throw ParseError(line_no, "missing version");
    if (version != kCheckpointVersion)
      throw ParseError(line_no,
                       "unsupported checkpoint version " + std::to_string(version));
  }
  {
    auto ss = next_line();
    expect_tag(ss, "params");
    auto& p = c.params;
    for (double* x : {&p.alpha, &p.beta, &p.D1, &p.D2, &p.D3, &p.D4, &p.a, &p.b,
                      &p.c, &p.d})
      *x = read_real(ss);
  }
  Grid g;
  BoundaryCondition bc{};
  {
    auto ss = next_line();
    expect_tag(ss, "grid");
    if (!(ss >> g.nx >> g.ny)) throw ParseError(line_no, "bad grid extents");
    g.dx = read_real(ss);
    g.dy = read_real(ss);
    std::string tag;
    ss >> tag;
    if (tag == "neumann")
      bc = BoundaryCondition::Neumann;
    else if (tag == "dirichlet")
      bc = BoundaryCondition::DirichletZero;
    else
      throw ParseError(line_no, "unknown boundary tag '" + tag + "'");
  }
  {
    auto ss = next_line();
    expect_tag(ss, "clock");
    if (!(ss >> c.step)) throw ParseError(line_no, "bad step");
    c.dt = read_real(ss);
  }
  c.state = GridState(g, bc);
  for (std::size_t k = 0; k < 4; ++k) {
    auto head = next_line();
    expect_tag(head, "field");
    std::string name;
    head >> name;
    if (name != kSpeciesNames[k])
      throw ParseError(line_no, "expected field " + std::string(kSpeciesNames[k]));
    for (std::size_t j = 0; j < g.ny; ++j) {
      auto ss = next_line();
      for (std::size_t i = 0; i < g.nx; ++i)
        c.state.fields[k][g.index(i, j)] = read_real(ss);
    }
  }
  return c;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& c) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_checkpoint(os, c);
  if (!os) throw std::runtime_error("write failed for " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path);
  return read_checkpoint(is);
}

}  // namespace b4
