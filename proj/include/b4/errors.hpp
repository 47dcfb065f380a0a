#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace b4 {

/// Precondition or argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iterative method failed to converge, or a search exhausted its budget.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A field value became non-finite or exceeded the blow-up threshold.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(double time, std::size_t step, std::array<double, 4> max_abs)
      : NumericalError(describe(time, step, max_abs)),
        time_(time),
        step_(step),
        max_abs_(max_abs) {}

  double time() const { return time_; }
  std::size_t step() const { return step_; }
  /// Largest |value| per field (u, v, w, z) at the failing step.
  const std::array<double, 4>& max_abs() const { return max_abs_; }

 private:
  static std::string describe(double time, std::size_t step,
                              const std::array<double, 4>& m) {
    return "blow-up at t=" + std::to_string(time) + " (step " +
           std::to_string(step) + "), max |u|,|v|,|w|,|z| = " +
           std::to_string(m[0]) + ", " + std::to_string(m[1]) + ", " +
           std::to_string(m[2]) + ", " + std::to_string(m[3]);
  }

  double time_;
  std::size_t step_;
  std::array<double, 4> max_abs_;
};

/// Malformed configuration or data file; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace b4
