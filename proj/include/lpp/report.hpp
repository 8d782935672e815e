#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace lpp {

/** Contribution of one (k1, k2) series term to a reported value. */
struct TermRecord {
  int k1 = 0;
  int k2 = 0;
  std::complex<double> value{0.0};  ///< contribution after the z-integral and factorial weights
  double max_abs = 0.0;             ///< largest single quadrature summand
  double runtime_ms = 0.0;
  int nodes = 0;                    ///< nodes per contour used for this term
};

/** A computed value with its diagnostics. */
struct EstimateReport {
  std::string quantity;
  std::complex<double> value{0.0};
  double stderr_value = 0.0;     ///< Monte Carlo standard error, 0 for deterministic values
  double error_estimate = 0.0;   ///< heuristic numerical error (largest omitted or last term)
  std::vector<TermRecord> terms;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
  long long samples = 0;
  std::string diagnostic;

  double imag_residue() const { return std::abs(value.imag()); }
  /** True when the imaginary residue exceeds `rel` times the magnitude of the value. */
  bool imag_residue_exceeds(double rel) const { return imag_residue() > rel * std::abs(value); }
};

/** Wall-clock stopwatch in milliseconds. */
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace lpp
