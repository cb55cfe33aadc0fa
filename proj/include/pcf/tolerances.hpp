#pragma once

#include <cstddef>

namespace pcf {

/// All numeric thresholds in one place so tests can tighten them.
struct Tolerances {
  double symmetry = 1e-12;          // |D - D^t| entrywise
  double laplacian = 1e-10;         // eigenvalue sign checks on D
  double fixed_point = 1e-10;       // renormalization residual
  double eigen_gap = 1e-9;          // simplicity of 1 and r_i in spec(A_i)
  double eigen_sign = 1e-9;         // mixed-sign tolerance on v_i, relative to |v_i|
  double normalization = 1e-10;     // 2E(e_i) = 1 for family members
  double weight_sum = 1e-12;        // sum of a_i
  double mass_floor = 1e-14;        // skip cells with lambda mass below this fraction
  double psd = 1e-10;               // min eigenvalue >= -psd * trace
  double trace_identity = 1e-12;    // |sum a_i Z^ii - 1|
  double representing = 1e-10;      // sum h_i zeta_i = 1 and s <= 1 + tol
  double consistency = 1e-12;       // refinement sums, relative
  double tau_rank = 0.05;           // eigenvalue fraction counted toward dimension
  std::size_t max_cells = std::size_t{1} << 22;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace pcf
