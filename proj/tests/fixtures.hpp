#pragma once

// Reference values produced by tests/oracle/pcf_oracle.py (brute force over
// all cells, dense numpy linear algebra) and frozen here.

#include <string>

namespace fixtures {

inline std::string data(const std::string& name) { return std::string(PCF_DATA_DIR) + "/" + name; }

// Sierpinski gasket, r = 3/5.
inline constexpr double sg_A1[3][3] = {{1.0, 0.0, 0.0}, {0.4, 0.4, 0.2}, {0.4, 0.2, 0.4}};
inline constexpr double sg_A1_spectrum[3] = {1.0, 0.6, 0.2};
inline constexpr double sg_ext_100[6] = {1.0, 0.4, 0.4, 0.0, 0.2, 0.0};  // V_1 in id order
inline constexpr double sg_cell_energy_100[3] = {18.0 / 25, 6.0 / 25, 6.0 / 25};
inline constexpr double sg_masses_100[3] = {2.4, 0.8, 0.8};
inline constexpr int sg_vertex_counts[4] = {3, 6, 15, 42};
inline constexpr int vicsek_vertex_counts[4] = {4, 16, 76, 376};

// Mean-zero harmonic family on the gasket, uniform mu.
inline constexpr double sg_family[2][3] = {{1.0 / 3, -1.0 / 6, -1.0 / 6},
                                           {0.0, 0.28867513459481287, -0.28867513459481287}};

// Rank profile of that family with a = (1/2, 1/2): (mean lambda2, mean residual).
struct ProfilePoint {
  int depth;
  double lambda2;
  double residual;
};
inline constexpr ProfilePoint sg_profile[3] = {{2, 0.041037265308587235, 0.053613019071464554},
                                               {6, 0.0026222388888234817, 0.0035387455973626765},
                                               {10, 0.00017389889876911368, 0.00023222341867928624}};
// Oracle ratio n=2 -> n=10 is about 236 (lambda2) and 231 (residual); the acceptance factor F.
inline constexpr double sg_decay_factor = 100.0;

// Vicsek harmonic family (k = 3), uniform weights.
inline constexpr ProfilePoint vicsek_profile[2] = {{2, 0.03703703703703725, 0.09072184232530367},
                                                   {4, 0.0041152263374590325, 0.010080204702863612}};
inline constexpr double vicsek_A1[4][4] = {{1.0, 0.0, 0.0, 0.0},
                                           {0.75, 1.0 / 12, 1.0 / 12, 1.0 / 12},
                                           {0.5, 1.0 / 6, 1.0 / 6, 1.0 / 6},
                                           {0.75, 1.0 / 12, 1.0 / 12, 1.0 / 12}};

// Run mass on the gasket, i = 1: u = (1,0,0) sits at its limit 4 for every n; the generic
// u = (0.3,-1.1,0.8) tends to 0.81 with consecutive-difference ratio 1/9 = (rho_2 / r)^2.
inline constexpr double run_mass_limit_100 = 4.0;
inline constexpr double run_mass_limit_generic = 0.81;
inline constexpr double run_mass_rate = 1.0 / 9;

// Chain rule, G = x1^2 on the harmonic family: relative gap for m = 3..9.
inline constexpr double chain_gap[7] = {0.2618, 0.1462, 0.0776, 0.0398, 0.0200, 0.00989, 0.00485};

}  // namespace fixtures
