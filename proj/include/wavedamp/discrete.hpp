#pragma once

#include <vector>

#include "wavedamp/types.hpp"

namespace wavedamp {

// Finite-difference semi-discretization on the grid x_i = i h, i = 0..n,
// h = l / n. The unknowns are the n - 1 interior displacements, so
// M q'' + D q' + K q = B u with
//   M = I, K = (k / h^2) tridiag(-1, 2, -1), D = d I + (g / h) e_j e_j^T,
// and output y = C q + feedthrough * u.
struct SecondOrderSystem {
  int n = 0;  // grid intervals
  double h = 0.0;
  double mass = 1.0;
  double stiffness_diag = 0.0;     // 2 k / h^2
  double stiffness_offdiag = 0.0;  // -k / h^2
  double internal_damping = 0.0;
  int damper_node = 1;  // grid index j in [1, n - 1]
  double damper_gain_scaled = 0.0;
  std::vector<double> input_vec;
  std::vector<double> output_vec;
  double feedthrough = 0.0;

  int dimension() const { return n - 1; }
};

// Damper snapped to the nearest grid node. Uniform: B = 1, C = (1/n) 1.
// Boundary: B = (k/h^2) e_1, C = (h/l) 1 plus feedthrough h/(2l) from the
// trapezoid weight of q_0 = u.
SecondOrderSystem discretize(int n, const StringParams& params,
                             const Damper& damper, Forcing forcing);

// C (s^2 M + s D + K)^{-1} B + feedthrough. O(n): tridiagonal solve with a
// Sherman-Morrison correction for the damper.
Complex discrete_tf(const SecondOrderSystem& sys, Complex s);

inline constexpr int kLyapunovMaxGrid = 400;

// H2 norm from the controllability Gramian of the companion realization
// [0 I; -K -D], [0; B], [C 0].
double discrete_h2_lyapunov(const SecondOrderSystem& sys,
                            int max_grid = kLyapunovMaxGrid);

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  Complex discrete;
  Complex analytic;
  double abs_error = 0.0;
};

std::vector<ConvergenceRow> convergence_study(const StringParams& params,
                                              const Damper& damper,
                                              Forcing forcing, Complex s,
                                              const std::vector<int>& n_list);

// Least-squares slope of log(abs_error) against log(h). Requires >= 2 rows
// with distinct h and nonzero error.
double fitted_order(const std::vector<ConvergenceRow>& rows);

}  // namespace wavedamp
