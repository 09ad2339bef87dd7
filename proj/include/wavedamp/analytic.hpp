#pragma once

// Closed-form transfer functions of the damped string with one point damper.
//
// With z = sqrt((s^2 + d s) / k) every returned quantity is an even function
// of z, so the principal square root is used throughout. Hyperbolic functions
// are carried as (mantissa, log-scale) pairs: all of beta1, beta2, gamma and
// eta share the factor exp(|Re z| l), which cancels in every ratio.

#include <vector>

#include "wavedamp/types.hpp"

namespace wavedamp {

// Selects the square root used for z. Negated exists so callers can verify
// that results do not depend on the branch.
enum class RootBranch { Principal, Negated };

enum class LimitCase {
  AtZero,        // s -> 0 (removable singularity)
  NoDamping,     // g = 0, equivalently p -> 0 or p -> l
  InfiniteGain,  // g -> infinity
};

// Below |z| l < kSeriesSwitch the output transfer functions are evaluated
// from their Taylor expansion in z^2.
inline constexpr double kSeriesSwitch = 0.1;

// Relative threshold for declaring eta = 0.
inline constexpr double kEtaGuard = 1e-13;

struct AuxQuantities {
  Complex z;
  // beta1 = exp(log_scale) * beta1_scaled, and likewise for the others.
  Complex beta1_scaled;
  Complex beta2_scaled;
  Complex gamma_scaled;
  Complex eta_scaled;
  double log_scale = 0.0;
  // |k z| cosh(Re z l) + |g s| cosh(Re z p) cosh(Re z (l - p)), same scale
  // as eta. cosh(Re w) bounds |sinh w|, so a sinh that cancels is detected.
  double eta_magnitude_scaled = 0.0;

  Complex beta1() const;
  Complex beta2() const;
  Complex gamma() const;
  Complex eta() const;

  // True when |eta| is below kEtaGuard relative to its two terms.
  bool eta_vanishes() const;
};

Complex wave_number(Complex s, const StringParams& params,
                    RootBranch branch = RootBranch::Principal);

AuxQuantities aux_quantities(Complex s, const StringParams& params,
                             const Damper& damper,
                             RootBranch branch = RootBranch::Principal);

// Displacement transfer function for b = 1 and homogeneous Dirichlet ends.
// x == p is evaluated on the left branch.
Complex uniform_g(double x, Complex s, const StringParams& params,
                  const Damper& damper,
                  RootBranch branch = RootBranch::Principal);

// Average-displacement output for uniform forcing. H(0) = l^2 / (12 k).
Complex uniform_h(Complex s, const StringParams& params, const Damper& damper,
                  RootBranch branch = RootBranch::Principal);

// Displacement transfer function for a unit input on the left boundary.
Complex boundary_g(double x, Complex s, const StringParams& params,
                   const Damper& damper,
                   RootBranch branch = RootBranch::Principal);

// Average-displacement output for boundary forcing. H(0) = 1/2.
Complex boundary_h(Complex s, const StringParams& params, const Damper& damper,
                   RootBranch branch = RootBranch::Principal);

Complex displacement_g(double x, Complex s, const StringParams& params,
                       const Damper& damper, Forcing forcing,
                       RootBranch branch = RootBranch::Principal);

Complex output_h(Complex s, const StringParams& params, const Damper& damper,
                 Forcing forcing, RootBranch branch = RootBranch::Principal);

// Closed-form limits. For AtZero the argument s is ignored; the other cases
// reject s with s (s + d) = 0 since their closed form is 0/0 there.
Complex limit_h(Complex s, const StringParams& params, const Damper& damper,
                Forcing forcing, LimitCase which);

// (1/l) * integral of G over [0, l], using an n_points Gauss-Legendre rule
// on [0, p] and another on [p, l]. n_points >= 16.
Complex h_from_g_quadrature(Complex s, const StringParams& params,
                            const Damper& damper, Forcing forcing,
                            int n_points);

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

}  // namespace wavedamp
