#pragma once

#include <functional>

#include "wavedamp/types.hpp"

namespace wavedamp {

// omega -> H(i omega), sampled for omega >= 0 only; |H(-i omega)| = |H(i omega)|
// is assumed.
using FrequencyResponse = std::function<Complex(double omega)>;

// Asymptotic decay of |H(i omega)| beyond omega_max, used for the H2 tail.
enum class TailDecay { InverseOmega, InverseOmegaSq };

struct NormConfig {
  double omega_max = 5.0 * 3.14159265358979323846;
  double quad_rel_tol = 1e-6;
  int peak_samples_per_mode = 16;
  int refine_iters = 50;
  TailDecay tail_decay = TailDecay::InverseOmegaSq;
  // Initial Gauss-Kronrod panels on [0, omega_max] before adaptive splitting.
  int h2_panels = 256;
  // Recursion depth allowed per initial panel.
  int h2_max_depth = 12;
  // When positive, fit_to_damper raises omega_max to this many fundamentals
  // pi*sqrt(k)/min(p, l - p) of the shorter damper segment. Below that
  // frequency the segment has not started to resonate and the tail fit is
  // meaningless.
  double segment_cover = 0.0;

  void validate() const;
};

// omega_max = 50 modal spacings; tail class from the forcing's asymptotics
// (uniform ~ 1/omega^2, boundary ~ 1/omega). Boundary forcing also sets
// segment_cover, since its slow tail is dominated by the short segment.
NormConfig default_norm_config(const StringParams& params, Forcing forcing);

// cfg with omega_max widened per segment_cover for this damper.
NormConfig fit_to_damper(const NormConfig& cfg, const StringParams& params,
                         const Damper& damper);

struct HinfResult {
  double value = 0.0;
  double argmax_omega = 0.0;
};

// Dense scan paced by the modal spacing, then golden-section refinement of
// each local maximum. omega = 0 is always a candidate.
HinfResult hinf_norm(const FrequencyResponse& resp, const StringParams& params,
                     const NormConfig& cfg);

struct H2Result {
  double value = 0.0;
  // (1/pi) * integral of |H|^2 over [0, omega_max].
  double truncated_square = 0.0;
  // (1/pi) * closed-form integral of the fitted asymptote beyond omega_max.
  double tail_square = 0.0;
  double quadrature_error = 0.0;

  // value - sqrt(truncated_square): the tail's share of the reported norm.
  double tail_bound() const;
};

H2Result h2_norm_detailed(const FrequencyResponse& resp, const NormConfig& cfg);

double h2_norm(const FrequencyResponse& resp, const NormConfig& cfg);

}  // namespace wavedamp
