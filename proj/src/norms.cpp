#include "wavedamp/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace wavedamp {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;

// Fraction of omega_max over which the tail asymptote is fitted.
constexpr double kTailWindow = 0.1;

double magnitude(const FrequencyResponse& resp, double omega) {
  Complex h;
  try {
    h = resp(omega);
  } catch (const PoleEncountered& e) {
    throw NormDiverged("pole on the imaginary axis at omega = " +
                       std::to_string(omega) + ": " + e.what());
  }
  const double m = std::abs(h);
  if (!std::isfinite(m)) {
    throw NormDiverged("non-finite response at omega = " + std::to_string(omega));
  }
  return m;
}

struct Peak {
  double omega;
  double value;
};

Peak golden_maximize(const FrequencyResponse& resp, double lo, double hi,
                     int iters) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = magnitude(resp, c);
  double fd = magnitude(resp, d);
  for (int i = 0; i < iters; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = magnitude(resp, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = magnitude(resp, d);
    }
  }
  return fc >= fd ? Peak{c, fc} : Peak{d, fd};
}

}  // namespace

void NormConfig::validate() const {
  if (!(omega_max > 0.0) || !std::isfinite(omega_max)) {
    throw InvalidArgument("omega_max must be positive");
  }
  if (!(quad_rel_tol > 0.0 && quad_rel_tol <= 1e-2)) {
    throw InvalidArgument("quad_rel_tol must lie in (0, 1e-2]");
  }
  if (peak_samples_per_mode < 8) {
    throw InvalidArgument("peak_samples_per_mode must be at least 8");
  }
  if (refine_iters < 0) throw InvalidArgument("refine_iters must be >= 0");
  if (h2_panels < 1) throw InvalidArgument("h2_panels must be >= 1");
  if (h2_max_depth < 0) throw InvalidArgument("h2_max_depth must be >= 0");
  if (!(segment_cover >= 0.0) || !std::isfinite(segment_cover)) {
    throw InvalidArgument("segment_cover must be finite and >= 0");
  }
}

NormConfig default_norm_config(const StringParams& params, Forcing forcing) {
  params.validate();
  NormConfig cfg;
  cfg.omega_max = 50.0 * params.modal_spacing();
  cfg.tail_decay = forcing == Forcing::Uniform ? TailDecay::InverseOmegaSq
                                               : TailDecay::InverseOmega;
  // 16 fundamentals puts the boundary H2 within ~0.3% of its converged value
  // even for dampers a few percent of the length from an end.
  if (forcing != Forcing::Uniform) cfg.segment_cover = 16.0;
  return cfg;
}

NormConfig fit_to_damper(const NormConfig& cfg, const StringParams& params,
                         const Damper& damper) {
  NormConfig out = cfg;
  if (cfg.segment_cover <= 0.0) return out;
  const double shorter = std::min(damper.position, params.length - damper.position);
  if (!(shorter > 0.0)) return out;
  const double fundamental = std::numbers::pi * std::sqrt(params.stiffness) / shorter;
  out.omega_max = std::max(cfg.omega_max, cfg.segment_cover * fundamental);
  return out;
}

HinfResult hinf_norm(const FrequencyResponse& resp, const StringParams& params,
                     const NormConfig& cfg) {
  cfg.validate();
  params.validate();
  // Fixed step so that grids for different omega_max are nested.
  const double step = params.modal_spacing() / cfg.peak_samples_per_mode;
  std::vector<double> omegas;
  for (std::size_t i = 0; step * static_cast<double>(i) < cfg.omega_max; ++i) {
    omegas.push_back(step * static_cast<double>(i));
  }
  omegas.push_back(cfg.omega_max);
  const std::size_t intervals = omegas.size() - 1;

  std::vector<double> samples(omegas.size());
  for (std::size_t i = 0; i <= intervals; ++i) samples[i] = magnitude(resp, omegas[i]);

  std::vector<double> sorted = samples;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double ceiling = sorted[sorted.size() / 2] / cfg.quad_rel_tol;

  HinfResult best{samples[0], 0.0};
  auto consider = [&](double omega, double value) {
    if (value > ceiling) {
      throw NormDiverged("response exceeds 1/quad_rel_tol times its median near omega = " +
                         std::to_string(omega));
    }
    if (value > best.value) best = {value, omega};
  };

  for (std::size_t i = 0; i <= intervals; ++i) {
    const double left = i > 0 ? samples[i - 1] : -1.0;
    const double right = i < intervals ? samples[i + 1] : -1.0;
    if (samples[i] < left || samples[i] < right) continue;
    consider(omegas[i], samples[i]);
    if (cfg.refine_iters == 0) continue;
    const double lo = omegas[i > 0 ? i - 1 : 0];
    const double hi = omegas[i < intervals ? i + 1 : intervals];
    const Peak peak = golden_maximize(resp, lo, hi, cfg.refine_iters);
    consider(peak.omega, peak.value);
  }
  return best;
}

double H2Result::tail_bound() const { return value - std::sqrt(truncated_square); }

H2Result h2_norm_detailed(const FrequencyResponse& resp, const NormConfig& cfg) {
  cfg.validate();
  auto power = [&](double omega) {
    const double m = magnitude(resp, omega);
    return m * m;
  };

  const double width = cfg.omega_max / cfg.h2_panels;
  double integral = 0.0;
  double error = 0.0;
  for (int i = 0; i < cfg.h2_panels; ++i) {
    const double a = width * i;
    const double b = i + 1 == cfg.h2_panels ? cfg.omega_max : width * (i + 1);
    double panel_error = 0.0;
    integral += Kronrod::integrate(power, a, b, static_cast<unsigned>(cfg.h2_max_depth),
                                   cfg.quad_rel_tol, &panel_error);
    error += panel_error;
  }
  if (!std::isfinite(integral) || error > 10.0 * cfg.quad_rel_tol * integral) {
    throw NormDiverged("H2 quadrature did not reach quad_rel_tol within the panel budget");
  }

  // |H|^2 ~ C / omega^(2a) beyond omega_max, with C the window average of
  // omega^(2a) |H|^2 (the response oscillates, so a single point is not used).
  const int order = cfg.tail_decay == TailDecay::InverseOmega ? 1 : 2;
  const double lo = (1.0 - kTailWindow) * cfg.omega_max;
  auto weighted = [&](double omega) {
    return std::pow(omega, 2 * order) * power(omega);
  };
  const double c = Kronrod::integrate(weighted, lo, cfg.omega_max,
                                      static_cast<unsigned>(cfg.h2_max_depth),
                                      cfg.quad_rel_tol) /
                   (cfg.omega_max - lo);
  const double tail = c / ((2.0 * order - 1.0) * std::pow(cfg.omega_max, 2 * order - 1));

  H2Result out;
  out.truncated_square = integral / std::numbers::pi;
  out.tail_square = tail / std::numbers::pi;
  out.quadrature_error = error / std::numbers::pi;
  out.value = std::sqrt(out.truncated_square + out.tail_square);
  return out;
}

double h2_norm(const FrequencyResponse& resp, const NormConfig& cfg) {
  return h2_norm_detailed(resp, cfg).value;
}

}  // namespace wavedamp
