#include "wavedamp/analytic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace wavedamp {

namespace {

// value = m * exp(e). Keeps sinh/cosh of arguments with large real part
// representable.
struct Scaled {
  Complex m{0.0, 0.0};
  double e = 0.0;

  Complex value() const { return m == Complex{} ? m : m * std::exp(e); }
  double magnitude_at(double scale) const {
    return std::abs(m) * std::exp(e - scale);
  }
  Complex mantissa_at(double scale) const { return m * std::exp(e - scale); }
};

Scaled operator*(const Scaled& a, const Scaled& b) {
  return {a.m * b.m, a.e + b.e};
}
Scaled operator*(Complex c, const Scaled& a) { return {c * a.m, a.e}; }
Scaled operator-(const Scaled& a) { return {-a.m, a.e}; }

Scaled operator+(const Scaled& a, const Scaled& b) {
  if (a.m == Complex{}) return b;
  if (b.m == Complex{}) return a;
  if (a.e >= b.e) return {a.m + b.m * std::exp(b.e - a.e), a.e};
  return {b.m + a.m * std::exp(a.e - b.e), b.e};
}

// Past this real part std::sinh is replaced by the scaled form.
constexpr double kDirectLimit = 20.0;

Scaled scaled_sinh(Complex w) {
  if (std::abs(w.real()) < kDirectLimit) return {std::sinh(w), 0.0};
  if (w.real() < 0.0) return -scaled_sinh(-w);
  const Complex phase = std::exp(Complex{0.0, w.imag()});
  return {phase * (1.0 - std::exp(-2.0 * w)) * 0.5, w.real()};
}

Scaled scaled_cosh(Complex w) {
  if (std::abs(w.real()) < kDirectLimit) return {std::cosh(w), 0.0};
  if (w.real() < 0.0) w = -w;
  const Complex phase = std::exp(Complex{0.0, w.imag()});
  return {phase * (1.0 + std::exp(-2.0 * w)) * 0.5, w.real()};
}

// cosh(Re w) >= |sinh w|: the scale against which a vanishing sinh is judged.
Scaled sinh_envelope(Complex w) {
  const double a = std::abs(w.real());
  if (a < kDirectLimit) return {std::cosh(a), 0.0};
  return {0.5 * (1.0 + std::exp(-2.0 * a)), a};
}

Complex safe_tanh(Complex w) {
  Complex t;
  if (std::abs(w.real()) < kDirectLimit) {
    t = std::tanh(w);
  } else {
    const double sign = w.real() > 0.0 ? 1.0 : -1.0;
    const Complex e = std::exp(-2.0 * sign * w);
    t = sign * (1.0 - e) / (1.0 + e);
  }
  if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) {
    throw PoleEncountered("tanh pole in limit formula");
  }
  return t;
}

// 1 - e^{-u} without cancellation for small u.
Complex one_minus_exp_neg(Complex u) {
  if (std::abs(u) < 0.5) {
    Complex term = u;
    Complex acc = u;
    for (int n = 2; n <= 18; ++n) {
      term *= -u / static_cast<double>(n);
      acc += term;
    }
    return acc;
  }
  return 1.0 - std::exp(-u);
}

// (w - tanh w) / w^3, accurate down to w = 0.
Complex tanh_remainder(Complex w) {
  if (std::abs(w) < 0.1) {
    static constexpr std::array<double, 7> c = {
        1.0 / 3.0,           -2.0 / 15.0,
        17.0 / 315.0,        -62.0 / 2835.0,
        1382.0 / 155925.0,   -21844.0 / 6081075.0,
        929569.0 / 638512875.0};
    const Complex u = w * w;
    Complex acc = c.back();
    for (int i = static_cast<int>(c.size()) - 2; i >= 0; --i) acc = acc * u + c[i];
    return acc;
  }
  return (w - safe_tanh(w)) / (w * w * w);
}

void check_inputs(const StringParams& params, const Damper& damper) {
  params.validate();
  damper.validate(params);
}

void check_position(double x, const StringParams& params) {
  if (!(x >= 0.0 && x <= params.length)) {
    throw InvalidArgument("x must lie in [0, length]");
  }
}

Complex laplace_symbol(Complex s, const StringParams& params) {
  return s * (s + params.internal_damping);
}

// Truncated power series in t = z^2.
constexpr int kSeriesOrder = 7;
using Series = std::array<Complex, kSeriesOrder>;

Series operator*(const Series& a, const Series& b) {
  Series out{};
  for (int i = 0; i < kSeriesOrder; ++i) {
    for (int j = 0; i + j < kSeriesOrder; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}
Series operator+(const Series& a, const Series& b) {
  Series out{};
  for (int i = 0; i < kSeriesOrder; ++i) out[i] = a[i] + b[i];
  return out;
}
Series operator*(Complex c, const Series& a) {
  Series out{};
  for (int i = 0; i < kSeriesOrder; ++i) out[i] = c * a[i];
  return out;
}

// sinh(a z) / z as a series in z^2.
Series sinh_over_z(double a) {
  Series out{};
  double term = a;
  for (int j = 0; j < kSeriesOrder; ++j) {
    out[j] = term;
    term *= a * a / ((2.0 * j + 2.0) * (2.0 * j + 3.0));
  }
  return out;
}

// sum_{i >= first} c[i] t^(i - first)
Complex evaluate(const Series& c, Complex t, int first = 0) {
  Complex acc{};
  for (int i = kSeriesOrder - 1; i >= first; --i) acc = acc * t + c[i];
  return acc;
}

// eta / (k z^2) = sinh(zl)/z + lambda sinh(zp)/z sinh(zr)/z with
// lambda = g s / k. Shared denominator of both series paths.
struct SeriesPieces {
  Complex t;
  Complex lambda;
  Series denominator;
};

SeriesPieces series_pieces(Complex s, Complex z, const StringParams& params,
                           const Damper& damper) {
  const double p = damper.position;
  const double r = params.length - p;
  SeriesPieces out;
  out.t = z * z;
  out.lambda = damper.gain * s / params.stiffness;
  out.denominator =
      sinh_over_z(params.length) + out.lambda * (sinh_over_z(p) * sinh_over_z(r));
  const Complex den = evaluate(out.denominator, out.t);
  const double scale =
      std::abs(evaluate(sinh_over_z(params.length), out.t)) +
      std::abs(out.lambda * evaluate(sinh_over_z(p) * sinh_over_z(r), out.t));
  if (std::abs(den) < kEtaGuard * scale) {
    throw PoleEncountered("eta vanishes near s = 0");
  }
  return out;
}

Complex uniform_h_series(Complex s, Complex z, const StringParams& params,
                         const Damper& damper) {
  const double l = params.length;
  const double p = damper.position;
  const double r = l - p;
  const SeriesPieces pc = series_pieces(s, z, params, damper);
  const Series half = sinh_over_z(0.5 * l);
  const Series gamma_part =
      Complex{4.0} * (half * half) +
      (8.0 * pc.lambda) * (half * (sinh_over_z(0.5 * p) * sinh_over_z(0.5 * r)));
  // l * denominator - gamma_part has a vanishing constant term; skip it.
  const Series numerator = Complex{l} * pc.denominator + Complex{-1.0} * gamma_part;
  return evaluate(numerator, pc.t, 1) /
         (params.stiffness * l * evaluate(pc.denominator, pc.t));
}

Complex boundary_h_series(Complex s, Complex z, const StringParams& params,
                          const Damper& damper) {
  const double l = params.length;
  const double p = damper.position;
  const double r = l - p;
  const SeriesPieces pc = series_pieces(s, z, params, damper);
  const Series half = sinh_over_z(0.5 * l);
  const Series half_p = sinh_over_z(0.5 * p);
  const Series beta_part = Complex{2.0} * (half * half) +
                           (2.0 * pc.lambda) * (sinh_over_z(r) * (half_p * half_p));
  return evaluate(beta_part, pc.t) / (l * evaluate(pc.denominator, pc.t));
}

bool use_series(Complex z, const StringParams& params) {
  return std::abs(z) * params.length < kSeriesSwitch;
}

void reject_zero_symbol(Complex s, const StringParams& params) {
  if (laplace_symbol(s, params) == Complex{}) {
    throw SingularPoint("s (s + d) = 0: closed form is singular, use the limit");
  }
}

}  // namespace

Complex AuxQuantities::beta1() const { return beta1_scaled * std::exp(log_scale); }
Complex AuxQuantities::beta2() const { return beta2_scaled * std::exp(log_scale); }
Complex AuxQuantities::gamma() const { return gamma_scaled * std::exp(log_scale); }
Complex AuxQuantities::eta() const { return eta_scaled * std::exp(log_scale); }

bool AuxQuantities::eta_vanishes() const {
  return std::abs(eta_scaled) < kEtaGuard * eta_magnitude_scaled;
}

Complex wave_number(Complex s, const StringParams& params, RootBranch branch) {
  const Complex z = std::sqrt(laplace_symbol(s, params) / params.stiffness);
  return branch == RootBranch::Principal ? z : -z;
}

AuxQuantities aux_quantities(Complex s, const StringParams& params,
                             const Damper& damper, RootBranch branch) {
  check_inputs(params, damper);
  const double l = params.length;
  const double p = damper.position;
  const double r = l - p;
  const double k = params.stiffness;
  const Complex z = wave_number(s, params, branch);
  const Complex gs = damper.gain * s;

  const Scaled sh_half_l = scaled_sinh(0.5 * z * l);
  const Scaled sh_half_p = scaled_sinh(0.5 * z * p);
  const Scaled sh_half_r = scaled_sinh(0.5 * z * r);
  const Scaled sh_p = scaled_sinh(z * p);
  const Scaled sh_r = scaled_sinh(z * r);
  const Scaled sh_l = scaled_sinh(z * l);
  const Scaled sq_half_l = sh_half_l * sh_half_l;

  const Scaled beta1 = (2.0 * k * z) * sq_half_l +
                       (2.0 * gs) * (sh_r * (sh_half_p * sh_half_p));
  const Scaled beta2 = (2.0 * k * z) * sq_half_l +
                       (2.0 * gs) * (sh_p * (sh_half_r * sh_half_r));
  const Scaled gamma = (4.0 * k * z) * sq_half_l +
                       (8.0 * gs) * (sh_half_l * (sh_half_p * sh_half_r));
  const Scaled eta_stiff = (k * z) * sh_l;
  const Scaled eta_damper = gs * (sh_p * sh_r);
  const Scaled eta = eta_stiff + eta_damper;

  AuxQuantities out;
  out.z = z;
  out.log_scale = eta.e;
  out.beta1_scaled = beta1.mantissa_at(eta.e);
  out.beta2_scaled = beta2.mantissa_at(eta.e);
  out.gamma_scaled = gamma.mantissa_at(eta.e);
  out.eta_scaled = eta.m;
  out.eta_magnitude_scaled =
      std::abs(k * z) * sinh_envelope(z * l).magnitude_at(eta.e) +
      std::abs(gs) * (sinh_envelope(z * p) * sinh_envelope(z * r)).magnitude_at(eta.e);
  return out;
}

Complex uniform_g(double x, Complex s, const StringParams& params,
                  const Damper& damper, RootBranch branch) {
  check_inputs(params, damper);
  check_position(x, params);
  reject_zero_symbol(s, params);
  const AuxQuantities aux = aux_quantities(s, params, damper, branch);
  if (aux.eta_vanishes()) throw SingularPoint("eta vanishes: G is singular at s");

  const double l = params.length;
  const bool left = x <= damper.position;
  const double y = left ? x : l - x;
  const Scaled one{1.0, 0.0};
  if (std::abs(aux.z.real()) * l < 1.0) {
    const Complex ratio = (left ? aux.beta1_scaled : aux.beta2_scaled) / aux.eta_scaled;
    const Scaled shape = one + (-scaled_cosh(aux.z * y)) + ratio * scaled_sinh(aux.z * y);
    return shape.value() / laplace_symbol(s, params);
  }

  // cosh(wy) - (beta/eta) sinh(wy) = [(1 - rho) e^{wy} + (1 + rho) e^{-wy}] / 2
  // with 1 - rho = (eta - beta)/eta formed without cancellation. G is even
  // in z, so w is the root with Re w > 0.
  const Complex w = aux.z.real() < 0.0 ? -aux.z : aux.z;
  const double near = left ? damper.position : l - damper.position;
  const double far = l - near;
  const Scaled eta_minus_beta =
      Scaled{params.stiffness * w * one_minus_exp_neg(w * l), 0.0} +
      (damper.gain * s * one_minus_exp_neg(w * near)) * scaled_sinh(w * far);
  const Scaled one_minus_rho{eta_minus_beta.m / aux.eta_scaled,
                             eta_minus_beta.e - aux.log_scale};
  const Complex wy = w * y;
  const Scaled grow{0.5 * one_minus_rho.m * std::exp(Complex{0.0, wy.imag()}),
                    one_minus_rho.e + wy.real()};
  const Scaled decay{0.5 * (2.0 - one_minus_rho.value()) * std::exp(-wy), 0.0};
  const Scaled shape = one + (-grow) + (-decay);
  return shape.value() / laplace_symbol(s, params);
}

Complex uniform_h(Complex s, const StringParams& params, const Damper& damper,
                  RootBranch branch) {
  check_inputs(params, damper);
  const double l = params.length;
  if (s == Complex{}) return l * l / (12.0 * params.stiffness);
  const Complex z = wave_number(s, params, branch);
  if (use_series(z, params)) return uniform_h_series(s, z, params, damper);

  const AuxQuantities aux = aux_quantities(s, params, damper, branch);
  if (aux.eta_vanishes()) throw PoleEncountered("eta vanishes: pole of H");
  const Complex ratio = aux.gamma_scaled / (aux.z * l * aux.eta_scaled);
  return (1.0 - ratio) / laplace_symbol(s, params);
}

Complex boundary_g(double x, Complex s, const StringParams& params,
                   const Damper& damper, RootBranch branch) {
  check_inputs(params, damper);
  check_position(x, params);
  reject_zero_symbol(s, params);
  const AuxQuantities aux = aux_quantities(s, params, damper, branch);
  if (aux.eta_vanishes()) throw SingularPoint("eta vanishes: G is singular at s");

  const double l = params.length;
  const double p = damper.position;
  const Complex z = aux.z;
  Scaled numerator = (params.stiffness * z) * scaled_sinh(z * (l - x));
  if (x <= p) {
    numerator = numerator + (damper.gain * s) * (scaled_sinh(z * (p - x)) *
                                                 scaled_sinh(z * (l - p)));
  }
  return numerator.m / aux.eta_scaled * std::exp(numerator.e - aux.log_scale);
}

Complex boundary_h(Complex s, const StringParams& params, const Damper& damper,
                   RootBranch branch) {
  check_inputs(params, damper);
  if (s == Complex{}) return 0.5;
  const Complex z = wave_number(s, params, branch);
  if (use_series(z, params)) return boundary_h_series(s, z, params, damper);

  const AuxQuantities aux = aux_quantities(s, params, damper, branch);
  if (aux.eta_vanishes()) throw PoleEncountered("eta vanishes: pole of H");
  return aux.beta1_scaled / (aux.z * params.length * aux.eta_scaled);
}

Complex displacement_g(double x, Complex s, const StringParams& params,
                       const Damper& damper, Forcing forcing,
                       RootBranch branch) {
  return forcing == Forcing::Uniform ? uniform_g(x, s, params, damper, branch)
                                     : boundary_g(x, s, params, damper, branch);
}

Complex output_h(Complex s, const StringParams& params, const Damper& damper,
                 Forcing forcing, RootBranch branch) {
  return forcing == Forcing::Uniform ? uniform_h(s, params, damper, branch)
                                     : boundary_h(s, params, damper, branch);
}

Complex limit_h(Complex s, const StringParams& params, const Damper& damper,
                Forcing forcing, LimitCase which) {
  check_inputs(params, damper);
  const double l = params.length;
  const double k = params.stiffness;
  if (which == LimitCase::AtZero) {
    return forcing == Forcing::Uniform ? Complex{l * l / (12.0 * k)} : Complex{0.5};
  }
  reject_zero_symbol(s, params);
  const Complex z = wave_number(s, params);
  // Uniform limits reduce to l^3 R(zl/2) resp. p^3 R(zp/2) + r^3 R(zr/2)
  // over 4 k l, where R(w) = (w - tanh w) / w^3.
  if (which == LimitCase::NoDamping) {
    if (forcing == Forcing::Uniform) {
      return l * l * tanh_remainder(0.5 * z * l) / (4.0 * k);
    }
    return safe_tanh(0.5 * z * l) / (z * l);
  }
  const double p = damper.position;
  const double r = l - p;
  if (forcing == Forcing::Uniform) {
    return (p * p * p * tanh_remainder(0.5 * z * p) +
            r * r * r * tanh_remainder(0.5 * z * r)) /
           (4.0 * k * l);
  }
  return safe_tanh(0.5 * z * p) / (z * l);
}

Complex h_from_g_quadrature(Complex s, const StringParams& params,
                            const Damper& damper, Forcing forcing,
                            int n_points) {
  if (n_points < 16) throw InvalidArgument("n_points must be at least 16");
  check_inputs(params, damper);
  const GaussLegendreRule rule = gauss_legendre(n_points);
  const double p = damper.position;
  const double l = params.length;

  auto integrate = [&](double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    Complex acc{};
    for (int i = 0; i < n_points; ++i) {
      acc += rule.weights[i] *
             displacement_g(mid + half * rule.nodes[i], s, params, damper, forcing);
    }
    return half * acc;
  };
  return (integrate(0.0, p) + integrate(p, l)) / l;
}

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre rule needs n >= 1");
  GaussLegendreRule rule;
  if (n == 1) {
    rule.nodes = {0.0};
    rule.weights = {2.0};
    return rule;
  }
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace wavedamp
