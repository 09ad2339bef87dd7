#include <cmath>
#include <numbers>

#include <doctest.h>

#include "wavedamp/analytic.hpp"
#include "wavedamp/norms.hpp"

using namespace wavedamp;

namespace {

const StringParams kParams{10.0, 0.08, 1.0};

FrequencyResponse analytic(const StringParams& params, const Damper& damper, Forcing f) {
  return [=](double omega) { return output_h(Complex{0.0, omega}, params, damper, f); };
}

}  // namespace

TEST_CASE("first-order lag has H2 = 1/sqrt(2)") {
  NormConfig cfg;
  cfg.omega_max = 200.0;
  cfg.tail_decay = TailDecay::InverseOmega;
  const FrequencyResponse lag = [](double omega) { return 1.0 / Complex{1.0, omega}; };
  const H2Result r = h2_norm_detailed(lag, cfg);
  CHECK(r.value == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
  CHECK(r.tail_square > 0.0);
  CHECK(r.tail_bound() > 0.0);
  CHECK(r.quadrature_error < 1e-8);
}

TEST_CASE("H-inf of a constant response") {
  const FrequencyResponse constant = [](double) { return Complex{-3.0, 4.0}; };
  const HinfResult r = hinf_norm(constant, kParams, NormConfig{});
  CHECK(r.value == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("H-inf of a resonant lag finds the peak between samples") {
  // |1/(s^2 + 0.02 s + 1)| peaks at omega = sqrt(1 - 2 zeta^2), zeta = 0.01.
  const FrequencyResponse resp = [](double omega) {
    const Complex s{0.0, omega};
    return 1.0 / (s * s + 0.02 * s + 1.0);
  };
  NormConfig cfg;
  cfg.omega_max = 5.0;
  const HinfResult r = hinf_norm(resp, StringParams{10.0, 0.08, 1.0}, cfg);
  const double zeta = 0.01;
  CHECK(r.value == doctest::Approx(1.0 / (2.0 * zeta * std::sqrt(1.0 - zeta * zeta))).epsilon(1e-9));
  CHECK(r.argmax_omega == doctest::Approx(std::sqrt(1.0 - 2.0 * zeta * zeta)).epsilon(1e-5));
}

TEST_CASE("uniform forcing at the reference damper peaks at zero frequency") {
  const Damper damper{4.5, 10.0};
  const NormConfig cfg = default_norm_config(kParams, Forcing::Uniform);
  const HinfResult r = hinf_norm(analytic(kParams, damper, Forcing::Uniform), kParams, cfg);
  CHECK(r.value == doctest::Approx(100.0 / 12.0).epsilon(1e-12));
  CHECK(r.argmax_omega < 1e-6);
}

TEST_CASE("boundary forcing H-inf never falls below one half") {
  const NormConfig cfg = default_norm_config(kParams, Forcing::BoundaryLeft);
  for (double p : {0.5, 2.0, 5.0, 9.5}) {
    for (double g : {0.0, 1.0, 5.0, 100.0}) {
      const double v =
          hinf_norm(analytic(kParams, Damper{p, g}, Forcing::BoundaryLeft), kParams, cfg).value;
      CHECK(v >= 0.5 - 1e-12);
    }
  }
}

TEST_CASE("uniform H2 near the reported optimum") {
  const NormConfig cfg = default_norm_config(kParams, Forcing::Uniform);
  const double v = h2_norm(analytic(kParams, Damper{4.388, 9.695}, Forcing::Uniform), cfg);
  CHECK(v == doctest::Approx(2.4195).epsilon(0.02));
}

TEST_CASE("undamped string diverges") {
  const StringParams undamped{10.0, 0.0, 1.0};
  const Damper free{4.5, 0.0};
  for (Forcing f : {Forcing::Uniform, Forcing::BoundaryLeft}) {
    const NormConfig cfg = default_norm_config(undamped, f);
    CHECK_THROWS_AS(hinf_norm(analytic(undamped, free, f), undamped, cfg), NormDiverged);
    CHECK_THROWS_AS(h2_norm(analytic(undamped, free, f), cfg), NormDiverged);
  }
}

TEST_CASE("truncation monotonicity") {
  for (Forcing f : {Forcing::Uniform, Forcing::BoundaryLeft}) {
    for (const Damper& damper : {Damper{4.5, 10.0}, Damper{1.0, 0.5}, Damper{7.0, 0.0}}) {
      NormConfig small = default_norm_config(kParams, f);
      small.omega_max *= 0.5;
      NormConfig large = small;
      large.omega_max *= 2.0;
      const FrequencyResponse resp = analytic(kParams, damper, f);
      CHECK(hinf_norm(resp, kParams, large).value >= hinf_norm(resp, kParams, small).value);
      const H2Result a = h2_norm_detailed(resp, small);
      const H2Result b = h2_norm_detailed(resp, large);
      CHECK(std::abs(a.value - b.value) < a.tail_bound());
    }
  }
}

TEST_CASE("doubling the scan density leaves H-inf unchanged") {
  for (Forcing f : {Forcing::Uniform, Forcing::BoundaryLeft}) {
    for (const Damper& damper : {Damper{4.5, 10.0}, Damper{4.388, 9.695}, Damper{2.0, 1.0}}) {
      const NormConfig base = default_norm_config(kParams, f);
      NormConfig dense = base;
      dense.peak_samples_per_mode *= 2;
      const FrequencyResponse resp = analytic(kParams, damper, f);
      const double a = hinf_norm(resp, kParams, base).value;
      const double b = hinf_norm(resp, kParams, dense).value;
      CHECK(std::abs(a - b) < base.quad_rel_tol * a);
    }
  }
}

TEST_CASE("default configuration") {
  const NormConfig u = default_norm_config(kParams, Forcing::Uniform);
  CHECK(u.omega_max == doctest::Approx(50.0 * std::numbers::pi / 10.0));
  CHECK(u.tail_decay == TailDecay::InverseOmegaSq);
  CHECK(default_norm_config(kParams, Forcing::BoundaryLeft).tail_decay == TailDecay::InverseOmega);
}

TEST_CASE("invalid configuration") {
  NormConfig cfg;
  cfg.omega_max = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = NormConfig{};
  cfg.quad_rel_tol = 0.1;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = NormConfig{};
  cfg.peak_samples_per_mode = 4;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  const FrequencyResponse one = [](double) { return Complex{1.0, 0.0}; };
  CHECK_THROWS_AS(hinf_norm(one, kParams, cfg), InvalidArgument);
}

TEST_CASE("boundary truncation covers the short damper segment") {
  const NormConfig base = default_norm_config(kParams, Forcing::BoundaryLeft);
  CHECK(base.segment_cover > 0.0);
  const NormConfig mid = fit_to_damper(base, kParams, Damper{5.0, 1.0});
  CHECK(mid.omega_max == base.omega_max);
  const NormConfig near_end = fit_to_damper(base, kParams, Damper{9.8, 1.0});
  CHECK(near_end.omega_max ==
        doctest::Approx(base.segment_cover * std::numbers::pi / 0.2).epsilon(1e-9));
  const NormConfig uniform = default_norm_config(kParams, Forcing::Uniform);
  CHECK(fit_to_damper(uniform, kParams, Damper{0.1, 1.0}).omega_max == uniform.omega_max);

  // Near the forced end at high gain the 50-spacing truncation misses most
  // of the tail; the widened one agrees with a far larger truncation.
  const FrequencyResponse resp = analytic(kParams, Damper{0.15, 100.0}, Forcing::BoundaryLeft);
  NormConfig far = base;
  far.omega_max = 3000.0;
  const double reference = h2_norm(resp, far);
  CHECK(std::abs(h2_norm(resp, fit_to_damper(base, kParams, Damper{0.15, 100.0})) - reference) <
        0.005 * reference);
  CHECK(std::abs(h2_norm(resp, base) - reference) > 0.2 * reference);
}
