#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "casimir_sc/dispersion.hpp"

using namespace casimir_sc;

namespace {

const DrudeParameters kBe{18.9, 5e-13};
const SuperconductorParameters kFilm{0.5, 7.6e-5, kBe};

// Lorentzian oscillator loss: Im of wp^2/(w0^2 - w^2 - i g w), omega eps'' integrates to pi wp^2/2.
LossFunction lorentzian(double wp, double w0, double g) {
  return {[=](double w) { return wp * wp * g * w / ((w0 * w0 - w * w) * (w0 * w0 - w * w) + g * g * w * w); },
          1e-6 * w0, 1e4 * w0};
}

double lorentz_imag_axis(double wp, double w0, double g, double z) {
  return 1.0 + wp * wp / (w0 * w0 + z * z + g * z);
}

}  // namespace

TEST(KramersKronig, Vacuum) {
  const LossFunction zero{[](double) { return 0.0; }, 1.0, 1e10};
  for (double z : {1e-3, 1.0, 1e6}) EXPECT_EQ(kk_transform(zero, z), 1.0);
}

TEST(KramersKronig, DrudeClosedForm) {
  const auto loss = drude_loss_function(kBe);
  const double g = kBe.damping();
  for (double x = 1e-3; x <= 1e3 * 1.0001; x *= std::sqrt(10.0)) {
    const double z = x * g;
    EXPECT_NEAR(kk_transform(loss, z) / drude_imag_axis(z, kBe), 1.0, 1e-6) << "zeta tau = " << x;
  }
}

TEST(KramersKronig, LorentzianClosedForm) {
  const double wp = 1e15, w0 = 2e14, g = 1e13;
  const auto loss = lorentzian(wp, w0, g);
  for (double z : {1e12, 1e14, 2e14, 1e15, 1e17})
    EXPECT_NEAR(kk_transform(loss, z) / lorentz_imag_axis(wp, w0, g, z), 1.0, 1e-6) << "zeta = " << z;
}

TEST(KramersKronig, NarrowLorentzianDeltaLimit) {
  // Weight w = int omega eps'' = pi wp^2 / 2 at w0; zero width gives 1 + (2/pi) w w0 / ... -> 1 + wp^2/(w0^2 + z^2).
  const double wp = 1e14, w0 = 1e14;
  for (double g : {1e11, 1e10}) {
    const auto loss = lorentzian(wp, w0, g);
    for (double z : {1e13, 1e14, 1e15}) {
      const double weight = std::numbers::pi * wp * wp / 2.0;
      const double delta = 1.0 + (2.0 / std::numbers::pi) * weight / (z * z + w0 * w0);
      EXPECT_NEAR(kk_transform(loss, z) / delta, 1.0, 10.0 * g / w0 + 1e-6) << "gamma = " << g << " zeta = " << z;
    }
  }
}

TEST(KramersKronig, LinearAndMonotone) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const DrudeParameters d{1.0 + 20.0 * u(rng), std::pow(10.0, -15.0 + 3.0 * u(rng))};
    const double wp = 1e14 + 1e15 * u(rng), w0 = 1e13 + 1e15 * u(rng), g = w0 * (0.01 + u(rng));
    const auto a = drude_loss_function(d);
    const auto b = lorentzian(wp, w0, g);
    const LossFunction sum{[&](double w) { return a.evaluator(w) + b.evaluator(w); },
                           std::min(a.omega_low, b.omega_low), std::max(a.omega_high, b.omega_high)};
    double prev = std::numeric_limits<double>::infinity();
    for (double z = 1e10; z < 1e18; z *= 7.0) {
      const double ea = kk_transform(a, z), eb = kk_transform(b, z), es = kk_transform(sum, z);
      EXPECT_NEAR((es - 1.0) / ((ea - 1.0) + (eb - 1.0)), 1.0, 1e-7);
      EXPECT_GE(es, 1.0);
      EXPECT_LT(es, prev);
      prev = es;
    }
  }
}

TEST(KramersKronig, RejectsNonPositiveZeta) {
  EXPECT_THROW(kk_transform(drude_loss_function(kBe), 0.0), DomainError);
}

TEST(Superconductor, NormalAtTransition) {
  const SuperconductorResponse r(1.0, kFilm);
  EXPECT_TRUE(r.is_normal());
  for (double z : {1e3, 1e9, 1e12, 1e15}) EXPECT_EQ(r(z), drude_imag_axis(z, kBe));
  EXPECT_EQ(superconductor_imag_axis(1e11, 1.0, kFilm), drude_imag_axis(1e11, kBe));
}

TEST(Superconductor, LondonLimitAtSmallZeta) {
  const SuperconductorResponse r(0.9, kFilm);
  const double s = r.condensate_weight();
  ASSERT_GT(s, 0.0);
  // Against an independently computed spectral weight.
  EXPECT_NEAR(s / sum_rule_deficit(0.9, kFilm, default_omega_max(kFilm)), 1.0, 1e-6);
  const double unit = units::thermal_frequency(kFilm.critical_temperature_K);
  for (double m : {1e-7, 1e-6, 1e-5}) {
    const double z = m * unit;
    const double london = (2.0 / std::numbers::pi) * s / (z * z);
    EXPECT_NEAR(r(z) / london, 1.0, 1e-2) << "zeta = " << m << " kTc/hbar";
  }
}

TEST(Superconductor, HighFrequencyApproachesNormal) {
  const SuperconductorResponse r(0.9, kFilm);
  const double unit = units::thermal_frequency(kFilm.critical_temperature_K);
  double prev = std::numeric_limits<double>::infinity();
  for (double m : {10.0, 30.0, 100.0, 300.0, 1000.0}) {
    const double z = m * unit;
    const double n = drude_imag_axis(z, kBe);
    const double rel = (r(z) - n) / n;
    EXPECT_GT(rel, 0.0);
    EXPECT_LT(rel, prev);
    prev = rel;
    if (m >= 100.0) EXPECT_LT(rel, 1e-3) << "zeta = " << m << " kTc/hbar";
  }
}

TEST(Superconductor, TableMatchesDirectQuadrature) {
  const SuperconductorResponse r(0.9, kFilm);
  const double unit = units::thermal_frequency(kFilm.critical_temperature_K);
  for (double m : {3.3e-7, 1e-3, 0.27, 8.0, 27.0, 1234.0}) {
    const double z = m * unit;
    EXPECT_NEAR(r.difference_integral(z) / r.difference_integral_direct(z), 1.0, 1e-5) << "zeta = " << m;
  }
}

TEST(Superconductor, ApproachesNormalAsTransitionNears) {
  const double unit = units::thermal_frequency(kFilm.critical_temperature_K);
  double prev = std::numeric_limits<double>::infinity();
  for (double t : {0.9, 0.97, 0.99, 0.995}) {
    const SuperconductorResponse r(t, kFilm);
    double worst = 0.0;
    for (double m = 1e-3; m < 1e3; m *= 10.0) {
      const double z = m * unit;
      worst = std::max(worst, std::abs(r(z) / drude_imag_axis(z, kBe) - 1.0));
    }
    EXPECT_LT(worst, prev) << "t = " << t;
    prev = worst;
  }
}

TEST(Superconductor, AboveNormalAndDecreasing) {
  for (double t : {0.5, 0.95}) {
    const SuperconductorResponse r(t, kFilm);
    double prev = std::numeric_limits<double>::infinity();
    for (double z = 1e4; z < 1e15; z *= 3.0) {
      const double e = r(z);
      EXPECT_GE(e, drude_imag_axis(z, kBe));
      EXPECT_LT(e, prev);
      prev = e;
    }
  }
}
