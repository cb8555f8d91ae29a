#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "casimir_sc/materials.hpp"
#include "casimir_sc/quadrature.hpp"

using namespace casimir_sc;

namespace {

const DrudeParameters kBe{18.9, 5e-13};
const SuperconductorParameters kFilm{0.5, 7.6e-5, kBe};

double omega_of_energy(double e) { return units::energy_to_angular_frequency(e); }

// Gap equation residual ln(D0/D) - 2 int_0^inf f(E)/E dxi by direct midpoint-free quadrature in xi.
double gap_residual(double d, double t) {
  const double kt = t / kBcsRatio;  // k T in units of Delta(0)
  auto f = [&](double xi) {
    const double e = std::hypot(xi, d);
    return 2.0 / (e * (std::exp(e / kt) + 1.0));
  };
  const auto r = quadrature::integrate(f, 0.0, 60.0 * kt + 10.0 * d, {1e-12, 0.0, 4000});
  return std::log(1.0 / d) - r.value;
}

}  // namespace

TEST(DrudeParameters, Validation) {
  EXPECT_THROW((DrudeParameters{0.0, 1e-13}.validate()), DomainError);
  EXPECT_THROW((DrudeParameters{1.0, -1e-13}.validate()), DomainError);
  EXPECT_NO_THROW(kBe.validate());
}

TEST(SuperconductorParameters, BcsRatioAndImpurity) {
  const auto sc = SuperconductorParameters::from_bcs_ratio(0.5, kBe);
  const double ratio = sc.gap_at_zero_eV / units::temperature_to_energy(0.5);
  EXPECT_NEAR(ratio, 1.764, 1e-12);
  EXPECT_NEAR(sc.gap_at_zero_eV, 7.6e-5, 1e-8);
  EXPECT_NEAR(kFilm.impurity_parameter(), 8.66, 0.01);
  EXPECT_GT(kFilm.impurity_parameter(), 0.0);
}

TEST(BcsGap, EndPoints) {
  EXPECT_EQ(bcs_gap(1.0, kFilm), 0.0);
  EXPECT_DOUBLE_EQ(bcs_gap(0.0, kFilm), 7.6e-5);
  EXPECT_THROW(bcs_gap(1.01, kFilm), DomainError);
  EXPECT_THROW(bcs_gap(-0.01, kFilm), DomainError);
}

TEST(BcsGap, NearTransitionAsymptote) {
  EXPECT_NEAR(bcs_gap(0.99, kFilm), 1.32e-5, 0.02e-5);
  // The next-order correction is about -0.4 (1 - t), so the 2% band holds from t = 0.96.
  for (double t : {0.96, 0.97, 0.99, 0.995, 0.999}) {
    const double h = bcs_gap(t, kFilm) / (kFilm.gap_at_zero_eV * std::sqrt(1.0 - t));
    EXPECT_NEAR(h / 1.74, 1.0, 0.02) << "t = " << t;
  }
  EXPECT_NEAR(BcsGapTable::edge_coefficient(), 1.7367, 1e-4);
  const double h999 = bcs_gap(0.9999, kFilm) / (kFilm.gap_at_zero_eV * 0.01);
  EXPECT_NEAR(h999 / BcsGapTable::edge_coefficient(), 1.0, 1e-4);
}

TEST(BcsGap, SolvesGapEquation) {
  for (double t : {0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.99}) {
    const double d = BcsGapTable::instance().relative_gap(t);
    EXPECT_NEAR(gap_residual(d, t), 0.0, 1e-5) << "t = " << t;
  }
}

TEST(BcsGap, TableMatchesDirectSolve) {
  for (double t = 0.003; t < 1.0; t += 0.0137)
    EXPECT_NEAR(BcsGapTable::instance().relative_gap(t), solve_bcs_relative_gap(t), 1e-5) << "t = " << t;
}

TEST(BcsGap, MonotoneCurve) {
  const auto c = BcsGapTable::instance().curve(kFilm.gap_at_zero_eV);
  ASSERT_EQ(c.gap_eV.size(), c.relative_temperature.size());
  EXPECT_DOUBLE_EQ(c.gap_eV.front(), kFilm.gap_at_zero_eV);
  EXPECT_EQ(c.gap_eV.back(), 0.0);
  for (std::size_t i = 1; i < c.gap_eV.size(); ++i) EXPECT_LE(c.gap_eV[i], c.gap_eV[i - 1]);
  double prev = 1.0;
  for (double t = 0.0; t <= 1.0; t += 1e-3) {
    const double d = BcsGapTable::instance().relative_gap(std::min(t, 1.0));
    EXPECT_LE(d, prev + 1e-15);
    prev = d;
  }
}

TEST(Drude, LossExamples) {
  const double wp = kBe.plasma_frequency(), tau = kBe.scattering_time_s;
  EXPECT_NEAR(drude_loss(1.0 / tau, kBe) / (wp * wp * tau * tau / 2.0), 1.0, 1e-14);
  const double w = 1e20;
  EXPECT_NEAR(drude_loss(w, kBe) / (wp * wp / (tau * w * w * w)), 1.0, 1e-12);
  EXPECT_THROW(drude_loss(0.0, kBe), DomainError);
}

TEST(Drude, SumRule) {
  // int_0^inf omega eps'' d omega = pi Omega^2 / 2, in ln omega
  const double g = kBe.damping();
  const auto r = quadrature::integrate(
      [&](double lw) {
        const double w = std::exp(lw);
        return w * w * drude_loss(w, kBe);
      },
      std::log(g) - 40.0, std::log(g) + 40.0, {1e-12, 0.0, 4000});
  const double wp = kBe.plasma_frequency();
  EXPECT_NEAR(r.value / (std::numbers::pi * wp * wp / 2.0), 1.0, 1e-9);
}

TEST(Drude, ImagAxisExamples) {
  const double wp = kBe.plasma_frequency(), tau = kBe.scattering_time_s;
  EXPECT_NEAR(drude_imag_axis(1.0 / tau, kBe), 1.0 + wp * wp * tau * tau / 2.0, 1e-6 * wp * wp * tau * tau);
  EXPECT_NEAR(drude_imag_axis(1e35, kBe), 1.0, 1e-12);
  EXPECT_THROW(drude_imag_axis(0.0, kBe), DomainError);
}

TEST(GKernel, LargeEnergyCoherenceFactor) {
  // E >> Delta, hbar omega << E: (E(E+hw)+D^2)/(P1 P2) -> 1, so g -> 2/((P1-P2)^2 + b^2).
  const double gap = 1e-4, e = 1.0, w = omega_of_energy(1e-3), tau = 5e-13;
  const double b = PhysicalConstants::hbar_eVs / tau;
  const double p1 = std::sqrt((e + 1e-3) * (e + 1e-3) - gap * gap), p2 = std::sqrt(e * e - gap * gap);
  const double first = 2.0 / ((p1 - p2) * (p1 - p2) + b * b);
  const double g = g_kernel(e, w, tau, gap);
  EXPECT_NEAR(g / first, 1.0, 1e-6);
}

TEST(GKernel, SymmetricPairBreakingPoint) {
  // E = -hw/2 with P2 < 0 on the pair-breaking side: P1 = -P2, so the (P1+P2)^2 denominator collapses to b^2.
  const double gap = 1e-4, hw = 5e-4, tau = 5e-13;
  const double e = -hw / 2.0;
  const double b = PhysicalConstants::hbar_eVs / tau;
  const double p = std::sqrt(e * e - gap * gap);
  const double n = (e * (e + hw) + gap * gap) / (-p * p);
  const double expected = (1.0 + n) / (4.0 * p * p + b * b) - (1.0 - n) / (b * b);
  EXPECT_NEAR(g_kernel(e, omega_of_energy(hw), tau, gap) / expected, 1.0, 1e-12);
}

TEST(GKernel, FiniteEverywhereAndDomain) {
  const double gap = 1e-4, tau = 5e-13;
  for (double hw : {1e-6, 1e-4, 3e-4, 1e-2})
    for (double e : {1.0001e-4, 2e-4, 1e-3, 1e-1, -1.0001e-4 - hw, -2e-4 - hw}) {
      if (std::abs(e + hw) <= gap) continue;
      EXPECT_TRUE(std::isfinite(g_kernel(e, omega_of_energy(hw), tau, gap)));
    }
  EXPECT_THROW(g_kernel(0.5e-4, omega_of_energy(1e-4), tau, gap), DomainError);
  EXPECT_THROW(g_kernel(2e-4, omega_of_energy(1e-4), -1.0, gap), DomainError);
}

TEST(GKernel, VariantsDifferOnlyInSecondDenominator) {
  const double gap = 1e-4, tau = 5e-13, hw = 3e-4, e = 2e-4;
  const double b = PhysicalConstants::hbar_eVs / tau;
  const double p1 = std::sqrt((e + hw) * (e + hw) - gap * gap), p2 = std::sqrt(e * e - gap * gap);
  const double n = (e * (e + hw) + gap * gap) / (p1 * p2);
  const double dm = (p1 - p2) * (p1 - p2) + b * b, dp = (p1 + p2) * (p1 + p2) + b * b;
  EXPECT_NEAR(g_kernel(e, omega_of_energy(hw), tau, gap, GKernelVariant::corrected), (1 + n) / dm - (1 - n) / dp,
              1e-12 / dm);
  EXPECT_NEAR(g_kernel(e, omega_of_energy(hw), tau, gap, GKernelVariant::verbatim), 2 * n / dm, 1e-12 / dm);
}

TEST(MattisBardeen, GaplessKernelReproducesDrude) {
  // Delta = 0, finite T: the kernel integrals themselves give the Drude loss.
  for (double kt : {1e-5, 4.3e-5}) {
    MattisBardeen mb(0.0, kt, kBe);
    mb.force_integral(true);
    for (double w : {1e9, 1e11, 1e12, 2e12, 1e13, 1e14}) {
      EXPECT_NEAR(mb.loss(w) / drude_loss(w, kBe), 1.0, 1e-6) << "omega = " << w << " kT = " << kt;
    }
  }
}

TEST(MattisBardeen, EqualsDrudeAtTransition) {
  for (double w : {1e9, 1e11, 1e13})
    EXPECT_EQ(mattis_bardeen_loss(w, 1.0, kFilm), drude_loss(w, kBe));
}

TEST(MattisBardeen, ZeroTemperatureBelowThreshold) {
  const MattisBardeen mb(kFilm.gap_at_zero_eV, 0.0, kBe);
  for (double x : {0.1, 0.5, 0.99}) {
    const double w = units::angular_frequency_from_reduced(x, kFilm.gap_at_zero_eV);
    EXPECT_EQ(mb.loss(w), 0.0);
  }
  const double above = units::angular_frequency_from_reduced(1.5, kFilm.gap_at_zero_eV);
  EXPECT_GT(mb.loss(above), 0.0);
}

TEST(MattisBardeen, ZeroTemperatureDirtyLimitClosedForm) {
  // For 1/tau >> 2 Delta / hbar the T = 0 conductivity ratio tends to the
  // dirty-limit closed form
  //   s1/sn = (1 + 1/x) E(k) - (2/x) K(k),  k = (x-1)/(x+1),  x = hbar omega / (2 Delta).
  const DrudeParameters dirty{18.9, 1e-16};
  const double gap = 7.6e-5;
  const MattisBardeen mb(gap, 0.0, dirty);
  for (double x : {1.5, 2.0, 5.0}) {
    const double w = units::energy_to_angular_frequency(2.0 * gap * x);
    const double k = (x - 1.0) / (x + 1.0);
    const double expected = (1.0 + 1.0 / x) * std::comp_ellint_2(k) - (2.0 / x) * std::comp_ellint_1(k);
    EXPECT_NEAR(mb.loss(w) / drude_loss(w, dirty), expected, 2e-3) << "x = " << x;
  }
}

TEST(MattisBardeen, NonNegativeAndBounded) {
  for (double t : {0.3, 0.6, 0.9, 0.99}) {
    const MattisBardeen mb(t, kFilm);
    for (double x = 0.01; x < 50.0; x *= 1.3) {
      const double w = units::angular_frequency_from_reduced(x, kFilm.gap_at_zero_eV);
      const double s = mb.loss(w);
      EXPECT_GE(s, 0.0);
      if (t <= 0.3 && x * 2.0 * kFilm.gap_at_zero_eV < 2.0 * mb.gap())
        EXPECT_LE(s, drude_loss(w, kBe) * (1.0 + 1e-3)) << "t = " << t << " x0 = " << x;
    }
  }
}

TEST(MattisBardeen, ConvergesToNormalAtHighFrequency) {
  // Asserted from 40 k T_c / hbar up; at 10 k T_c / hbar the relative gap is a few percent.
  const double unit = units::thermal_frequency(kFilm.critical_temperature_K);
  for (double t : {0.3, 0.9}) {
    const MattisBardeen mb(t, kFilm);
    for (double m : {40.0, 100.0, 1000.0}) {
      const double w = m * unit;
      EXPECT_LT(std::abs(mb.loss(w) - drude_loss(w, kBe)) / drude_loss(w, kBe), 1e-2) << "t = " << t << " m = " << m;
    }
  }
}

TEST(SumRule, ZeroAtTransitionAndMonotone) {
  const double wmax = default_omega_max(kFilm);
  EXPECT_EQ(sum_rule_deficit(1.0, kFilm, wmax), 0.0);
  double prev = 0.0;
  for (double t : {0.99, 0.95, 0.9, 0.7, 0.5}) {
    const double s = sum_rule_deficit(t, kFilm, wmax);
    EXPECT_GT(s, prev) << "t = " << t;
    prev = s;
  }
}

TEST(SumRule, CleanLimitCondensesAllWeight) {
  // tau_n -> infinity at low t: S -> pi Omega^2 / 2.
  // t = 0.1 keeps the thermal normal fluid below 1e-6.
  const SuperconductorParameters clean{0.5, 7.6e-5, {18.9, 1e-8}};
  const double s = sum_rule_deficit(0.1, clean, default_omega_max(clean));
  const double wp = clean.normal_state.plasma_frequency();
  EXPECT_NEAR(s / (std::numbers::pi * wp * wp / 2.0), 1.0, 1e-3);
}

TEST(SumRule, RejectsTooSmallCutoff) {
  const double unit = units::thermal_frequency(kFilm.critical_temperature_K);
  EXPECT_THROW(sum_rule_deficit(0.5, kFilm, 3.0 * unit), DomainError);
}
