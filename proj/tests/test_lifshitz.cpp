#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "casimir_sc/lifshitz.hpp"

using namespace casimir_sc;

namespace {

const DrudeParameters kMirror{18.9, 2.4e-12};
const SuperconductorParameters kFilm{0.5, 7.6e-5, {18.9, 5e-13}};
const CavityGeometry kGeom{10 * units::nm, 5 * units::nm, 1.0};

LayerPermittivities constant_layers(double mirror, double normal, double sc) {
  return {[=](double) { return mirror; }, [=](double) { return normal; }, [=](double) { return sc; }};
}

// Same energy with q = zeta p / c as the outer variable and the zeta range
// [0, min(zeta_max, c q)] inside, by a generic nested Gauss-Kronrod rule:
//   dE = hbar A / (4 pi^2) int q dq int dzeta log(Q_n / Q_s).
double swapped_order_reference(double em, double en, double es, const CavityGeometry& g, double zeta_max) {
  using boost::math::quadrature::gauss_kronrod;
  const double c = PhysicalConstants::c;
  auto over_zeta = [&](double q) {
    auto f = [&](double zeta) {
      if (zeta <= 0.0) return 0.0;
      const double p = std::max(1.0, c * q / zeta);
      double sum = 0.0;
      for (auto pol : {Polarization::TE, Polarization::TM})
        sum += std::log(q_factor(zeta, p, pol, en, em, g)) - std::log(q_factor(zeta, p, pol, es, em, g));
      return sum;
    };
    return gauss_kronrod<double, 31>::integrate(f, 0.0, std::min(zeta_max, c * q), 15, 1e-10);
  };
  auto outer = [&](double lq) {
    const double q = std::exp(lq);
    return q * q * over_zeta(q);
  };
  const double lq0 = std::log(1e-8 / g.gap_width_cm), lq1 = std::log(40.0 / g.gap_width_cm);
  const double value = gauss_kronrod<double, 31>::integrate(outer, lq0, lq1, 15, 1e-9);
  return PhysicalConstants::hbar * g.plate_area_cm2 / (4.0 * std::numbers::pi * std::numbers::pi) * value;
}

}  // namespace

TEST(IdealPlates, Examples) {
  EXPECT_NEAR(ideal_casimir_energy(1.0, 10 * units::nm), -0.4334, 1e-4);
  EXPECT_NEAR(ideal_casimir_energy(2.0, 20 * units::nm) / ideal_casimir_energy(1.0, 10 * units::nm), 0.25, 1e-14);
  EXPECT_THROW(ideal_casimir_energy(0.0, 1e-6), DomainError);
}

TEST(DeltaEnergy, ConstantLayersMatchSwappedOrderQuadrature) {
  const double unit = units::thermal_frequency(0.5);
  for (double lambda : {10.0, 3000.0}) {
    QuadratureSpec spec;
    spec.cutoff_lambda = lambda;
    spec.rel_tol = 1e-6;
    const double em = 3e6, en = 1e5, es = 4e5;
    const auto r = delta_casimir_energy(constant_layers(em, en, es), kGeom, unit, spec);
    const double ref = swapped_order_reference(em, en, es, kGeom, lambda * unit);
    EXPECT_NEAR(r.total / ref, 1.0, 1e-4) << "lambda " << lambda << " got " << r.total << " reference " << ref;
  }
}

TEST(DeltaEnergy, ExactZeroAtTransition) {
  const auto r = delta_casimir_energy(1.0, kGeom, kFilm, kMirror);
  EXPECT_EQ(r.total, 0.0);
  EXPECT_EQ(r.te_part, 0.0);
  EXPECT_EQ(r.tm_part, 0.0);
  EXPECT_TRUE(r.converged);
  EXPECT_THROW(mode_split(r), DomainError);
  // The general path with identical film states is zero too.
  const auto same = delta_casimir_energy(constant_layers(2e6, 1e5, 1e5), kGeom, units::thermal_frequency(0.5));
  EXPECT_EQ(same.total, 0.0);
}

TEST(DeltaEnergy, SwappingStatesNegates) {
  const double unit = units::thermal_frequency(0.5);
  const SuperconductorResponse film(0.95, kFilm, {.zeta_max = 3000 * unit});
  const auto fwd = cavity_layers(film, kMirror);
  const LayerPermittivities rev{fwd.mirror, fwd.film_superconducting, fwd.film_normal};
  const auto a = delta_casimir_energy(fwd, kGeom, unit);
  const auto b = delta_casimir_energy(rev, kGeom, unit);
  EXPECT_EQ(a.total, -b.total);
  EXPECT_EQ(a.te_part, -b.te_part);
}

TEST(DeltaEnergy, CentralPointProperties) {
  const auto r = delta_casimir_energy(0.95, kGeom, kFilm, kMirror);
  EXPECT_TRUE(r.converged);
  EXPECT_GT(r.total, 0.0);
  EXPECT_NEAR(r.total, r.te_part + r.tm_part, 1e-12 * std::abs(r.total));
  EXPECT_LE(r.estimated_error, 10.0 * 1e-4 * r.total);
  EXPECT_GT(r.outer_nodes, 0u);
  // Physical scale: a small fraction of the ideal-plate energy, far above round-off.
  EXPECT_GT(r.total, 1e-10);
  EXPECT_LT(r.total, 1e-2 * std::abs(ideal_casimir_energy(1.0, kGeom.gap_width_cm)));
  const auto m = mode_split(r);
  EXPECT_GT(m.te_fraction, 0.99);
  EXPECT_LT(std::abs(m.tm_fraction), 1e-2);
  EXPECT_NEAR(m.te_fraction + m.tm_fraction, 1.0, 1e-12);
}

TEST(DeltaEnergy, TighterToleranceStaysWithinEstimate) {
  QuadratureSpec loose, tight;
  loose.rel_tol = 1e-3;
  tight.rel_tol = 1e-6;
  const double unit = units::thermal_frequency(0.5);
  const SuperconductorResponse film(0.95, kFilm, {.zeta_max = 3000 * unit});
  const auto a = delta_casimir_energy(film, kGeom, kMirror, loose);
  const auto b = delta_casimir_energy(film, kGeom, kMirror, tight);
  EXPECT_LE(std::abs(a.total - b.total), 1e-3 * b.total);
  EXPECT_LE(std::abs(a.total - b.total), a.estimated_error + b.estimated_error);
}

TEST(DeltaEnergy, TransformsAgree) {
  QuadratureSpec tangent;
  tangent.p_transform = PTransform::tangent;
  const double unit = units::thermal_frequency(0.5);
  const SuperconductorResponse film(0.95, kFilm, {.zeta_max = 3000 * unit});
  const auto a = delta_casimir_energy(film, kGeom, kMirror);
  const auto b = delta_casimir_energy(film, kGeom, kMirror, tangent);
  EXPECT_NEAR(a.total / b.total, 1.0, 1e-3);
}

TEST(DeltaEnergy, DecreasesTowardTransition) {
  double prev = std::numeric_limits<double>::infinity();
  for (double t : {0.9, 0.95, 0.99, 0.995}) {
    const double e = delta_casimir_energy(t, kGeom, kFilm, kMirror).total;
    EXPECT_GT(e, 0.0) << "t = " << t;
    EXPECT_LT(e, prev) << "t = " << t;
    prev = e;
  }
}

TEST(DeltaEnergy, GrowsWithRelaxationTime) {
  double prev = 0.0;
  for (double tau : {1e-13, 5e-13, 1e-12}) {
    SuperconductorParameters sc = kFilm;
    sc.normal_state.scattering_time_s = tau;
    const double e = delta_casimir_energy(0.95, kGeom, sc, kMirror).total;
    EXPECT_GT(e, prev) << "tau = " << tau;
    prev = e;
  }
}

TEST(DeltaEnergy, GrowsAsGapCloses) {
  double prev = 0.0;
  for (double l : {20.0, 10.0, 5.0}) {
    CavityGeometry g = kGeom;
    g.gap_width_cm = l * units::nm;
    const double e = delta_casimir_energy(0.95, g, kFilm, kMirror).total;
    EXPECT_GT(e, prev) << "L = " << l << " nm";
    prev = e;
  }
}

TEST(DeltaEnergy, LinearInArea) {
  const double unit = units::thermal_frequency(0.5);
  const SuperconductorResponse film(0.95, kFilm, {.zeta_max = 3000 * unit});
  CavityGeometry big = kGeom;
  big.plate_area_cm2 = 3.0;
  EXPECT_NEAR(delta_casimir_energy(film, big, kMirror).total / delta_casimir_energy(film, kGeom, kMirror).total, 3.0,
              1e-12);
}

TEST(DeltaEnergy, Validation) {
  QuadratureSpec bad;
  bad.cutoff_lambda = 2.0;
  EXPECT_THROW(delta_casimir_energy(0.95, kGeom, kFilm, kMirror, bad), DomainError);
  bad = {};
  bad.rel_tol = 0.5;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = {};
  bad.max_nodes = 10;
  EXPECT_THROW(bad.validate(), DomainError);
  EXPECT_THROW(delta_casimir_energy(0.0, kGeom, kFilm, kMirror), DomainError);
  // A response table that stops short of the cutoff is refused.
  const SuperconductorResponse shallow(0.95, kFilm, {.zeta_max = 100 * units::thermal_frequency(0.5)});
  EXPECT_THROW(delta_casimir_energy(shallow, kGeom, kMirror), DomainError);
}

TEST(DeltaEnergy, BudgetExhaustionCarriesPartialResult) {
  // Thousands of oscillations in ln(zeta) cannot be resolved by 64 panels.
  const double unit = units::thermal_frequency(0.5);
  const LayerPermittivities spiky{[](double) { return 3e6; }, [](double) { return 1e5; },
                                  [](double z) { return 1e5 * (1.5 + std::sin(1e3 * std::log(z))); }};
  QuadratureSpec spec;
  spec.max_nodes = 64;
  try {
    delta_casimir_energy(spiky, kGeom, unit, spec);
    FAIL() << "expected the outer budget to run out";
  } catch (const ConvergenceError& e) {
    EXPECT_FALSE(e.partial().converged);
    EXPECT_GT(e.partial().outer_nodes, 0u);
    EXPECT_NE(std::string(e.what()).find("did not converge"), std::string::npos);
  }
}
