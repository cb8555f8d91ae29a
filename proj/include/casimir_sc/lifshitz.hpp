#pragma once

// Change of the Casimir energy of the cavity when the film goes normal:
//
//   dE = hbar A / (4 pi^2 c^2) int_1^inf p dp int_0^{Lambda k T_c/hbar} dzeta
//        zeta^2 log[(Q_n^TE Q_n^TM) / (Q_s^TE Q_s^TM)],
//
// reported as E_n - E_s. The outer zeta integral runs in ln(zeta) on
// per-decade panels; the inner p integral runs in u = ln p (or a tangent map)
// and is truncated where exp(-2 zeta p L / c) < e^-50.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "casimir_sc/cavity.hpp"
#include "casimir_sc/dispersion.hpp"
#include "casimir_sc/materials.hpp"
#include "casimir_sc/quadrature.hpp"
#include "casimir_sc/units.hpp"

namespace casimir_sc {

enum class PTransform { exponential, tangent };

struct QuadratureSpec {
  double cutoff_lambda = 3000.0;
  double rel_tol = 1e-4;
  std::size_t max_nodes = 4000;  // adaptive panels per axis
  PTransform p_transform = PTransform::exponential;

  void validate() const {
    detail::require(cutoff_lambda >= 5.0 && cutoff_lambda <= 1e4, "QuadratureSpec: cutoff_lambda must lie in [5, 1e4]");
    detail::require(rel_tol > 0.0 && rel_tol <= 1e-2, "QuadratureSpec: rel_tol must lie in (0, 1e-2]");
    detail::require(max_nodes >= 64, "QuadratureSpec: max_nodes must be at least 64");
  }
};

struct DeltaEnergyResult {
  double total = 0.0;  // erg
  double te_part = 0.0;
  double tm_part = 0.0;
  double estimated_error = 0.0;
  std::size_t outer_nodes = 0;
  std::size_t inner_nodes = 0;
  double cutoff_used = 0.0;
  double sliver = 0.0;  // analytic estimate of the [0, zeta_min] contribution
  bool converged = false;
};

/// Non-convergence; carries the partial result.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, DeltaEnergyResult partial)
      : NumericError(what), partial_(partial) {}
  const DeltaEnergyResult& partial() const { return partial_; }

 private:
  DeltaEnergyResult partial_;
};

/// -pi^2 hbar c A / (720 L^3), ideal plates.
inline double ideal_casimir_energy(double area_cm2, double gap_cm) {
  detail::require(area_cm2 > 0.0 && gap_cm > 0.0, "ideal_casimir_energy: A and L must be positive");
  return -std::numbers::pi * std::numbers::pi * PhysicalConstants::hbar * PhysicalConstants::c * area_cm2 /
         (720.0 * gap_cm * gap_cm * gap_cm);
}

namespace detail {

struct InnerResult {
  double te, tm, error;
  std::size_t evaluations;
};

// int_1^inf p dp zeta^2 log(Q_n/Q_s) at fixed zeta, per polarization.
// abs_floor bounds the required error from below; near the cutoff the
// integrand is a difference of logs far below its own rounding noise.
inline InnerResult inner_p_integral(double zeta, const CavityGeometry& geom, double eps_mirror, double eps_n,
                                    double eps_s, const QuadratureSpec& spec, double abs_floor = 0.0) {
  const double scale = PhysicalConstants::c / (2.0 * zeta * geom.gap_width_cm);  // p where 2 zeta p L/c = 1
  const double p_max = 1.0 + 50.0 * scale;
  // Landmarks in p: the gap exponential and the film/mirror K factors turning over.
  std::vector<double> marks{scale, 10.0 * scale, std::sqrt(eps_n), std::sqrt(eps_s), std::sqrt(eps_mirror),
                            PhysicalConstants::c / (2.0 * zeta * geom.film_thickness_cm)};

  // Components: TE, TM, and the rounding scale of both (used only on failure).
  auto value = [&](double p, double jac, std::span<double> out) {
    const auto v = integrand(zeta, p, geom, eps_mirror, eps_n, eps_s);
    out[0] = p * jac * v.te;
    out[1] = p * jac * v.tm;
    if (out.size() > 2) out[2] = p * jac * v.magnitude;
  };

  std::vector<double> bp;
  std::function<void(double, std::span<double>)> mapped;
  if (spec.p_transform == PTransform::exponential) {
    const double u_max = std::log(p_max);
    bp = {0.0, u_max};
    for (double m : marks)
      if (m > 1.0 && m < p_max) bp.push_back(std::log(m));
    mapped = [&](double u, std::span<double> out) {
      const double p = std::exp(u);
      value(p, p, out);
    };
  } else {
    // p = 1 + s tan(theta)
    const double s = scale;
    const double th_max = std::atan((p_max - 1.0) / s);
    bp = {0.0, th_max};
    for (double m : marks)
      if (m > 1.0 && m < p_max) bp.push_back(std::atan((m - 1.0) / s));
    mapped = [&, s](double th, std::span<double> out) {
      const double tn = std::tan(th);
      value(1.0 + s * tn, s * (1.0 + tn * tn), out);
    };
  }
  std::sort(bp.begin(), bp.end());
  auto run = [&](double floor) {
    return quadrature::integrate_vector(mapped, std::span<const double>(bp), 2,
                                        {spec.rel_tol / 3.0, floor, spec.max_nodes}, quadrature::Norm::shared);
  };
  auto r = run(abs_floor);
  std::size_t evaluations = r.evaluations;
  if (!r.converged) {
    // When n and s differ only at rounding level the integrand is noise and
    // cannot meet a relative target; retry against the rounding floor.
    const auto m = quadrature::integrate_vector(mapped, std::span<const double>(bp), 3, {1e-2, 0.0, spec.max_nodes},
                                                quadrature::Norm::per_component);
    evaluations += m.evaluations;
    const double noise = 256.0 * std::numeric_limits<double>::epsilon() * m.l1[2];
    if (noise > abs_floor) {
      r = run(noise);
      evaluations += r.evaluations;
    }
  }
  if (!r.converged) {
    std::ostringstream msg;
    msg << "delta_casimir_energy: inner p quadrature did not converge at zeta = " << zeta << " rad/s (estimate "
        << r.value[0] + r.value[1] << " +- " << r.error[0] + r.error[1] << ")";
    throw NumericError(msg.str());
  }
  return {r.value[0], r.value[1], r.error[0] + r.error[1], evaluations};
}

}  // namespace detail

/// dE for arbitrary film/mirror evaluators. `thermal_frequency` is k T_c/hbar
/// and sets both the cutoff and the lower panel edge 1e-6 k T_c/hbar.
inline DeltaEnergyResult delta_casimir_energy(const LayerPermittivities& layers, const CavityGeometry& geom,
                                              double thermal_frequency, const QuadratureSpec& spec = {}) {
  geom.validate();
  spec.validate();
  detail::require(thermal_frequency > 0.0, "delta_casimir_energy: thermal frequency must be positive");
  const double zeta_min = 1e-6 * thermal_frequency;
  const double zeta_max = spec.cutoff_lambda * thermal_frequency;
  const double prefactor = PhysicalConstants::hbar * geom.plate_area_cm2 /
                           (4.0 * std::numbers::pi * std::numbers::pi * PhysicalConstants::c * PhysicalConstants::c);

  std::size_t inner_nodes = 0;
  double outer_floor = 0.0;  // absolute error allowance per unit ln(zeta), outer units
  auto at_zeta = [&](double zeta, const QuadratureSpec& s) {
    auto r = detail::inner_p_integral(zeta, geom, layers.mirror(zeta), layers.film_normal(zeta),
                                      layers.film_superconducting(zeta), s, outer_floor / zeta);
    inner_nodes += r.evaluations;
    return r;
  };

  // Coarse pass, one node per decade, for the peak of the outer integrand.
  // Inner errors up to rel_tol * peak / (3 * span) per unit ln(zeta) then
  // sum to at most a third of the outer budget.
  const double span = std::log(zeta_max / zeta_min);
  {
    QuadratureSpec coarse = spec;
    coarse.rel_tol = 1e-2;
    double peak = 0.0;
    for (double z = zeta_min; z <= zeta_max; z *= 10.0) {
      const auto r = at_zeta(z, coarse);
      peak = std::max(peak, z * (std::abs(r.te) + std::abs(r.tm)));
    }
    outer_floor = spec.rel_tol * peak / (3.0 * span);
  }

  // Components: TE, TM, inner error, all in d ln(zeta).
  auto f = [&](double lz, std::span<double> out) {
    const double zeta = std::exp(lz);
    const auto r = at_zeta(zeta, spec);
    out[0] = zeta * r.te;
    out[1] = zeta * r.tm;
    out[2] = zeta * r.error;
  };
  std::vector<double> bp;
  for (double z = zeta_min; z < zeta_max; z *= 10.0) bp.push_back(std::log(z));
  bp.push_back(std::log(zeta_max));

  const auto r = quadrature::integrate_vector(f, std::span<const double>(bp), 3,
                                              {spec.rel_tol, 0.0, spec.max_nodes}, quadrature::Norm::shared);

  DeltaEnergyResult out;
  out.cutoff_used = spec.cutoff_lambda;
  out.outer_nodes = r.evaluations;

  // Below zeta_min the zeta-integrand behaves as a power law; fit it from two points.
  const auto g1 = at_zeta(zeta_min, spec), g2 = at_zeta(2.0 * zeta_min, spec);
  double sliver_te = 0.0, sliver_tm = 0.0;
  auto power_sliver = [&](double a, double b) {
    if (a == 0.0) return 0.0;
    const double k = (b / a > 0.0) ? std::log2(b / a) : 0.0;
    return k > -1.0 ? a * zeta_min / (k + 1.0) : a * zeta_min;
  };
  sliver_te = power_sliver(g1.te, g2.te);
  sliver_tm = power_sliver(g1.tm, g2.tm);
  out.inner_nodes = inner_nodes;

  out.te_part = prefactor * (r.value[0] + sliver_te);
  out.tm_part = prefactor * (r.value[1] + sliver_tm);
  out.total = out.te_part + out.tm_part;
  out.sliver = prefactor * (sliver_te + sliver_tm);
  out.estimated_error =
      prefactor * (r.error[0] + r.error[1] + std::abs(r.value[2]) + std::abs(sliver_te) + std::abs(sliver_tm));
  out.converged = r.converged;
  if (!r.converged) {
    std::ostringstream msg;
    msg << "delta_casimir_energy: outer zeta quadrature did not converge (partial " << out.total << " +- "
        << out.estimated_error << " erg after " << out.outer_nodes << " outer nodes; worst ln zeta in ["
        << r.last_a << ", " << r.last_b << "])";
    throw ConvergenceError(msg.str(), out);
  }
  return out;
}

inline LayerPermittivities cavity_layers(const SuperconductorResponse& film, const DrudeParameters& mirror) {
  const DrudeParameters normal = film.parameters().normal_state;
  return {[mirror](double z) { return drude_imag_axis(z, mirror); },
          [normal](double z) { return drude_imag_axis(z, normal); },
          [&film](double z) { return film(z); }};
}

/// dE with a prebuilt film response (its t is used).
inline DeltaEnergyResult delta_casimir_energy(const SuperconductorResponse& film, const CavityGeometry& geom,
                                              const DrudeParameters& mirror, const QuadratureSpec& spec = {}) {
  mirror.validate();
  const double unit = units::thermal_frequency(film.parameters().critical_temperature_K);
  if (film.is_normal()) {
    geom.validate();
    spec.validate();
    DeltaEnergyResult zero;
    zero.cutoff_used = spec.cutoff_lambda;
    zero.converged = true;
    return zero;
  }
  detail::require(film.zeta_max() >= spec.cutoff_lambda * unit,
                  "delta_casimir_energy: film response table does not reach the cutoff");
  return delta_casimir_energy(cavity_layers(film, mirror), geom, unit, spec);
}

inline DeltaEnergyResult delta_casimir_energy(double t, const CavityGeometry& geom,
                                              const SuperconductorParameters& sc, const DrudeParameters& mirror,
                                              const QuadratureSpec& spec = {}, const ResponseOptions& response = {}) {
  detail::require(t > 0.0 && t <= 1.0, "delta_casimir_energy: t must lie in (0, 1]");
  spec.validate();
  ResponseOptions ro = response;
  const double unit = units::thermal_frequency(sc.critical_temperature_K);
  ro.zeta_max = std::max(ro.zeta_max, spec.cutoff_lambda * unit);
  const SuperconductorResponse film(t, sc, ro);
  return delta_casimir_energy(film, geom, mirror, spec);
}

struct CutoffPoint {
  double lambda;
  double delta_energy;
};

struct CutoffScan {
  std::vector<CutoffPoint> points;
  double max_relative_spread = 0.0;  // (max - min) / |mean|; 0 when all vanish
};

/// dE for each cutoff, sharing one film response.
inline CutoffScan cutoff_sensitivity(double t, const CavityGeometry& geom, const SuperconductorParameters& sc,
                                     const DrudeParameters& mirror, const std::vector<double>& lambdas,
                                     const QuadratureSpec& base = {}) {
  detail::require(!lambdas.empty(), "cutoff_sensitivity: no cutoffs given");
  QuadratureSpec spec = base;
  for (double l : lambdas) {
    spec.cutoff_lambda = l;
    spec.validate();
  }
  ResponseOptions ro;
  ro.zeta_max = std::max(1e4, *std::max_element(lambdas.begin(), lambdas.end())) *
                units::thermal_frequency(sc.critical_temperature_K);
  const SuperconductorResponse film(t, sc, ro);
  CutoffScan scan;
  double lo = 0.0, hi = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    spec.cutoff_lambda = lambdas[i];
    const double e = delta_casimir_energy(film, geom, mirror, spec).total;
    scan.points.push_back({lambdas[i], e});
    lo = i == 0 ? e : std::min(lo, e);
    hi = i == 0 ? e : std::max(hi, e);
    sum += e;
  }
  const double mean = sum / double(lambdas.size());
  scan.max_relative_spread = mean == 0.0 ? 0.0 : (hi - lo) / std::abs(mean);
  return scan;
}

struct ModeSplit {
  double te_fraction;
  double tm_fraction;
};

inline ModeSplit mode_split(const DeltaEnergyResult& r) {
  if (r.total == 0.0 || std::abs(r.total) <= r.estimated_error)
    throw DomainError("mode_split: total energy change indistinguishable from zero");
  return {r.te_part / r.total, r.tm_part / r.total};
}

inline ModeSplit mode_split(double t, const CavityGeometry& geom, const SuperconductorParameters& sc,
                            const DrudeParameters& mirror, const QuadratureSpec& spec = {}) {
  return mode_split(delta_casimir_energy(t, geom, sc, mirror, spec));
}

}  // namespace casimir_sc
