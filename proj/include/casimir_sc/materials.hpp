#pragma once

// Loss functions on the real frequency axis and closed-form imaginary-axis
// permittivities for the two kinds of layer in the cavity: a Drude normal
// metal and a BCS superconducting film (Mattis-Bardeen response with finite
// scattering time).

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

// pchip.hpp calls isnan unqualified; fpclassify must come first.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/tools/roots.hpp>

#include "casimir_sc/errors.hpp"
#include "casimir_sc/quadrature.hpp"
#include "casimir_sc/units.hpp"

namespace casimir_sc {

/// Weak-coupling BCS ratio Delta(0) / (k T_c) = pi * exp(-Euler gamma).
inline constexpr double kBcsRatio = std::numbers::pi / 1.7810724179901979852;

struct DrudeParameters {
  double plasma_energy_eV = 0.0;   // hbar * Omega
  double scattering_time_s = 0.0;  // tau

  void validate() const {
    detail::require(plasma_energy_eV > 0.0, "DrudeParameters: plasma energy must be positive");
    detail::require(scattering_time_s > 0.0, "DrudeParameters: scattering time must be positive");
  }
  double plasma_frequency() const { return units::energy_to_angular_frequency(plasma_energy_eV); }
  double damping() const { return 1.0 / scattering_time_s; }
};

struct SuperconductorParameters {
  double critical_temperature_K = 0.0;
  double gap_at_zero_eV = 0.0;
  DrudeParameters normal_state;

  static SuperconductorParameters from_bcs_ratio(double tc_K, const DrudeParameters& normal,
                                                 double ratio = 1.764) {
    return {tc_K, ratio * units::temperature_to_energy(tc_K), normal};
  }

  void validate() const {
    detail::require(critical_temperature_K > 0.0, "SuperconductorParameters: T_c must be positive");
    detail::require(gap_at_zero_eV > 0.0, "SuperconductorParameters: gap must be positive");
    normal_state.validate();
  }

  double thermal_energy(double t) const {
    return t * units::temperature_to_energy(critical_temperature_K);
  }

  /// y0 = hbar / (2 tau_n Delta(0)).
  double impurity_parameter() const {
    return PhysicalConstants::hbar_eVs / (2.0 * normal_state.scattering_time_s * gap_at_zero_eV);
  }
};

// ---------------------------------------------------------------------------
// BCS gap

/// Delta(t)/Delta(0) from the weak-coupling gap equation, written in the
/// cutoff-free form ln(Delta0/Delta) = 2 * int_0^inf f(E)/E dxi.
inline double solve_bcs_relative_gap(double t) {
  detail::require(t >= 0.0 && t <= 1.0, "bcs gap: t must lie in [0, 1]");
  if (t == 1.0) return 0.0;
  if (t < 1e-3) return 1.0;
  const double kT = t / kBcsRatio;  // in units of Delta(0)
  const double xi_max = 60.0 * kT;
  auto residual = [&](double delta) {
    auto f = [&](double xi) {
      const double e = std::hypot(xi, delta);
      return 2.0 / (std::exp(e / kT) + 1.0) / e;
    };
    std::vector<double> pts{0.0, std::min(delta, 0.5 * xi_max), 5.0 * kT, xi_max};
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    quadrature::Options opts{1e-13, 1e-300, 2000};
    return quadrature::integrate(f, std::span<const double>(pts), opts).value - std::log(1.0 / delta);
  };
  const double lo = 1e-14;
  if (residual(1.0) <= 0.0) return 1.0;
  auto [a, b] = boost::math::tools::bisect(residual, lo, 1.0,
                                           boost::math::tools::eps_tolerance<double>(48));
  return 0.5 * (a + b);
}

struct GapCurve {
  std::vector<double> relative_temperature;
  std::vector<double> gap_eV;
};

/// Universal weak-coupling curve, tabulated once on a uniform t grid. The
/// interpolated quantity is (Delta/Delta0)^2: monotone data, so PCHIP keeps
/// it monotone, and linear at the transition with the known slope.
class BcsGapTable {
 public:
  static constexpr std::size_t kPoints = 201;

  static const BcsGapTable& instance() {
    static const BcsGapTable table;
    return table;
  }

  double relative_gap(double t) const {
    detail::require(t >= 0.0 && t <= 1.0, "bcs_gap: t must lie in [0, 1]");
    if (t == 1.0) return 0.0;
    if (t == 0.0) return 1.0;
    return std::sqrt(std::clamp(interp_(t), 0.0, 1.0));
  }

  /// h(1) = e^gamma * sqrt(8 / (7 zeta(3))), i.e. Delta ~ 1.7367 Delta0 sqrt(1-t).
  static double edge_coefficient() { return 1.7810724179901979852 * std::sqrt(8.0 / (7.0 * 1.2020569031595942854)); }

  GapCurve curve(double gap0_eV) const {
    GapCurve c;
    for (std::size_t i = 0; i < kPoints; ++i) {
      const double t = double(i) / double(kPoints - 1);
      c.relative_temperature.push_back(t);
      c.gap_eV.push_back(gap0_eV * relative_gap(t));
    }
    return c;
  }

 private:
  BcsGapTable() : interp_(make()) {}

  static boost::math::interpolators::pchip<std::vector<double>> make() {
    std::vector<double> t(kPoints), d2(kPoints);
    for (std::size_t i = 0; i < kPoints; ++i) {
      t[i] = double(i) / double(kPoints - 1);
      const double d = solve_bcs_relative_gap(t[i]);
      d2[i] = d * d;
    }
    const double h = edge_coefficient();
    return boost::math::interpolators::pchip<std::vector<double>>(std::move(t), std::move(d2), 0.0, -h * h);
  }

  boost::math::interpolators::pchip<std::vector<double>> interp_;
};

/// Delta(T) in eV for t = T/T_c.
inline double bcs_gap(double t, const SuperconductorParameters& params) {
  return params.gap_at_zero_eV * BcsGapTable::instance().relative_gap(t);
}

// ---------------------------------------------------------------------------
// Drude metal

/// Im eps(omega) = Omega^2 / (omega tau (omega^2 + 1/tau^2)).
inline double drude_loss(double omega, const DrudeParameters& p) {
  detail::require(omega > 0.0, "drude_loss: omega must be positive");
  const double wp = p.plasma_frequency();
  const double g = p.damping();
  return wp * wp * g / (omega * (omega * omega + g * g));
}

/// eps(i zeta) = 1 + Omega^2 / (zeta (zeta + 1/tau)).
inline double drude_imag_axis(double zeta, const DrudeParameters& p) {
  detail::require(zeta > 0.0, "drude_imag_axis: zeta must be positive");
  const double wp = p.plasma_frequency();
  return 1.0 + wp * wp / (zeta * (zeta + p.damping()));
}

// ---------------------------------------------------------------------------
// Mattis-Bardeen

enum class GKernelVariant {
  corrected,  // second term over (P1+P2)^2 + (hbar/tau)^2
  verbatim,   // both terms over (P1-P2)^2 + (hbar/tau)^2
};

namespace detail {

// g times the substitution Jacobian `jac`, given P1, P2 and
// n_over = (E(E+hw) + Delta^2) * jac / (P1 P2) precomputed by the caller so
// that endpoint zeros of P1 or P2 never divide.
inline double g_times_jacobian(double p1, double p2, double jac, double n_over, double broadening,
                               GKernelVariant variant) {
  const double b2 = broadening * broadening;
  const double dminus = (p1 - p2) * (p1 - p2) + b2;
  const double dplus = variant == GKernelVariant::corrected ? (p1 + p2) * (p1 + p2) + b2 : dminus;
  return (jac + n_over) / dminus - (jac - n_over) / dplus;
}

}  // namespace detail

/// Coherence-factor kernel g(omega, tau, E) in 1/eV^2. P1 and P2 take the
/// sign of E + hbar*omega and E respectively, so on the pair-breaking
/// interval E < -Delta the product P1*P2 is negative.
inline double g_kernel(double energy_eV, double omega, double tau, double gap_eV,
                       GKernelVariant variant = GKernelVariant::corrected) {
  detail::require(tau > 0.0, "g_kernel: tau must be positive");
  const double hw = PhysicalConstants::hbar_eVs * omega;
  const double e1 = energy_eV + hw;
  const double e2 = energy_eV;
  if (std::abs(e1) <= gap_eV || std::abs(e2) <= gap_eV)
    throw DomainError("g_kernel: |E| and |E + hbar omega| must exceed the gap");
  const double p1 = std::copysign(std::sqrt(e1 * e1 - gap_eV * gap_eV), e1);
  const double p2 = std::copysign(std::sqrt(e2 * e2 - gap_eV * gap_eV), e2);
  const double n_over = (e1 * e2 + gap_eV * gap_eV) / (p1 * p2);
  return detail::g_times_jacobian(p1, p2, 1.0, n_over, PhysicalConstants::hbar_eVs / tau, variant);
}

/// Regular part of Im eps_s(omega) for a film with gap `gap_eV` at thermal
/// energy `kT_eV`. Holds everything that is independent of omega.
class MattisBardeen {
 public:
  MattisBardeen(double gap_eV, double kT_eV, const DrudeParameters& normal,
                GKernelVariant variant = GKernelVariant::corrected, double inner_rel_tol = 1e-11)
      : gap_(gap_eV), kT_(kT_eV), normal_(normal), variant_(variant), tol_(inner_rel_tol) {
    normal.validate();
    require(gap_eV >= 0.0 && kT_eV >= 0.0, "MattisBardeen: gap and temperature must be non-negative");
    broadening_ = PhysicalConstants::hbar_eVs / normal.scattering_time_s;
  }

  MattisBardeen(double t, const SuperconductorParameters& sc,
                GKernelVariant variant = GKernelVariant::corrected, double inner_rel_tol = 1e-11)
      : MattisBardeen(bcs_gap(t, sc), sc.thermal_energy(t), sc.normal_state, variant, inner_rel_tol) {}

  double gap() const { return gap_; }
  double thermal_energy() const { return kT_; }
  const DrudeParameters& normal_state() const { return normal_; }

  /// Bracketed sum of thermal and pair-breaking integrals, in 1/eV.
  double kernel_integral(double omega) const {
    const double hw = PhysicalConstants::hbar_eVs * omega;
    // Errors are judged against the gapless kernel, the scale of eps''_n.
    const double floor = tol_ * drude_loss(omega, normal_) / prefactor(omega);
    return thermal(hw, floor) + pair_breaking(hw, floor);
  }

  double loss(double omega) const {
    require(omega > 0.0, "mattis_bardeen_loss: omega must be positive");
    if (gap_ == 0.0 && !force_integral_) return drude_loss(omega, normal_);
    return prefactor(omega) * kernel_integral(omega);
  }

  /// Evaluate the gapless case through the kernel integrals instead of the
  /// Drude shortcut (used to check that the two agree).
  void force_integral(bool on) { force_integral_ = on; }

 private:
  double prefactor(double omega) const {
    const double wp = normal_.plasma_frequency();
    return PhysicalConstants::hbar_eVs * wp * wp / (2.0 * omega * omega * normal_.scattering_time_s);
  }

  static double tanh_half(double e, double kT) {
    if (kT == 0.0) return e > 0 ? 1.0 : (e < 0 ? -1.0 : 0.0);
    return std::tanh(e / (2.0 * kT));
  }

  // tanh(e1/2kT) - tanh(e/2kT) for e1 > e, as sinh(a-b) / (cosh a cosh b)
  // in logs: no cancellation when hw << kT and no overflow when kT -> 0.
  static double tanh_diff(double e1, double e, double kT) {
    const double a = e1 / (2.0 * kT), b = e / (2.0 * kT), delta = (e1 - e) / (2.0 * kT);
    auto log_cosh = [](double x) {
      x = std::abs(x);
      return x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2;
    };
    const double log_sinh = delta < 1.0 ? std::log(std::sinh(delta))
                                        : delta + std::log1p(-std::exp(-2.0 * delta)) - std::numbers::ln2;
    return std::exp(log_sinh - log_cosh(a) - log_cosh(b));
  }

  // int_Delta^inf [tanh((E+hw)/2kT) - tanh(E/2kT)] g dE
  double thermal(double hw, double floor) const {
    if (kT_ == 0.0) return 0.0;
    const double d = gap_;
    const double e_span = 60.0 * kT_;
    const double b = broadening_;
    if (d == 0.0) {
      auto f = [&](double e) {
        const double e1 = e + hw;
        const double th = tanh_diff(e1, e, kT_);
        return th * detail::g_times_jacobian(e1, e, 1.0, 1.0, b, variant_);
      };
      return integrate_checked(f, thermal_breaks(0.0, e_span, hw), hw, floor, "thermal");
    }
    // E = Delta cosh(u): dE = P2 du removes the 1/sqrt edge.
    auto f = [&](double u) {
      const double e = d * std::cosh(u);
      const double p2 = d * std::sinh(u);
      const double e1 = e + hw;
      const double p1 = std::sqrt((e1 - d) * (e1 + d));
      const double th = tanh_diff(e1, e, kT_);
      if (th == 0.0) return 0.0;
      const double n_over = (e * e1 + d * d) / p1;  // times jac = p2, over p1 p2
      return th * detail::g_times_jacobian(p1, p2, p2, n_over, b, variant_);
    };
    const double umax = std::acosh((d + e_span) / d);
    std::vector<double> bp{0.0};
    // Near the edge P1 - P2 ~ hw sqrt(Delta / 2(E - Delta)) crosses the broadening at E - Delta ~ Delta (hw/b)^2 / 2.
    const double cross = 0.5 * d * (hw / b) * (hw / b);
    for (double de : {1e-4 * hw, 1e-2 * hw, hw, kT_, 5 * kT_, 0.1 * cross, cross, 10.0 * cross}) {
      const double u = std::acosh(1.0 + de / d);
      if (u > 0.0 && u < umax) bp.push_back(u);
    }
    bp.push_back(umax);
    std::sort(bp.begin(), bp.end());
    return integrate_checked(f, bp, hw, floor, "thermal");
  }

  // theta(hw - 2 Delta) int_{Delta-hw}^{-Delta} -tanh(E/2kT) g dE, split at
  // the midpoint E = -hw/2 so each half has a single square-root edge.
  double pair_breaking(double hw, double floor) const {
    const double d = gap_;
    if (hw <= 2.0 * d) return 0.0;
    const double b = broadening_;
    if (d == 0.0) {
      auto f = [&](double e) {
        const double e1 = e + hw;
        return -tanh_half(e, kT_) * detail::g_times_jacobian(e1, e, 1.0, 1.0, b, variant_);
      };
      const std::array<double, 3> bp{-hw, -0.5 * hw, 0.0};
      return integrate_checked(f, std::vector<double>(bp.begin(), bp.end()), hw, floor, "pair-breaking");
    }
    const double umax = std::acosh(0.5 * hw / d);
    // Upper half: E = -Delta cosh(u), P2 = -Delta sinh(u), |dE| = |P2| du.
    auto upper = [&](double u) {
      const double e = -d * std::cosh(u);
      const double p2 = -d * std::sinh(u);
      const double e1 = e + hw;
      const double p1 = std::sqrt((e1 - d) * (e1 + d));
      const double jac = -p2;
      const double n_over = -(e * e1 + d * d) / p1;  // N * jac / (p1 p2)
      return -tanh_half(e, kT_) * detail::g_times_jacobian(p1, p2, jac, n_over, b, variant_);
    };
    // Lower half: E + hw = Delta cosh(u), P1 = Delta sinh(u), dE = P1 du.
    auto lower = [&](double u) {
      const double e1 = d * std::cosh(u);
      const double p1 = d * std::sinh(u);
      const double e = e1 - hw;
      const double p2 = -std::sqrt((-e - d) * (-e + d));
      const double n_over = (e * e1 + d * d) / p2;
      return -tanh_half(e, kT_) * detail::g_times_jacobian(p1, p2, p1, n_over, b, variant_);
    };
    std::vector<double> bp{0.0};
    for (double frac : {1e-3, 0.1, 0.5, 0.9, 0.999}) {
      const double u = umax * frac;
      if (u > 0.0) bp.push_back(u);
    }
    // P1 + P2 vanishes at the midpoint with slope ~ hw / P_mid; resolve |P1 + P2| ~ b.
    const double p_mid = std::sqrt(0.25 * hw * hw - d * d);
    for (double k : {1.0, 10.0, 100.0}) {
      const double e = 0.5 * hw - k * b * p_mid / hw;
      if (e > d) bp.push_back(std::acosh(e / d));
    }
    bp.push_back(umax);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return integrate_checked(upper, bp, hw, floor, "pair-breaking") + integrate_checked(lower, bp, hw, floor, "pair-breaking");
  }

  std::vector<double> thermal_breaks(double lo, double span, double hw) const {
    std::vector<double> bp{lo, lo + std::min(hw, span) * 0.5, lo + kT_, lo + 5 * kT_, lo + span};
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return bp;
  }

  template <class F>
  double integrate_checked(F&& f, const std::vector<double>& bp, double hw, double floor, const char* what) const {
    quadrature::Options opts{tol_, floor, 4000};
    auto r = quadrature::integrate(f, std::span<const double>(bp), opts);
    if (!r.converged && r.error > 1e3 * std::max(tol_ * r.l1, floor)) {
      std::ostringstream msg;
      msg << "mattis_bardeen_loss: " << what << " integral did not converge (hbar omega " << hw << " eV, gap " << gap_
          << " eV, kT " << kT_ << " eV, error " << r.error << " of " << r.l1 << ")";
      throw NumericError(msg.str());
    }
    return r.value;
  }

  static void require(bool ok, const char* what) { casimir_sc::detail::require(ok, what); }

  double gap_;
  double kT_;
  DrudeParameters normal_;
  GKernelVariant variant_;
  double tol_;
  double broadening_ = 0.0;
  bool force_integral_ = false;
};

inline double mattis_bardeen_loss(double omega, double t, const SuperconductorParameters& params,
                                  GKernelVariant variant = GKernelVariant::corrected) {
  detail::require(t >= 0.0 && t <= 1.0, "mattis_bardeen_loss: t must lie in [0, 1]");
  return MattisBardeen(t, params, variant).loss(omega);
}

/// Upper frequency beyond which eps''_s and eps''_n are treated as equal.
inline double default_omega_max(const SuperconductorParameters& params) {
  const double thermal = 20.0 * units::thermal_frequency(params.critical_temperature_K);
  const double gap = 2000.0 * units::energy_to_angular_frequency(2.0 * params.gap_at_zero_eV);
  return std::max(thermal, gap);
}

/// Lowest frequency kept in spectral-weight integrals; the neglected sliver
/// scales as omega_low * ln(omega_low).
inline double default_omega_min(const SuperconductorParameters& params) {
  return 1e-6 * units::thermal_frequency(params.critical_temperature_K);
}

/// S(T) = int_0^omega_max omega (eps''_n - eps''_s,reg) d omega: the weight
/// the condensate moves into the zero-frequency term.
inline double sum_rule_deficit(double t, const SuperconductorParameters& params, double omega_max,
                               GKernelVariant variant = GKernelVariant::corrected,
                               double rel_tol = 1e-9) {
  params.validate();
  detail::require(t >= 0.0 && t <= 1.0, "sum_rule_deficit: t must lie in [0, 1]");
  if (t == 1.0) return 0.0;
  const MattisBardeen mb(t, params, variant);
  const auto& normal = params.normal_state;
  const double omega_min = default_omega_min(params);
  detail::require(omega_max > 100.0 * omega_min, "sum_rule_deficit: omega_max too small");
  {
    const double n = drude_loss(omega_max, normal);
    const double rel = std::abs(n - mb.loss(omega_max)) / n;
    if (rel > 1e-2) {
      std::ostringstream msg;
      msg << "sum_rule_deficit: omega_max = " << omega_max
          << " rad/s is below the region where eps''_s matches eps''_n (relative difference " << rel << ")";
      throw DomainError(msg.str());
    }
  }
  auto f = [&](double lw) {
    const double w = std::exp(lw);
    return w * w * (drude_loss(w, normal) - mb.loss(w));
  };
  const double decades = std::log10(omega_max / omega_min);
  std::vector<double> bp;
  for (std::size_t i = 0; i <= std::size_t(std::ceil(decades)); ++i)
    bp.push_back(std::min(std::log(omega_min) + double(i) * std::log(10.0), std::log(omega_max)));
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  const auto r = quadrature::integrate(f, std::span<const double>(bp), {rel_tol, 0.0, 8000});
  if (!r.converged) throw NumericError("sum_rule_deficit: quadrature did not converge");
  if (r.value < -10.0 * r.error - 1e-9 * r.l1) {
    std::ostringstream msg;
    msg << "sum_rule_deficit: negative spectral weight " << r.value << " at t = " << t;
    throw ConsistencyError(msg.str());
  }
  return r.value;
}

}  // namespace casimir_sc
