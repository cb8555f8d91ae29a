#pragma once

// Kramers-Kronig rotation of real-frequency loss functions onto the
// imaginary axis:
//
//   eps(i zeta) - 1 = (2/pi) int_0^inf omega eps''(omega) / (zeta^2 + omega^2) d omega
//
// For the superconducting film only the difference from the Drude normal
// state is transformed. Together with the condensate weight S that
// difference combines into
//
//   eps_s(i zeta) = eps_n(i zeta) + (2/pi) J(zeta) / zeta^2,
//   J(zeta) = int omega (eps''_n - eps''_s) omega^2 / (zeta^2 + omega^2) d omega,
//
// which equals eps_n + (2/pi)[S/zeta^2 - int omega (eps''_n - eps''_s)/(zeta^2+omega^2)]
// without the cancellation between its two terms at large zeta.

#include <cmath>
#include <algorithm>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "casimir_sc/materials.hpp"
#include "casimir_sc/quadrature.hpp"
#include "casimir_sc/units.hpp"

namespace casimir_sc {

struct LossFunction {
  std::function<double(double)> evaluator;  // omega [rad/s] -> eps''
  double omega_low = 0.0;                    // support hint
  double omega_high = 0.0;                   // beyond this eps'' ~ A / omega^3
};

struct KKOptions {
  double rel_tol = 1e-10;
  std::size_t max_intervals = 4000;
};

/// eps(i zeta) from eps''(omega). The integral runs over omega = zeta tan(theta)
/// up to omega_high, with the A/omega^3 tail added in closed form.
inline double kk_transform(const LossFunction& loss, double zeta, const KKOptions& opts = {}) {
  detail::require(zeta > 0.0, "kk_transform: zeta must be positive");
  detail::require(loss.omega_high > 0.0, "kk_transform: omega_high must be positive");
  const double theta_max = std::atan(loss.omega_high / zeta);
  auto f = [&](double theta) {
    if (theta <= 0.0) return 0.0;
    const double w = zeta * std::tan(theta);
    return std::tan(theta) * loss.evaluator(w);
  };
  // One breakpoint per decade of omega keeps narrow features visible.
  std::vector<double> bp{0.0};
  const double lo = loss.omega_low > 0.0 ? loss.omega_low : loss.omega_high * 1e-12;
  for (double w = lo; w < loss.omega_high; w *= 10.0) bp.push_back(std::atan(w / zeta));
  for (double w : {0.5 * zeta, zeta, 2.0 * zeta})
    if (w > lo && w < loss.omega_high) bp.push_back(std::atan(w / zeta));
  bp.push_back(theta_max);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  const auto r = quadrature::integrate(f, std::span<const double>(bp), {opts.rel_tol, 0.0, opts.max_intervals});
  if (!r.converged) {
    std::ostringstream msg;
    msg << "kk_transform: no convergence at zeta = " << zeta << " after " << r.evaluations
        << " evaluations on " << r.intervals << " intervals (estimate " << r.value << " +- " << r.error << ")";
    throw NumericError(msg.str());
  }
  // int_{wh}^inf A/w^2 /(zeta^2 + w^2) dw = A (x - atan x) / zeta^3, x = zeta/wh
  const double wh = loss.omega_high;
  const double a = loss.evaluator(wh) * wh * wh * wh;
  const double x = zeta / wh;
  const double tail = x < 1e-3 ? a / (3.0 * wh * wh * wh) * (1.0 - 0.6 * x * x)
                               : a * (x - std::atan(x)) / (zeta * zeta * zeta);
  return 1.0 + (2.0 / std::numbers::pi) * (r.value + tail);
}

inline LossFunction drude_loss_function(const DrudeParameters& p) {
  return {[p](double w) { return drude_loss(w, p); }, 1e-6 * p.damping(),
          1e5 * std::max(p.damping(), 1.0)};
}

struct ResponseOptions {
  double zeta_min = 0.0;  // 0 selects 1e-7 k T_c / hbar
  double zeta_max = 0.0;  // 0 selects 1e4 k T_c / hbar
  std::size_t points_per_decade = 80;
  double omega_max = 0.0;  // 0 selects default_omega_max
  double rel_tol = 1e-9;
  GKernelVariant variant = GKernelVariant::corrected;
};

/// eps_s(i zeta) of the film at fixed t, tabulated on a log grid of zeta.
/// Building costs one vector quadrature over omega; lookups are interpolated.
class SuperconductorResponse {
 public:
  SuperconductorResponse(double t, const SuperconductorParameters& params, ResponseOptions opts = {})
      : t_(t), params_(params), opts_(opts) {
    params.validate();
    detail::require(t > 0.0 && t <= 1.0, "SuperconductorResponse: t must lie in (0, 1]");
    const double unit = units::thermal_frequency(params.critical_temperature_K);
    if (opts_.zeta_min <= 0.0) opts_.zeta_min = 1e-7 * unit;
    if (opts_.zeta_max <= 0.0) opts_.zeta_max = 1e4 * unit;
    if (opts_.omega_max <= 0.0) opts_.omega_max = default_omega_max(params);
    detail::require(opts_.zeta_max > opts_.zeta_min, "SuperconductorResponse: empty zeta range");
    gap_ = bcs_gap(t, params);
    if (gap_ == 0.0) return;  // normal state: J == 0 identically
    build();
  }

  double t() const { return t_; }
  double gap() const { return gap_; }
  bool is_normal() const { return gap_ == 0.0; }
  const SuperconductorParameters& parameters() const { return params_; }
  double zeta_min() const { return opts_.zeta_min; }
  double zeta_max() const { return opts_.zeta_max; }

  /// Condensate spectral weight S(T), in (rad/s)^2.
  double condensate_weight() const { return weight_; }

  /// J(zeta) from the table (direct quadrature outside it).
  double difference_integral(double zeta) const {
    if (is_normal()) return 0.0;
    if (zeta < opts_.zeta_min || zeta > opts_.zeta_max) return difference_integral_direct(zeta);
    return (*interp_)(std::log(zeta));
  }

  /// J(zeta) by its own scalar quadrature; independent of the table.
  double difference_integral_direct(double zeta) const {
    if (is_normal()) return 0.0;
    const MattisBardeen mb(gap_, params_.thermal_energy(t_), params_.normal_state, opts_.variant);
    auto f = [&](double lw) {
      const double w = std::exp(lw);
      const double w2 = w * w;
      return w2 * (drude_loss(w, params_.normal_state) - mb.loss(w)) * w2 / (zeta * zeta + w2);
    };
    const auto bp = omega_breakpoints();
    const auto r = quadrature::integrate(f, std::span<const double>(bp), {opts_.rel_tol, 0.0, 8000});
    if (!r.converged) throw NumericError("SuperconductorResponse: direct KK quadrature did not converge");
    return r.value;
  }

  /// eps_s(i zeta). Bitwise equal to drude_imag_axis at t = 1.
  double operator()(double zeta) const {
    const double normal = drude_imag_axis(zeta, params_.normal_state);
    if (is_normal()) return normal;
    return normal + (2.0 / std::numbers::pi) * difference_integral(zeta) / (zeta * zeta);
  }

 private:
  std::vector<double> omega_breakpoints() const {
    const double lo = default_omega_min(params_);
    std::vector<double> bp;
    for (double w = lo; w < opts_.omega_max; w *= 10.0) bp.push_back(std::log(w));
    // Features at the gap edge and the thermal scale.
    const double edge = units::energy_to_angular_frequency(2.0 * gap_);
    const double thermal = params_.thermal_energy(t_) / PhysicalConstants::hbar_eVs;
    for (double w : {edge, 0.5 * edge, 1.5 * edge, thermal})
      if (w > lo && w < opts_.omega_max) bp.push_back(std::log(w));
    bp.push_back(std::log(opts_.omega_max));
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return bp;
  }

  void build() {
    const double l0 = std::log(opts_.zeta_min), l1 = std::log(opts_.zeta_max);
    const std::size_t n =
        std::size_t(std::ceil((l1 - l0) / std::log(10.0) * double(opts_.points_per_decade))) + 1;
    std::vector<double> lz(n), z2(n);
    for (std::size_t i = 0; i < n; ++i) {
      lz[i] = l0 + (l1 - l0) * double(i) / double(n - 1);
      z2[i] = std::exp(2.0 * lz[i]);
    }
    const MattisBardeen mb(gap_, params_.thermal_energy(t_), params_.normal_state, opts_.variant);
    // Component 0 is S; components 1..n are J at the grid nodes.
    auto f = [&](double lw, std::span<double> out) {
      const double w = std::exp(lw);
      const double w2 = w * w;
      const double weight = w2 * (drude_loss(w, params_.normal_state) - mb.loss(w));
      out[0] = weight;
      for (std::size_t i = 0; i < n; ++i) out[i + 1] = weight * w2 / (z2[i] + w2);
    };
    const auto bp = omega_breakpoints();
    const auto r = quadrature::integrate_vector(f, std::span<const double>(bp), n + 1,
                                                {opts_.rel_tol, 0.0, 20000});
    if (!r.converged) {
      std::ostringstream msg;
      msg << "SuperconductorResponse: KK table did not converge at t = " << t_ << " (last interval ln omega in ["
          << r.last_a << ", " << r.last_b << "])";
      throw NumericError(msg.str());
    }
    weight_ = r.value[0];
    if (weight_ < -1e-6 * r.l1[0]) {
      std::ostringstream msg;
      msg << "SuperconductorResponse: negative condensate weight " << weight_ << " at t = " << t_;
      throw ConsistencyError(msg.str());
    }
    std::vector<double> j(r.value.begin() + 1, r.value.end());
    interp_ = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(lz), std::move(j));
  }

  double t_;
  SuperconductorParameters params_;
  ResponseOptions opts_;
  double gap_ = 0.0;
  double weight_ = 0.0;
  std::shared_ptr<const boost::math::interpolators::pchip<std::vector<double>>> interp_;
};

/// One-shot eps_s(i zeta); builds a response, so prefer SuperconductorResponse
/// when evaluating many zeta at the same t.
inline double superconductor_imag_axis(double zeta, double t, const SuperconductorParameters& params,
                                       const ResponseOptions& opts = {}) {
  detail::require(zeta > 0.0, "superconductor_imag_axis: zeta must be positive");
  return SuperconductorResponse(t, params, opts)(zeta);
}

}  // namespace casimir_sc
