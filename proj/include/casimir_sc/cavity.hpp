#pragma once

// Imaginary-frequency optics of the five-layer stack
//   mirror | vacuum L | film D | vacuum L | mirror
// with semi-infinite mirrors. Layer indices: 1 vacuum, 2 mirror, I film in
// state n or s.

#include <cmath>
#include <functional>
#include <sstream>

#include "casimir_sc/errors.hpp"
#include "casimir_sc/units.hpp"

namespace casimir_sc {

struct CavityGeometry {
  double gap_width_cm = 0.0;       // L
  double film_thickness_cm = 0.0;  // D
  double plate_area_cm2 = 0.0;     // A

  void validate() const {
    detail::require(gap_width_cm > 0.0, "CavityGeometry: gap width must be positive");
    detail::require(film_thickness_cm > 0.0, "CavityGeometry: film thickness must be positive");
    detail::require(plate_area_cm2 > 0.0, "CavityGeometry: plate area must be positive");
  }
  double film_volume() const { return plate_area_cm2 * film_thickness_cm; }
};

enum class Polarization { TE, TM };
enum class FilmState { normal, superconducting };

/// Imaginary-axis permittivities of the three materials, as functions of zeta.
struct LayerPermittivities {
  std::function<double(double)> mirror;
  std::function<double(double)> film_normal;
  std::function<double(double)> film_superconducting;
};

/// K = sqrt(eps(i zeta) - 1 + p^2).
inline double k_factor(double eps_iz, double p) {
  const double arg = eps_iz - 1.0 + p * p;
  if (!(arg >= 0.0)) throw DomainError("k_factor: negative radicand");
  return std::sqrt(arg);
}

inline double fresnel_te(double k_j, double k_l) {
  detail::require(k_j > 0.0 && k_l > 0.0, "fresnel_te: K factors must be positive");
  return (k_j - k_l) / (k_j + k_l);
}

inline double fresnel_tm(double k_j, double k_l, double eps_j, double eps_l) {
  detail::require(k_j > 0.0 && k_l > 0.0 && eps_j > 0.0 && eps_l > 0.0,
                  "fresnel_tm: arguments must be positive");
  return (k_j * eps_l - k_l * eps_j) / (k_j * eps_l + k_l * eps_j);
}

namespace detail {

// A reflection coefficient (u - v)/(u + v) of the vacuum side against layer
// l, with 1 - r and 1 + r formed without cancellation.
struct Reflection {
  double r, one_minus, one_plus;
};

inline Reflection reflection(double u, double v) {
  const double s = u + v;
  return {(u - v) / s, 2.0 * v / s, 2.0 * u / s};
}

// From vacuum (K1 = p, eps1 = 1) into a layer with (K, eps).
inline Reflection vacuum_reflection(Polarization pol, double p, double k, double eps) {
  return pol == Polarization::TE ? reflection(p, k) : reflection(p * eps, k);
}

// Q = N/D with
//   N = (1-a^2)(1-bx)(1+bx) + (a-bx)^2 (1-y),  D = (1-a^2) + a^2 (1-y),
// a = Delta_1I, b = Delta_12, x = exp(-2 zeta p L/c), y = exp(-2 zeta K_I D/c).
// Near Q = 1 the log uses N - D = bx [(1-y)(bx - 2a) - (1-a^2) bx]; elsewhere
// N comes from 1 -+ bx and a - bx built out of 1 -+ b, 1 - a and (1 - x).
struct GapFactor {
  Reflection b;
  double x;          // exp(-2 zeta p L/c)
  double one_minus;  // 1 - x
  double bx() const { return b.r * x; }
};

inline double log_q(const Reflection& a, const GapFactor& g, double one_minus_y) {
  const double one_minus_a2 = a.one_minus * a.one_plus;
  const double den = one_minus_a2 + a.r * a.r * one_minus_y;
  if (!(den > 1e-300)) {
    std::ostringstream msg;
    msg << "q_factor: denominator " << den << " below 1e-300";
    throw NumericError(msg.str());
  }
  const double bx = g.bx();
  const double diff = bx * (one_minus_y * (bx - 2.0 * a.r) - one_minus_a2 * bx);
  if (std::abs(diff) <= 0.5 * den) return std::log1p(diff / den);
  const double one_minus_bx = g.b.one_minus + g.b.r * g.one_minus;
  const double one_plus_bx = g.b.one_plus - g.b.r * g.one_minus;
  const double a_minus_bx = (g.b.one_minus - a.one_minus) + g.b.r * g.one_minus;
  const double num = one_minus_a2 * one_minus_bx * one_plus_bx + a_minus_bx * a_minus_bx * one_minus_y;
  if (!(num > 0.0)) {
    std::ostringstream msg;
    msg << "q_factor: non-positive Q (N = " << num << ", D = " << den << ")";
    throw ConsistencyError(msg.str());
  }
  return std::log(num / den);
}

// Everything at one (zeta, p) node that does not depend on the film state.
struct SharedNode {
  double p;
  GapFactor te, tm;
  double film_arg;  // 2 zeta D / c
};

inline SharedNode shared_node(double zeta, double p, double eps_mirror, const CavityGeometry& g) {
  const double k2 = k_factor(eps_mirror, p);
  const double arg = -2.0 * zeta * p * g.gap_width_cm / PhysicalConstants::c;
  const double x = std::exp(arg), one_minus_x = -std::expm1(arg);
  return {p,
          {vacuum_reflection(Polarization::TE, p, k2, eps_mirror), x, one_minus_x},
          {vacuum_reflection(Polarization::TM, p, k2, eps_mirror), x, one_minus_x},
          2.0 * zeta * g.film_thickness_cm / PhysicalConstants::c};
}

inline double log_q_film(const SharedNode& node, Polarization pol, double eps_film) {
  const double ki = k_factor(eps_film, node.p);
  const double one_minus_y = -std::expm1(-node.film_arg * ki);
  const auto a = vacuum_reflection(pol, node.p, ki, eps_film);
  return log_q(a, pol == Polarization::TE ? node.te : node.tm, one_minus_y);
}

}  // namespace detail

/// Q_I^{TE/TM}(zeta, p) for the film with imaginary-axis permittivity eps_film.
inline double q_factor(double zeta, double p, Polarization pol, double eps_film, double eps_mirror,
                       const CavityGeometry& geom) {
  detail::require(zeta > 0.0 && p >= 1.0, "q_factor: need zeta > 0 and p >= 1");
  const auto node = detail::shared_node(zeta, p, eps_mirror, geom);
  return std::exp(detail::log_q_film(node, pol, eps_film));
}

inline double q_factor(double zeta, double p, Polarization pol, FilmState state, const CavityGeometry& geom,
                       const LayerPermittivities& layers) {
  const double eps_film = state == FilmState::normal ? layers.film_normal(zeta) : layers.film_superconducting(zeta);
  return q_factor(zeta, p, pol, eps_film, layers.mirror(zeta), geom);
}

struct IntegrandValue {
  double te = 0.0;
  double tm = 0.0;
  double magnitude = 0.0;  // zeta^2 (|log Q_n^TE| + |log Q_n^TM|), the rounding scale of te and tm
  double total() const { return te + tm; }
};

/// zeta^2 [log Q_n - log Q_s] per polarization. Both states share the mirror
/// coefficient and gap exponential, so equal film permittivities give an
/// exact zero.
inline IntegrandValue integrand(double zeta, double p, const CavityGeometry& geom, double eps_mirror,
                                double eps_normal, double eps_super) {
  detail::require(zeta > 0.0 && p >= 1.0, "integrand: need zeta > 0 and p >= 1");
  const auto node = detail::shared_node(zeta, p, eps_mirror, geom);
  const double z2 = zeta * zeta;
  const double te_n = detail::log_q_film(node, Polarization::TE, eps_normal);
  const double tm_n = detail::log_q_film(node, Polarization::TM, eps_normal);
  IntegrandValue v;
  v.te = z2 * (te_n - detail::log_q_film(node, Polarization::TE, eps_super));
  v.tm = z2 * (tm_n - detail::log_q_film(node, Polarization::TM, eps_super));
  v.magnitude = z2 * (std::abs(te_n) + std::abs(tm_n));
  return v;
}

inline IntegrandValue integrand(double zeta, double p, const CavityGeometry& geom,
                                const LayerPermittivities& layers) {
  return integrand(zeta, p, geom, layers.mirror(zeta), layers.film_normal(zeta),
                   layers.film_superconducting(zeta));
}

}  // namespace casimir_sc
