#pragma once

// Thermodynamics of the film: parabolic H_c(T), condensation energy, the
// thin-film enhancement factor rho and the parallel critical field
//
//   (H_c||)^2 V / (8 pi rho^2) = E_n - E_s.

#include <cmath>
#include <numbers>
#include <optional>

#include "casimir_sc/errors.hpp"
#include "casimir_sc/units.hpp"

namespace casimir_sc {

struct FilmThermodynamics {
  double thermodynamic_field_at_zero_Oe = 0.0;  // H_c(0)
  double critical_temperature_K = 0.0;
  double area_cm2 = 0.0;
  double thickness_cm = 0.0;
  std::optional<double> penetration_depth_cm;  // lambda; only rho needs it
  std::optional<double> coherence_length_cm;   // xi

  double volume() const { return area_cm2 * thickness_cm; }
  bool has_rho() const { return penetration_depth_cm.has_value() && coherence_length_cm.has_value(); }

  void validate() const {
    detail::require(thermodynamic_field_at_zero_Oe > 0.0, "FilmThermodynamics: H_c(0) must be positive");
    detail::require(critical_temperature_K > 0.0, "FilmThermodynamics: T_c must be positive");
    detail::require(area_cm2 > 0.0 && thickness_cm > 0.0, "FilmThermodynamics: area and thickness must be positive");
    if (penetration_depth_cm)
      detail::require(*penetration_depth_cm > 0.0, "FilmThermodynamics: penetration depth must be positive");
    if (coherence_length_cm)
      detail::require(*coherence_length_cm > 0.0, "FilmThermodynamics: coherence length must be positive");
  }
};

/// H_c(0) (1 - t^2).
inline double thermodynamic_field(double t, double hc0_Oe) {
  detail::require(t >= 0.0 && t <= 1.0, "thermodynamic_field: t must lie in [0, 1]");
  detail::require(hc0_Oe > 0.0, "thermodynamic_field: H_c(0) must be positive");
  return hc0_Oe * (1.0 - t * t);
}

/// H_c(t)^2 V / (8 pi), in erg.
inline double condensation_energy(double t, const FilmThermodynamics& film) {
  film.validate();
  const double h = thermodynamic_field(t, film.thermodynamic_field_at_zero_Oe);
  return h * h * film.volume() / (8.0 * std::numbers::pi);
}

/// sqrt(24) (lambda/D) (1 + 9 D^2 / (pi^6 xi^2)).
inline double rho_factor(double lambda_cm, double xi_cm, double d_cm) {
  detail::require(lambda_cm > 0.0 && xi_cm > 0.0 && d_cm > 0.0, "rho_factor: lambda, xi and D must be positive");
  const double pi6 = std::pow(std::numbers::pi, 6);
  return std::sqrt(24.0) * (lambda_cm / d_cm) * (1.0 + 9.0 * d_cm * d_cm / (pi6 * xi_cm * xi_cm));
}

inline double rho_factor(const FilmThermodynamics& film, double d_cm) {
  if (!film.has_rho()) throw ConfigError("rho_factor: penetration depth and coherence length are required");
  return rho_factor(*film.penetration_depth_cm, *film.coherence_length_cm, d_cm);
}

inline double rho_factor(const FilmThermodynamics& film) { return rho_factor(film, film.thickness_cm); }

/// rho sqrt(8 pi dF / V): the parallel field at which the free-energy gap dF closes.
inline double critical_parallel_field(double rho, double volume_cm3, double delta_free_energy) {
  detail::require(rho > 0.0 && volume_cm3 > 0.0, "critical_parallel_field: rho and V must be positive");
  detail::require(delta_free_energy >= 0.0, "critical_parallel_field: negative free-energy difference");
  return rho * std::sqrt(8.0 * std::numbers::pi * delta_free_energy / volume_cm3);
}

inline double critical_parallel_field(const FilmThermodynamics& film, double delta_free_energy) {
  return critical_parallel_field(rho_factor(film), film.volume(), delta_free_energy);
}

struct FieldShift {
  double exact;        // H_cavity / H_bare = sqrt(1 + dE/E_cond)
  double first_order;  // 1 + dE / (2 E_cond)
  double relative_shift() const { return exact - 1.0; }
};

inline FieldShift field_shift_ratio(double delta_casimir, double e_cond) {
  detail::require(e_cond > 0.0, "field_shift_ratio: condensation energy must be positive");
  const double r = delta_casimir / e_cond;
  detail::require(r > -1.0, "field_shift_ratio: energy change exceeds the condensation energy");
  return {std::sqrt(1.0 + r), 1.0 + 0.5 * r};
}

/// alpha (hbar c / L) / (m c^2).
inline double radiative_parameter(double gap_cm) {
  detail::require(gap_cm > 0.0, "radiative_parameter: L must be positive");
  const double hbar_omega_c = PhysicalConstants::hbar_eVs * PhysicalConstants::c / gap_cm;
  return PhysicalConstants::fine_structure_alpha * hbar_omega_c / PhysicalConstants::electron_rest_energy;
}

}  // namespace casimir_sc
