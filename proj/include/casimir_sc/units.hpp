#pragma once

// Physical constants and the handful of unit conversions used across the
// library. Internal units are Gaussian CGS; spectral energies (plasma energy,
// gap) are carried in eV and converted here.

#include <cmath>

#include "casimir_sc/errors.hpp"

namespace casimir_sc {

/// CODATA 2018 recommended values (exact where SI defines them).
struct PhysicalConstants {
  static constexpr double planck_h = 6.62607015e-27;      // erg s, exact
  static constexpr double hbar = planck_h / (2.0 * 3.14159265358979323846);  // 1.054571817...e-27
  static constexpr double c = 2.99792458e10;              // cm/s
  static constexpr double k_boltzmann = 1.380649e-16;     // erg/K
  static constexpr double eV_in_erg = 1.602176634e-12;    // erg
  static constexpr double fine_structure_alpha = 7.2973525693e-3;
  static constexpr double electron_rest_energy = 0.51099895000e6;  // eV

  static constexpr double hbar_eVs = hbar / eV_in_erg;          // eV s
  static constexpr double k_eV = k_boltzmann / eV_in_erg;       // eV/K
};

namespace units {

inline constexpr double nm = 1e-7;  // cm

inline double energy_to_angular_frequency(double energy_eV) {
  detail::require(energy_eV >= 0.0, "energy_to_angular_frequency: negative energy");
  return energy_eV * PhysicalConstants::eV_in_erg / PhysicalConstants::hbar;
}

inline double angular_frequency_to_energy(double omega) {
  detail::require(omega >= 0.0, "angular_frequency_to_energy: negative frequency");
  return omega * PhysicalConstants::hbar / PhysicalConstants::eV_in_erg;
}

inline double temperature_to_energy(double kelvin) {
  detail::require(kelvin >= 0.0, "temperature_to_energy: negative temperature");
  return kelvin * PhysicalConstants::k_boltzmann / PhysicalConstants::eV_in_erg;
}

/// x0 = hbar*omega / (2 Delta(0)).
inline double reduced_frequency(double omega, double gap0_eV) {
  detail::require(gap0_eV > 0.0, "reduced_frequency: gap must be positive");
  detail::require(omega >= 0.0, "reduced_frequency: negative frequency");
  return PhysicalConstants::hbar_eVs * omega / (2.0 * gap0_eV);
}

inline double angular_frequency_from_reduced(double x0, double gap0_eV) {
  detail::require(gap0_eV > 0.0, "angular_frequency_from_reduced: gap must be positive");
  return 2.0 * gap0_eV * x0 / PhysicalConstants::hbar_eVs;
}

/// k*T/hbar in rad/s, the natural frequency scale of the transition.
inline double thermal_frequency(double kelvin) {
  return temperature_to_energy(kelvin) / PhysicalConstants::hbar_eVs;
}

}  // namespace units
}  // namespace casimir_sc
