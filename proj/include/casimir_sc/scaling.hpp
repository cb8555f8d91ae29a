#pragma once

// Log-log least-squares power laws y = prefactor * x^exponent.

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "casimir_sc/errors.hpp"
#include "casimir_sc/materials.hpp"

namespace casimir_sc {

struct ScalingFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;  // RMS of ln y - ln fit
  std::vector<std::pair<double, double>> samples;

  double operator()(double x) const { return prefactor * std::pow(x, exponent); }
};

/// `min_samples` defaults to 4; three-point fits are allowed only when asked for.
inline ScalingFit fit_power_law(std::span<const std::pair<double, double>> samples, std::size_t min_samples = 4) {
  detail::require(min_samples >= 3, "fit_power_law: min_samples must be at least 3");
  detail::require(samples.size() >= min_samples, "fit_power_law: too few samples");
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [x, y] = samples[i];
    detail::require(x > 0.0 && y > 0.0, "fit_power_law: samples must be positive");
    if (i > 0) detail::require(x > samples[i - 1].first, "fit_power_law: x must be strictly increasing");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double n = double(samples.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : samples) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  ScalingFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.prefactor = std::exp(intercept);
  double ss = 0.0;
  for (const auto& [x, y] : samples) {
    const double r = std::log(y) - (intercept + fit.exponent * std::log(x));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.samples.assign(samples.begin(), samples.end());
  return fit;
}

inline ScalingFit fit_power_law(const std::vector<std::pair<double, double>>& samples, std::size_t min_samples = 4) {
  return fit_power_law(std::span<const std::pair<double, double>>(samples), min_samples);
}

struct ImpurityParameter {
  double value;
  bool in_range;  // inside the dirty-limit window (1, 30)
};

inline ImpurityParameter impurity_parameter(const SuperconductorParameters& sc) {
  sc.validate();
  const double y0 = sc.impurity_parameter();
  return {y0, y0 > 1.0 && y0 < 30.0};
}

}  // namespace casimir_sc
