#pragma once

// Run configuration: sectioned key = value text. Lists are comma separated.
// Syntax comes from Boost.PropertyTree's INI reader; every value is then
// type-checked and validated here, with errors naming section.key and line.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "casimir_sc/errors.hpp"
#include "casimir_sc/lifshitz.hpp"
#include "casimir_sc/materials.hpp"
#include "casimir_sc/thermo.hpp"
#include "casimir_sc/units.hpp"

namespace casimir_sc {

struct RunConfig {
  CavityGeometry geometry;
  double tc_K = 0.0;
  std::optional<double> gap0_eV;  // else bcs_ratio * k T_c
  double bcs_ratio = 1.764;
  double film_plasma_energy_eV = 0.0;
  std::vector<double> tau_n_s;
  DrudeParameters mirror{18.9, 2.4e-12};
  double hc0_Oe = 22.5;
  std::optional<double> lambda_cm, xi_cm;

  std::vector<double> t_grid{0.9, 0.95, 0.99};
  std::vector<double> gap_grid_cm{5 * units::nm, 7.5 * units::nm, 10 * units::nm, 15 * units::nm, 20 * units::nm};
  std::vector<double> tc_grid_K{0.25, 0.5, 1.0, 2.0};
  std::vector<double> fig1_t{0.3, 0.9, 1.0};
  double fig1_x_min = 0.01, fig1_x_max = 5.0;
  std::size_t fig1_points = 400;
  std::vector<double> fig2_fit_t{0.93, 0.95, 0.97, 0.99, 0.995};
  double fig2_t_min = 0.93, fig2_t_max = 0.995;
  std::size_t fig2_points = 66;

  QuadratureSpec quadrature;
  GKernelVariant g_variant = GKernelVariant::corrected;
  std::string out_dir = ".";
  std::size_t threads = 1;

  SuperconductorParameters film(double tau_n) const {
    const DrudeParameters normal{film_plasma_energy_eV, tau_n};
    if (gap0_eV) return {tc_K, *gap0_eV, normal};
    return SuperconductorParameters::from_bcs_ratio(tc_K, normal, bcs_ratio);
  }

  FilmThermodynamics thermodynamics() const {
    return {hc0_Oe, tc_K, geometry.plate_area_cm2, geometry.film_thickness_cm, lambda_cm, xi_cm};
  }

  ResponseOptions response_options() const {
    ResponseOptions r;
    r.variant = g_variant;
    return r;
  }

  /// Throws ConfigError naming the violated field.
  void validate() const;
};

inline GKernelVariant parse_g_variant(const std::string& s) {
  if (s == "corrected") return GKernelVariant::corrected;
  if (s == "verbatim") return GKernelVariant::verbatim;
  throw ConfigError("g_variant must be 'corrected' or 'verbatim', got '" + s + "'");
}

inline const char* to_string(GKernelVariant v) { return v == GKernelVariant::corrected ? "corrected" : "verbatim"; }

inline void RunConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  try {
    geometry.validate();
    mirror.validate();
    quadrature.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  check(tc_K > 0.0, "film.Tc_K must be positive");
  check(!gap0_eV || *gap0_eV > 0.0, "film.gap0_eV must be positive");
  check(bcs_ratio >= 1.5 && bcs_ratio <= 2.0, "film.bcs_ratio must lie in [1.5, 2.0]");
  check(film_plasma_energy_eV > 0.0, "film.plasma_energy_eV must be positive");
  check(!tau_n_s.empty(), "film.tau_n_s must list at least one scattering time");
  for (double v : tau_n_s) check(v > 0.0, "film.tau_n_s entries must be positive");
  check(hc0_Oe > 0.0, "thermo.Hc0_Oe must be positive");
  check(!lambda_cm || *lambda_cm > 0.0, "thermo.lambda_nm must be positive");
  check(!xi_cm || *xi_cm > 0.0, "thermo.xi_nm must be positive");
  for (double t : t_grid) check(t > 0.0 && t <= 1.0, "sweep.t entries must lie in (0, 1]");
  for (double t : fig1_t) check(t > 0.0 && t <= 1.0, "sweep.fig1_t entries must lie in (0, 1]");
  for (double t : fig2_fit_t) check(t > 0.0 && t < 1.0, "sweep.fig2_fit_t entries must lie in (0, 1)");
  for (double l : gap_grid_cm) check(l > 0.0, "sweep.L_nm entries must be positive");
  for (double tc : tc_grid_K) check(tc > 0.0, "sweep.Tc_K entries must be positive");
  check(fig1_x_min > 0.0 && fig1_x_max > fig1_x_min, "sweep.fig1_x range must be positive and increasing");
  check(fig1_points >= 2, "sweep.fig1_points must be at least 2");
  check(fig2_t_min > 0.0 && fig2_t_max < 1.0 && fig2_t_max > fig2_t_min,
        "sweep.fig2_t range must satisfy 0 < min < max < 1");
  check(fig2_points >= 2, "sweep.fig2_points must be at least 2");
  check(threads >= 1, "threads must be at least 1");
}

namespace detail {

// Line of `key` in `section`, for diagnostics only.
inline std::size_t find_line(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream in(text);
  std::string line, current;
  std::size_t n = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++n;
    const std::string s = trim(line);
    if (s.empty() || s[0] == ';' || s[0] == '#') continue;
    if (s[0] == '[') {
      current = trim(s.substr(1, s.find(']') - 1));
      continue;
    }
    if (current == section && trim(s.substr(0, s.find('='))) == key) return n;
  }
  return 0;
}

class ConfigReader {
 public:
  explicit ConfigReader(const std::string& text) : text_(text) {
    std::istringstream in(text);
    try {
      boost::property_tree::read_ini(in, tree_);
    } catch (const boost::property_tree::ini_parser_error& e) {
      std::ostringstream msg;
      msg << "line " << e.line() << ": " << e.message();
      throw ConfigError(msg.str());
    }
    for (const auto& [name, sec] : tree_) {
      if (sec.empty() && !sec.data().empty()) {
        const std::size_t n = find_line(text_, "", name);
        throw ConfigError("line " + std::to_string(n) + ": key '" + name + "' outside any section");
      }
    }
  }

  bool has_section(const std::string& s) const { return tree_.find(s) != tree_.not_found(); }

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    seen_.insert(section + "." + key);
    const auto sec = tree_.find(section);
    if (sec == tree_.not_found()) return std::nullopt;
    const auto it = sec->second.find(key);
    if (it == sec->second.not_found()) return std::nullopt;
    return it->second.data();
  }

  std::optional<double> number(const std::string& section, const std::string& key) {
    const auto s = raw(section, key);
    if (!s) return std::nullopt;
    return to_number(*s, section, key);
  }

  double number(const std::string& section, const std::string& key, double fallback) {
    return number(section, key).value_or(fallback);
  }

  double required_number(const std::string& section, const std::string& key) {
    const auto v = number(section, key);
    if (!v) throw ConfigError("missing required key " + section + "." + key);
    return *v;
  }

  std::optional<std::vector<double>> list(const std::string& section, const std::string& key) {
    const auto s = raw(section, key);
    if (!s) return std::nullopt;
    std::vector<double> out;
    std::stringstream ss(*s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_number(item, section, key));
    if (out.empty()) fail(section, key, "empty list");
    return out;
  }

  std::size_t count(const std::string& section, const std::string& key, std::size_t fallback) {
    const auto v = number(section, key);
    if (!v) return fallback;
    if (*v < 0.0 || *v != std::floor(*v)) fail(section, key, "expected a non-negative integer");
    return std::size_t(*v);
  }

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& what) const {
    std::ostringstream msg;
    msg << "line " << find_line(text_, section, key) << ": " << section << "." << key << ": " << what;
    throw ConfigError(msg.str());
  }

  /// Rejects any key that no accessor asked for.
  void reject_unknown() const {
    for (const auto& [sname, sec] : tree_)
      for (const auto& [kname, value] : sec)
        if (!seen_.count(sname + "." + kname)) fail(sname, kname, "unknown key");
  }

 private:
  double to_number(std::string s, const std::string& section, const std::string& key) const {
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      fail(section, key, "malformed number '" + s + "'");
    return v;
  }

  std::string text_;
  boost::property_tree::ptree tree_;
  std::set<std::string> seen_;
};

}  // namespace detail

/// Parses and validates a configuration document. Geometry and film blocks
/// are required; everything else defaults.
inline RunConfig parse_config(const std::string& text) {
  detail::ConfigReader in(text);
  RunConfig c;
  auto positive = [&](const std::string& s, const std::string& k, double v) {
    if (!(v > 0.0)) in.fail(s, k, "must be positive");
    return v;
  };
  auto positive_list = [&](const std::string& s, const std::string& k, std::vector<double> v) {
    for (double x : v)
      if (!(x > 0.0)) in.fail(s, k, "entries must be positive");
    return v;
  };
  auto scaled = [](std::vector<double> v, double f) {
    for (double& x : v) x *= f;
    return v;
  };

  if (!in.has_section("geometry")) throw ConfigError("missing required section [geometry]");
  if (!in.has_section("film")) throw ConfigError("missing required section [film]");
  c.geometry.gap_width_cm = positive("geometry", "L_nm", in.required_number("geometry", "L_nm")) * units::nm;
  c.geometry.film_thickness_cm = positive("geometry", "D_nm", in.required_number("geometry", "D_nm")) * units::nm;
  c.geometry.plate_area_cm2 = positive("geometry", "A_cm2", in.required_number("geometry", "A_cm2"));

  c.tc_K = positive("film", "Tc_K", in.required_number("film", "Tc_K"));
  if (auto g = in.number("film", "gap0_eV")) c.gap0_eV = positive("film", "gap0_eV", *g);
  if (auto r = in.number("film", "bcs_ratio")) {
    if (c.gap0_eV) in.fail("film", "bcs_ratio", "give either gap0_eV or bcs_ratio, not both");
    if (!(*r >= 1.5 && *r <= 2.0)) in.fail("film", "bcs_ratio", "must lie in [1.5, 2.0]");
    c.bcs_ratio = *r;
  }
  c.film_plasma_energy_eV =
      positive("film", "plasma_energy_eV", in.required_number("film", "plasma_energy_eV"));
  auto taus = in.list("film", "tau_n_s");
  if (!taus) throw ConfigError("missing required key film.tau_n_s");
  c.tau_n_s = positive_list("film", "tau_n_s", *taus);

  c.mirror.plasma_energy_eV =
      positive("mirror", "plasma_energy_eV", in.number("mirror", "plasma_energy_eV", c.mirror.plasma_energy_eV));
  c.mirror.scattering_time_s = positive("mirror", "tau_s", in.number("mirror", "tau_s", c.mirror.scattering_time_s));

  c.hc0_Oe = positive("thermo", "Hc0_Oe", in.number("thermo", "Hc0_Oe", c.hc0_Oe));
  if (auto v = in.number("thermo", "lambda_nm")) c.lambda_cm = positive("thermo", "lambda_nm", *v) * units::nm;
  if (auto v = in.number("thermo", "xi_nm")) c.xi_cm = positive("thermo", "xi_nm", *v) * units::nm;

  auto in_unit = [&](const std::string& k, std::vector<double> v, bool closed) {
    for (double t : v)
      if (!(t > 0.0 && (closed ? t <= 1.0 : t < 1.0))) in.fail("sweep", k, closed ? "entries must lie in (0, 1]" : "entries must lie in (0, 1)");
    return v;
  };
  if (auto v = in.list("sweep", "t")) c.t_grid = in_unit("t", *v, true);
  if (auto v = in.list("sweep", "L_nm")) c.gap_grid_cm = scaled(positive_list("sweep", "L_nm", *v), units::nm);
  if (auto v = in.list("sweep", "Tc_K")) c.tc_grid_K = positive_list("sweep", "Tc_K", *v);
  if (auto v = in.list("sweep", "fig1_t")) c.fig1_t = in_unit("fig1_t", *v, true);
  c.fig1_x_min = positive("sweep", "fig1_x_min", in.number("sweep", "fig1_x_min", c.fig1_x_min));
  c.fig1_x_max = positive("sweep", "fig1_x_max", in.number("sweep", "fig1_x_max", c.fig1_x_max));
  c.fig1_points = in.count("sweep", "fig1_points", c.fig1_points);
  if (auto v = in.list("sweep", "fig2_fit_t")) c.fig2_fit_t = in_unit("fig2_fit_t", *v, false);
  c.fig2_t_min = in.number("sweep", "fig2_t_min", c.fig2_t_min);
  c.fig2_t_max = in.number("sweep", "fig2_t_max", c.fig2_t_max);
  c.fig2_points = in.count("sweep", "fig2_points", c.fig2_points);

  c.quadrature.cutoff_lambda = in.number("quadrature", "lambda", c.quadrature.cutoff_lambda);
  c.quadrature.rel_tol = in.number("quadrature", "rel_tol", c.quadrature.rel_tol);
  c.quadrature.max_nodes = in.count("quadrature", "max_nodes", c.quadrature.max_nodes);
  if (auto s = in.raw("quadrature", "p_transform")) {
    if (*s == "exponential") c.quadrature.p_transform = PTransform::exponential;
    else if (*s == "tangent") c.quadrature.p_transform = PTransform::tangent;
    else in.fail("quadrature", "p_transform", "expected 'exponential' or 'tangent'");
  }
  if (auto s = in.raw("quadrature", "g_variant")) {
    try {
      c.g_variant = parse_g_variant(*s);
    } catch (const ConfigError& e) {
      in.fail("quadrature", "g_variant", e.what());
    }
  }
  if (auto s = in.raw("output", "dir")) c.out_dir = *s;
  c.threads = in.count("run", "threads", c.threads);

  in.reject_unknown();
  c.validate();
  return c;
}

}  // namespace casimir_sc
