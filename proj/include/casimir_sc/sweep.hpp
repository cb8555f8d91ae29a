#pragma once

// Sweep orchestration and CSV emission. Rows are computed independently
// (worker threads pull row indices) and written in a fixed order, so output
// bytes do not depend on the thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iterator>
#include <limits>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "casimir_sc/config.hpp"
#include "casimir_sc/dispersion.hpp"
#include "casimir_sc/lifshitz.hpp"
#include "casimir_sc/materials.hpp"
#include "casimir_sc/scaling.hpp"
#include "casimir_sc/thermo.hpp"

namespace casimir_sc {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
/// is rethrown after all workers finish; fn must handle per-row failures
/// itself when partial results are wanted.
template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

namespace csv {

inline std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

inline void row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

}  // namespace csv

enum class RowStatus { ok, numeric_error, invariant_violation };

inline const char* to_string(RowStatus s) {
  switch (s) {
    case RowStatus::ok: return "ok";
    case RowStatus::numeric_error: return "numeric_error";
    case RowStatus::invariant_violation: return "invariant_violation";
  }
  return "?";
}

struct SweepRow {
  double t = 0.0;
  double tau_n_s = 0.0;
  double gap_cm = 0.0;
  DeltaEnergyResult energy;
  double e_cond = 0.0;
  double shift_ratio = std::numeric_limits<double>::quiet_NaN();
  double h_bare = std::numeric_limits<double>::quiet_NaN();  // Oe; needs lambda, xi
  double h_cavity = std::numeric_limits<double>::quiet_NaN();
  RowStatus status = RowStatus::ok;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  std::size_t failures(RowStatus s) const {
    return std::size_t(std::count_if(rows.begin(), rows.end(), [s](const auto& r) { return r.status == s; }));
  }
  /// 0 ok, 1 some rows failed numerically, 3 all failed, 4 invariant violated.
  int exit_code() const {
    if (failures(RowStatus::invariant_violation)) return 4;
    const std::size_t bad = failures(RowStatus::numeric_error);
    if (bad == 0) return 0;
    return bad == rows.size() ? 3 : 1;
  }
};

/// Fills the thermodynamic columns and checks the row invariants.
inline void finish_row(SweepRow& row, const RunConfig& cfg) {
  const auto film = cfg.thermodynamics();
  row.e_cond = condensation_energy(row.t, film);
  const auto& e = row.energy;
  if (std::abs(e.total - (e.te_part + e.tm_part)) > e.estimated_error + 1e-12 * std::abs(e.total)) {
    row.status = RowStatus::invariant_violation;
    row.message = "total differs from TE + TM beyond the error estimate";
    return;
  }
  if (e.total != 0.0 && e.estimated_error > 10.0 * cfg.quadrature.rel_tol * std::abs(e.total)) {
    row.status = RowStatus::invariant_violation;
    row.message = "error estimate exceeds 10 rel_tol";
    return;
  }
  if (row.e_cond > 0.0) {
    row.shift_ratio = field_shift_ratio(e.total, row.e_cond).exact;
    if (film.has_rho()) {
      row.h_bare = critical_parallel_field(film, row.e_cond);
      row.h_cavity = critical_parallel_field(film, row.e_cond + e.total);
    }
  }
  if (e.total < 0.0) {
    row.status = RowStatus::invariant_violation;
    row.message = "negative energy change (shift ratio below 1)";
  }
}

inline SweepRow compute_row(const RunConfig& cfg, double t, double tau_n, const CavityGeometry& geom) {
  SweepRow row;
  row.t = t;
  row.tau_n_s = tau_n;
  row.gap_cm = geom.gap_width_cm;
  try {
    row.energy = delta_casimir_energy(t, geom, cfg.film(tau_n), cfg.mirror, cfg.quadrature, cfg.response_options());
    finish_row(row, cfg);
  } catch (const ConvergenceError& e) {
    row.energy = e.partial();
    row.status = RowStatus::numeric_error;
    row.message = e.what();
  } catch (const NumericError& e) {
    row.status = RowStatus::numeric_error;
    row.message = e.what();
  } catch (const ConsistencyError& e) {
    row.status = RowStatus::invariant_violation;
    row.message = e.what();
  }
  return row;
}

/// The (tau_n, t) grid: rows ordered by (tau_n, t) ascending.
inline SweepResult run_table1(const RunConfig& cfg) {
  auto taus = cfg.tau_n_s;
  auto ts = cfg.t_grid;
  std::sort(taus.begin(), taus.end());
  std::sort(ts.begin(), ts.end());
  SweepResult res;
  res.rows.resize(taus.size() * ts.size());
  parallel_for(res.rows.size(), cfg.threads, [&](std::size_t i) {
    res.rows[i] = compute_row(cfg, ts[i % ts.size()], taus[i / ts.size()], cfg.geometry);
  });
  return res;
}

inline void write_table1_csv(std::ostream& out, const SweepResult& res) {
  csv::row(out, {"t", "tau_n_s", "L_cm", "dE_erg", "dE_TE_erg", "dE_TM_erg", "err_erg", "E_cond_erg", "shift_ratio",
                 "status"});
  for (const auto& r : res.rows)
    csv::row(out, {csv::number(r.t), csv::number(r.tau_n_s), csv::number(r.gap_cm), csv::number(r.energy.total),
                   csv::number(r.energy.te_part), csv::number(r.energy.tm_part),
                   csv::number(r.energy.estimated_error), csv::number(r.e_cond), csv::number(r.shift_ratio),
                   to_string(r.status)});
}

struct Fig1Curves {
  std::vector<double> t;
  std::vector<double> x0;
  std::vector<std::vector<double>> curves;  // curves[i][k]: omega eps''_s / (Omega_n^2 tau_n) at t[i], x0[k]
};

/// omega eps''_s(omega) / (Omega_n^2 tau_n) on a log grid of x0 = hbar omega / (2 Delta(0)).
inline Fig1Curves run_fig1(const RunConfig& cfg) {
  const auto sc = cfg.film(cfg.tau_n_s.front());
  Fig1Curves out;
  out.t = cfg.fig1_t;
  const std::size_t n = cfg.fig1_points;
  for (std::size_t k = 0; k < n; ++k)
    out.x0.push_back(cfg.fig1_x_min * std::pow(cfg.fig1_x_max / cfg.fig1_x_min, double(k) / double(n - 1)));
  out.curves.assign(out.t.size(), std::vector<double>(n));
  const double norm = sc.normal_state.plasma_frequency() * sc.normal_state.plasma_frequency() *
                      sc.normal_state.scattering_time_s;
  parallel_for(out.t.size(), cfg.threads, [&](std::size_t i) {
    const MattisBardeen mb(out.t[i], sc, cfg.g_variant);
    for (std::size_t k = 0; k < n; ++k) {
      const double w = units::angular_frequency_from_reduced(out.x0[k], sc.gap_at_zero_eV);
      out.curves[i][k] = w * mb.loss(w) / norm;
    }
  });
  return out;
}

inline void write_fig1_csv(std::ostream& out, const Fig1Curves& f) {
  std::vector<std::string> header{"x0"};
  for (double t : f.t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "t%.3f_omega_eps_s_over_Omega2_tau", t);
    header.push_back(buf);
  }
  csv::row(out, header);
  for (std::size_t k = 0; k < f.x0.size(); ++k) {
    std::vector<std::string> cells{csv::number(f.x0[k])};
    for (const auto& c : f.curves) cells.push_back(csv::number(c[k]));
    csv::row(out, cells);
  }
}

struct Fig2Row {
  double t, delta_energy, e_cond, shift_ratio, h_bare, h_cavity;
};

struct Fig2Result {
  SweepResult samples;  // the coarse direct evaluations
  ScalingFit fit;       // dE against (1 - t)
  std::vector<Fig2Row> rows;
};

/// Critical parallel field with and without the cavity, dE(t) taken from a
/// power law in (1 - t) fitted to direct evaluations.
inline Fig2Result run_fig2(const RunConfig& cfg) {
  if (!cfg.lambda_cm || !cfg.xi_cm)
    throw ConfigError(
        "fig2 needs thermo.lambda_nm and thermo.xi_nm for absolute fields; without them only the shift ratio "
        "(table1 shift_ratio column) is available");
  Fig2Result out;
  auto ts = cfg.fig2_fit_t;
  std::sort(ts.begin(), ts.end(), std::greater<>());  // ascending in 1 - t
  const double tau = cfg.tau_n_s.front();
  out.samples.rows.resize(ts.size());
  parallel_for(ts.size(), cfg.threads,
               [&](std::size_t i) { out.samples.rows[i] = compute_row(cfg, ts[i], tau, cfg.geometry); });
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : out.samples.rows) {
    if (r.status != RowStatus::ok) throw NumericError("fig2: sample at t = " + csv::number(r.t) + " failed: " + r.message);
    pts.emplace_back(1.0 - r.t, r.energy.total);
  }
  out.fit = fit_power_law(pts);
  const auto film = cfg.thermodynamics();
  for (std::size_t k = 0; k < cfg.fig2_points; ++k) {
    const double t = cfg.fig2_t_min + (cfg.fig2_t_max - cfg.fig2_t_min) * double(k) / double(cfg.fig2_points - 1);
    const double de = out.fit(1.0 - t);
    const double ec = condensation_energy(t, film);
    out.rows.push_back({t, de, ec, field_shift_ratio(de, ec).exact, critical_parallel_field(film, ec),
                        critical_parallel_field(film, ec + de)});
  }
  return out;
}

inline void write_fig2_csv(std::ostream& out, const Fig2Result& f) {
  csv::row(out, {"t", "dE_fit_erg", "E_cond_erg", "shift_ratio", "H_bare_Oe", "H_cavity_Oe"});
  for (const auto& r : f.rows)
    csv::row(out, {csv::number(r.t), csv::number(r.delta_energy), csv::number(r.e_cond), csv::number(r.shift_ratio),
                   csv::number(r.h_bare), csv::number(r.h_cavity)});
}

struct ScalingAxis {
  std::string name;  // "L_cm", "one_minus_t", "Tc_K"
  std::vector<SweepRow> rows;
  ScalingFit fit;
  bool fitted = false;
  std::string message;
};

struct ScalingReport {
  std::vector<ScalingAxis> axes;
};


/// Power-law exponents of dE along L, (1 - t) and T_c, each about the
/// reference point (first t, first tau_n, configured L). The T_c axis locks
/// Delta(0) to bcs_ratio k T_c.
inline ScalingReport run_scaling(const RunConfig& cfg) {
  const double t0 = cfg.t_grid.front();
  const double tau = cfg.tau_n_s.front();
  ScalingReport rep;

  auto fitted = [](ScalingAxis& axis, std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    for (const auto& r : axis.rows)
      if (r.status != RowStatus::ok) {
        axis.message = "sample failed: " + r.message;
        return;
      }
    try {
      axis.fit = fit_power_law(pts, 3);
      axis.fitted = true;
    } catch (const DomainError& e) {
      axis.message = e.what();
    }
  };

  {  // L axis shares one film response.
    ScalingAxis axis{"L_cm", {}, {}, false, {}};
    const SuperconductorResponse film(t0, cfg.film(tau), [&] {
      auto ro = cfg.response_options();
      ro.zeta_max = std::max(1e4, cfg.quadrature.cutoff_lambda) * units::thermal_frequency(cfg.tc_K);
      return ro;
    }());
    axis.rows.resize(cfg.gap_grid_cm.size());
    parallel_for(cfg.gap_grid_cm.size(), cfg.threads, [&](std::size_t i) {
      CavityGeometry g = cfg.geometry;
      g.gap_width_cm = cfg.gap_grid_cm[i];
      SweepRow& row = axis.rows[i];
      row.t = t0;
      row.tau_n_s = tau;
      row.gap_cm = g.gap_width_cm;
      try {
        row.energy = delta_casimir_energy(film, g, cfg.mirror, cfg.quadrature);
        finish_row(row, cfg);
      } catch (const NumericError& e) {
        row.status = RowStatus::numeric_error;
        row.message = e.what();
      }
    });
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : axis.rows) pts.emplace_back(r.gap_cm, r.energy.total);
    fitted(axis, pts);
    rep.axes.push_back(std::move(axis));
  }
  {
    ScalingAxis axis{"one_minus_t", {}, {}, false, {}};
    axis.rows.resize(cfg.t_grid.size());
    parallel_for(cfg.t_grid.size(), cfg.threads,
                 [&](std::size_t i) { axis.rows[i] = compute_row(cfg, cfg.t_grid[i], tau, cfg.geometry); });
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : axis.rows) pts.emplace_back(1.0 - r.t, r.energy.total);
    fitted(axis, pts);
    rep.axes.push_back(std::move(axis));
  }
  {
    ScalingAxis axis{"Tc_K", {}, {}, false, {}};
    axis.rows.resize(cfg.tc_grid_K.size());
    parallel_for(cfg.tc_grid_K.size(), cfg.threads, [&](std::size_t i) {
      RunConfig c = cfg;
      c.tc_K = cfg.tc_grid_K[i];
      c.gap0_eV.reset();
      axis.rows[i] = compute_row(c, t0, tau, cfg.geometry);
    });
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < axis.rows.size(); ++i) pts.emplace_back(cfg.tc_grid_K[i], axis.rows[i].energy.total);
    fitted(axis, pts);
    rep.axes.push_back(std::move(axis));
  }
  return rep;
}

inline void write_scaling_csv(std::ostream& out, const ScalingReport& rep, const RunConfig& cfg) {
  csv::row(out, {"axis", "x", "t", "tau_n_s", "L_cm", "Tc_K", "dE_erg", "err_erg", "status"});
  for (const auto& axis : rep.axes)
    for (std::size_t i = 0; i < axis.rows.size(); ++i) {
      const auto& r = axis.rows[i];
      const double tc = axis.name == "Tc_K" ? cfg.tc_grid_K[i] : cfg.tc_K;
      const double x = axis.name == "L_cm" ? r.gap_cm : axis.name == "one_minus_t" ? 1.0 - r.t : tc;
      csv::row(out, {axis.name, csv::number(x), csv::number(r.t), csv::number(r.tau_n_s), csv::number(r.gap_cm),
                     csv::number(tc), csv::number(r.energy.total), csv::number(r.energy.estimated_error),
                     to_string(r.status)});
    }
}

inline void write_scaling_report(std::ostream& out, const ScalingReport& rep) {
  for (const auto& axis : rep.axes) {
    out << axis.name << ": ";
    if (!axis.fitted) {
      out << "no fit (" << axis.message << ")\n";
      continue;
    }
    out << "exponent " << csv::number(axis.fit.exponent) << ", prefactor " << csv::number(axis.fit.prefactor)
        << ", rms log residual " << csv::number(axis.fit.residual) << ", samples " << axis.fit.samples.size()
        << '\n';
  }
}

}  // namespace casimir_sc
