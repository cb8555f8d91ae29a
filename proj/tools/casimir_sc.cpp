// casimir-sc: Casimir energy change of a superconducting film in a cavity.
//
//   casimir-sc <table1|fig1|fig2|scaling|single> --config FILE [overrides]
//
// Exit status: 0 success, 1 some sweep rows failed, 2 configuration error,
// 3 every row failed numerically, 4 invariant violation.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "casimir_sc/config.hpp"
#include "casimir_sc/scaling.hpp"
#include "casimir_sc/sweep.hpp"

namespace fs = std::filesystem;
using namespace casimir_sc;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<double> rel_tol, lambda;
  std::optional<std::size_t> threads;
  std::optional<std::string> g_variant;
  std::optional<double> t, tau;  // single only
};

RunConfig load(const Overrides& o) {
  std::ifstream in(o.config, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + o.config + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config(ss.str());
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.rel_tol) cfg.quadrature.rel_tol = *o.rel_tol;
  if (o.lambda) cfg.quadrature.cutoff_lambda = *o.lambda;
  if (o.threads) cfg.threads = *o.threads;
  if (o.g_variant) cfg.g_variant = parse_g_variant(*o.g_variant);
  cfg.validate();
  return cfg;
}

// Binary mode keeps LF line endings on every platform.
std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  std::cerr << "writing " << path.string() << '\n';
  return out;
}

void report_failures(const SweepResult& res) {
  for (const auto& r : res.rows)
    if (r.status != RowStatus::ok)
      std::cerr << "row t=" << r.t << " tau_n=" << r.tau_n_s << " L=" << r.gap_cm << ": " << to_string(r.status)
                << ": " << r.message << '\n';
}

void warn_impurity(const RunConfig& cfg) {
  for (double tau : cfg.tau_n_s) {
    const auto y0 = impurity_parameter(cfg.film(tau));
    if (!y0.in_range)
      std::cerr << "warning: impurity parameter y0 = " << y0.value << " at tau_n = " << tau
                << " s lies outside (1, 30)\n";
  }
}

int run_table1_cmd(const RunConfig& cfg) {
  warn_impurity(cfg);
  const auto res = run_table1(cfg);
  auto out = open_output(cfg, "table1.csv");
  write_table1_csv(out, res);
  report_failures(res);
  return res.exit_code();
}

int run_fig1_cmd(const RunConfig& cfg) {
  const auto f = run_fig1(cfg);
  auto out = open_output(cfg, "fig1.csv");
  write_fig1_csv(out, f);
  return 0;
}

int run_fig2_cmd(const RunConfig& cfg) {
  const auto f = run_fig2(cfg);
  auto out = open_output(cfg, "fig2.csv");
  write_fig2_csv(out, f);
  std::cout << "dE(1 - t) fit: exponent " << csv::number(f.fit.exponent) << ", prefactor "
            << csv::number(f.fit.prefactor) << " erg, rms log residual " << csv::number(f.fit.residual) << '\n';
  for (std::size_t i = 1; i < f.rows.size(); ++i)
    if (!(f.rows[i].shift_ratio >= 1.0)) return 4;
  return 0;
}

int run_scaling_cmd(const RunConfig& cfg) {
  const auto rep = run_scaling(cfg);
  {
    auto out = open_output(cfg, "scaling.csv");
    write_scaling_csv(out, rep, cfg);
  }
  {
    auto out = open_output(cfg, "scaling.txt");
    write_scaling_report(out, rep);
  }
  write_scaling_report(std::cout, rep);
  SweepResult all;
  for (const auto& a : rep.axes) all.rows.insert(all.rows.end(), a.rows.begin(), a.rows.end());
  report_failures(all);
  return all.exit_code();
}

int run_single_cmd(const RunConfig& cfg, const Overrides& o) {
  const double t = o.t.value_or(cfg.t_grid.front());
  const double tau = o.tau.value_or(cfg.tau_n_s.front());
  if (!(t > 0.0 && t <= 1.0)) throw ConfigError("--t must lie in (0, 1]");
  if (!(tau > 0.0)) throw ConfigError("--tau must be positive");
  const auto row = compute_row(cfg, t, tau, cfg.geometry);
  const auto& e = row.energy;
  std::printf("t                 %.6e\n", t);
  std::printf("tau_n_s           %.6e\n", tau);
  std::printf("L_cm              %.6e\n", cfg.geometry.gap_width_cm);
  std::printf("D_cm              %.6e\n", cfg.geometry.film_thickness_cm);
  std::printf("A_cm2             %.6e\n", cfg.geometry.plate_area_cm2);
  std::printf("cutoff_lambda     %.6e\n", e.cutoff_used);
  std::printf("dE_erg            %.6e\n", e.total);
  std::printf("dE_TE_erg         %.6e\n", e.te_part);
  std::printf("dE_TM_erg         %.6e\n", e.tm_part);
  std::printf("err_erg           %.6e\n", e.estimated_error);
  std::printf("outer_nodes       %zu\n", e.outer_nodes);
  std::printf("inner_nodes       %zu\n", e.inner_nodes);
  std::printf("E_cond_erg        %.6e\n", row.e_cond);
  std::printf("shift_ratio       %.6e\n", row.shift_ratio);
  std::printf("status            %s\n", to_string(row.status));
  if (row.status != RowStatus::ok) std::fprintf(stderr, "%s\n", row.message.c_str());
  return row.status == RowStatus::ok ? 0 : row.status == RowStatus::numeric_error ? 3 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casimir energy change of a superconducting film between metal mirrors"};
  app.require_subcommand(1);
  Overrides o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out-dir", o.out_dir, "output directory");
    sub->add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance");
    sub->add_option("--lambda", o.lambda, "zeta cutoff in units of k T_c / hbar");
    sub->add_option("--threads", o.threads, "worker threads");
    sub->add_option("--g-variant", o.g_variant, "Mattis-Bardeen kernel: corrected or verbatim");
  };
  auto* table1 = app.add_subcommand("table1", "energy change on the (tau_n, t) grid");
  auto* fig1 = app.add_subcommand("fig1", "normalized Mattis-Bardeen loss curves");
  auto* fig2 = app.add_subcommand("fig2", "parallel critical field with and without the cavity");
  auto* scaling = app.add_subcommand("scaling", "power-law fits along L, 1 - t and T_c");
  auto* single = app.add_subcommand("single", "one energy-change evaluation");
  for (auto* s : {table1, fig1, fig2, scaling, single}) common(s);
  single->add_option("--t", o.t, "reduced temperature T/T_c");
  single->add_option("--tau", o.tau, "film scattering time in s");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const RunConfig cfg = load(o);
    if (*table1) return run_table1_cmd(cfg);
    if (*fig1) return run_fig1_cmd(cfg);
    if (*fig2) return run_fig2_cmd(cfg);
    if (*scaling) return run_scaling_cmd(cfg);
    return run_single_cmd(cfg, o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const ConsistencyError& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }
}
