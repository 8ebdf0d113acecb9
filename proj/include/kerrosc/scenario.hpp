#pragma once

// Scenario runner: dispatches a ScenarioConfig to the computation modules and
// writes tabular artifacts (CSV with a '#' metadata header, or JSON).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>  // vendored nlohmann::json

#include "kerrosc/config.hpp"
#include "kerrosc/driven_eigen.hpp"
#include "kerrosc/kerr_evolution.hpp"
#include "kerrosc/kerr_states.hpp"
#include "kerrosc/observables.hpp"
#include "kerrosc/oracle.hpp"
#include "kerrosc/time_reparam.hpp"

#ifndef KERROSC_VERSION
#define KERROSC_VERSION "dev"
#endif

namespace kerrosc {

enum class Subcommand { simulate, oracle, variances, autocorr, husimi, spectrum, timemap };

inline const std::vector<std::pair<std::string, Subcommand>>& subcommands() {
  static const std::vector<std::pair<std::string, Subcommand>> all = {
      {"simulate", Subcommand::simulate}, {"oracle", Subcommand::oracle},     {"variances", Subcommand::variances},
      {"autocorr", Subcommand::autocorr}, {"husimi", Subcommand::husimi},     {"spectrum", Subcommand::spectrum},
      {"timemap", Subcommand::timemap}};
  return all;
}

inline std::string subcommand_name(Subcommand s) {
  for (const auto& [name, v] : subcommands()) {
    if (v == s) return name;
  }
  return "?";
}

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct Table {
  std::string stem;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  Metadata meta;
};

/// %.15g; fixed formatting keeps bodies byte-identical across runs.
inline std::string format_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline std::string format_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_cell(v[i]);
  return s + "]";
}

namespace detail {

inline Metadata base_metadata(const ScenarioConfig& cfg, Subcommand cmd) {
  return {{"generator", std::string("kerrosc ") + KERROSC_VERSION},
          {"subcommand", subcommand_name(cmd)},
          {"tol", format_cell(cfg.tol)}};
}

inline void write_csv(const std::filesystem::path& path, const Table& t, const Metadata& base,
                      const std::string& config_text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& [k, v] : base) out << "# " << k << ": " << v << "\n";
  for (const auto& [k, v] : t.meta) out << "# " << k << ": " << v << "\n";
  out << "# config:\n";
  std::istringstream lines(config_text);
  for (std::string line; std::getline(lines, line);) out << "#   " << line << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << "\n";
  }
}

inline void write_json(const std::filesystem::path& path, const Table& t, const Metadata& base,
                       const std::string& config_text) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : base) j["metadata"][k] = v;
  for (const auto& [k, v] : t.meta) j["metadata"][k] = v;
  j["metadata"]["config"] = config_text;
  j["columns"] = t.columns;
  j["rows"] = t.rows;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(1) << "\n";
}

/// Rethrow numerical failures with the stage that produced them.
template <class F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const truncation_error& e) {
    throw truncation_error(name + ": " + e.what(), e.time());
  } catch (const numerical_error& e) {
    throw numerical_error(name + ": " + e.what(), e.time());
  } catch (const std::domain_error& e) {
    throw numerical_error(name + ": " + e.what());
  }
}

/// Uniform drive-period grid merged with extra times.
inline std::vector<double> merged_grid(const ModelParams& p, double t_end, int samples_per_period,
                                       const std::vector<double>& extra) {
  std::vector<double> g = uniform_grid(t_end, p.drive.period_or(2.0 * std::numbers::pi / p.omega0), samples_per_period);
  g.insert(g.end(), extra.begin(), extra.end());
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

inline std::vector<double> output_times(double t_end, int samples) { return linspace(0.0, t_end, samples); }

inline double max_eta2(const WeiNormanSolution& sol) {
  double m = 0.0;
  for (std::size_t i = 0; i < sol.size(); ++i) m = std::max(m, std::norm(sol.eta(i)));
  return m;
}

inline std::vector<double> wei_norman_row(const WeiNormanSolution& sol, std::size_t i) {
  return {sol.t[i],           sol.x1[i].real(),     sol.x1[i].imag(),     sol.x2[i].real(), sol.x2[i].imag(),
          sol.x3[i].real(),   sol.x3[i].imag(),     sol.eta(i).real(),    sol.eta(i).imag(), sol.norm_factor(i)};
}

inline std::vector<std::string> wei_norman_columns() {
  return {"t", "re_X1", "im_X1", "re_X2", "im_X2", "re_X3", "im_X3", "re_eta", "im_eta", "norm"};
}

inline std::vector<Table> run_simulate(const ScenarioConfig& cfg) {
  const auto p = cfg.model();
  const auto sol = stage("wei-norman", [&] { return integrate_wei_norman(p, cfg.t_end, cfg.tol, cfg.samples_per_period); });
  Table t{"simulate", wei_norman_columns(), {}, {{"samples", std::to_string(sol.size())}}};
  for (std::size_t i = 0; i < sol.size(); ++i) t.rows.push_back(wei_norman_row(sol, i));
  return {t};
}

inline std::vector<Table> run_oracle(const ScenarioConfig& cfg) {
  const auto p = cfg.model();
  const auto times = output_times(cfg.t_end, cfg.output_samples);
  const auto sol = stage("wei-norman", [&] {
    return integrate_wei_norman(p, merged_grid(p, cfg.t_end, cfg.samples_per_period, times), cfg.tol);
  });
  const int n = cfg.trunc > 0 ? cfg.trunc : default_truncation(max_eta2(sol)) + 20;
  const auto run = stage("oracle", [&] { return integrate_exact(p, coherent_state(p.alpha, n), times, cfg.tol); });
  auto columns = wei_norman_columns();
  columns.insert(columns.end(), {"oracle_norm", "fidelity"});
  Table t{"oracle", columns, {}, {{"n_trunc", std::to_string(n)}, {"oracle_steps", std::to_string(run.steps)}}};
  double worst = 1.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto i = static_cast<std::size_t>(std::lower_bound(sol.t.begin(), sol.t.end(), times[k]) - sol.t.begin());
    const double f = stage("evolved-state", [&] { return fidelity(evolved_state(p, sol, times[k], n), run.states[k]); });
    worst = std::min(worst, f);
    auto row = wei_norman_row(sol, i);
    row.push_back(run.states[k].norm());
    row.push_back(f);
    t.rows.push_back(std::move(row));
  }
  t.meta.emplace_back("min_fidelity", format_cell(worst));
  t.meta.emplace_back("max_norm_drift", format_cell(run.max_norm_drift()));
  return {t};
}

inline std::vector<Table> run_variances(const ScenarioConfig& cfg) {
  Table t{"variances", {"xi", "ratio_q", "ratio_p"}, {}, {}};
  t.meta.emplace_back("beta", format_list({cfg.beta.real(), cfg.beta.imag()}));
  for (double xi : linspace(0.0, 2.0 * std::numbers::pi, cfg.xi_samples)) {
    const auto r = quadrature_variances({cfg.beta, xi});
    t.rows.push_back({xi, r.ratio_q, r.ratio_p});
  }
  return {t};
}

inline std::vector<Table> run_autocorr(const ScenarioConfig& cfg) {
  const std::vector<double> chis = cfg.chi_scan.empty() ? std::vector<double>{cfg.chi} : cfg.chi_scan;
  std::vector<Table> out;
  for (double chi : chis) {
    auto p = cfg.model();
    p.chi = chi;
    const auto sol =
        stage("wei-norman", [&] { return integrate_wei_norman(p, cfg.t_end, cfg.tol, cfg.samples_per_period); });
    auto s = autocorrelation_series(p, sol);
    s.revivals = detect_revivals(s, cfg.revival_threshold);
    Table t{"autocorr_chi" + format_number(chi), {"t", "tau", "re_F", "im_F", "abs_F2"}, {}, {}};
    t.meta.emplace_back("chi", format_cell(chi));
    t.meta.emplace_back("revival_threshold", format_cell(cfg.revival_threshold));
    t.meta.emplace_back("revivals", format_list(s.revivals));
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      t.rows.push_back({s.t[i], p.omega0 * s.t[i], s.f[i].real(), s.f[i].imag(), s.f2[i]});
    }
    out.push_back(std::move(t));
  }
  return out;
}

struct HusimiSnapshot {
  Table table;
  nlohmann::ordered_json sidecar;
};

inline std::vector<HusimiSnapshot> run_husimi(const ScenarioConfig& cfg) {
  const auto p = cfg.model();
  std::vector<double> times;
  for (double tau : cfg.snapshots_tau) times.push_back(tau / p.omega0);
  const double horizon = *std::max_element(times.begin(), times.end());
  const auto sol =
      stage("wei-norman", [&] { return integrate_wei_norman(p, merged_grid(p, horizon, cfg.samples_per_period, times), cfg.tol); });
  const double h = cfg.window_half_width();
  std::vector<HusimiSnapshot> out;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const auto s = sol.at(t);
    const int n = cfg.trunc > 0 ? cfg.trunc : default_truncation(std::norm(s.eta));
    const auto psi = stage("evolved-state", [&] { return evolved_state(p, sol, t, n); });
    const auto g = husimi_grid(psi, {-h, h}, {-h, h}, cfg.resolution, t);
    const auto peaks = find_peaks(g);
    HusimiSnapshot snap;
    snap.table.stem = "husimi_tau" + format_number(cfg.snapshots_tau[k]);
    snap.table.columns = {"x", "y", "Q"};
    snap.table.meta = {{"tau", format_cell(cfg.snapshots_tau[k])},
                       {"t", format_cell(t)},
                       {"n_trunc", std::to_string(n)},
                       {"grid_mass", format_cell(g.mass())},
                       {"peaks", std::to_string(peaks.size())}};
    for (std::size_t iy = 0; iy < g.y.size(); ++iy) {
      for (std::size_t ix = 0; ix < g.x.size(); ++ix) snap.table.rows.push_back({g.x[ix], g.y[iy], g.at(ix, iy)});
    }
    auto& j = snap.sidecar;
    j["tau"] = cfg.snapshots_tau[k];
    j["t"] = t;
    j["params"] = {{"omega0", p.omega0}, {"chi", p.chi}, {"alpha", {p.alpha.real(), p.alpha.imag()}}};
    j["eta"] = {s.eta.real(), s.eta.imag()};
    j["xi"] = p.chi * t;
    j["n_trunc"] = n;
    j["grid"] = {{"half_width", h}, {"resolution", cfg.resolution}};
    j["grid_mass"] = g.mass();
    j["peaks"] = nlohmann::ordered_json::array();
    for (const auto& pk : peaks) j["peaks"].push_back({{"x", pk.x}, {"y", pk.y}, {"Q", pk.value}});
    out.push_back(std::move(snap));
  }
  return out;
}

inline std::vector<Table> run_spectrum(const ScenarioConfig& cfg) {
  const auto omega = cfg.frequency();
  const auto times = output_times(cfg.t_end, cfg.output_samples);
  double lam_max = 0.0;
  for (double t : times) lam_max = std::max(lam_max, std::abs(lambda_t(cfg.drive, omega, t)));
  const int n = cfg.trunc > 0 ? cfg.trunc : default_truncation(lam_max * lam_max) + cfg.levels + 10;
  Table t{"spectrum", {"t", "tau", "n", "E_n", "lambda_t", "omega_t", "residual"}, {}, {{"n_trunc", std::to_string(n)}}};
  for (double time : times) {
    const Mat hf = driven_hamiltonian(cfg.drive, omega, time, n).matrix();
    const double lam = lambda_t(cfg.drive, omega, time);
    for (int level = 0; level < cfg.levels; ++level) {
      const double e = spectrum_Hf(level, cfg.drive, omega, time);
      const auto v = stage("eigenstate", [&] { return displaced_number_state(level, lam, n); });
      const Vec r = hf * v.amplitudes() - e * v.amplitudes();
      // the top rows feel the truncated ladder, not the physics
      const double residual = r.head(n - 1).norm();
      t.rows.push_back({time, cfg.omega0 * time, double(level), e, lam, omega(time), residual});
    }
  }
  return {t};
}

inline std::vector<Table> run_timemap(const ScenarioConfig& cfg) {
  const auto omega = cfg.frequency();
  const auto& mass = cfg.mass;
  const auto times = output_times(cfg.t_end, cfg.output_samples);
  const int n = cfg.trunc > 0 ? cfg.trunc : 40;
  const OscillatorMatrices osc(n);
  const auto psi0 = stage("initial-state", [&] { return coherent_state(cfg.alpha, n); });

  std::vector<Vec> direct;
  stage("direct", [&] {
    integrate_dopri5([&](double t, const Vec& psi) { return Vec(-kI * (osc.hamiltonian(mass(t), omega(t)) * psi)); },
                     psi0.amplitudes(), 0.0, std::span<const double>(times), step_control(cfg.tol),
                     [&](double, const Vec& psi) { direct.push_back(psi); });
    return 0;
  });
  std::vector<double> taus;
  for (double t : times) taus.push_back(stage("rho", [&] { return rho_map(mass, t); }));
  std::vector<Vec> mapped;
  stage("time-map", [&] {
    integrate_dopri5(
        [&](double tau, const Vec& psi) {
          const double t = rho_inverse(mass, tau);
          return Vec(-kI * (osc.star_hamiltonian(transformed_frequency(mass, omega, t)) * psi));
        },
        psi0.amplitudes(), 0.0, std::span<const double>(taus), step_control(cfg.tol),
        [&](double, const Vec& psi) { mapped.push_back(psi); });
    return 0;
  });

  const auto* expo = std::get_if<MassSpec::Exponential>(&mass.kind());
  const bool closed_form = expo && cfg.k == 0.0 && 4.0 * cfg.omega0 * cfg.omega0 > expo->rate * expo->rate;
  Table t{"timemap", {"t", "rho", "m", "omega_star"}, {}, {{"n_trunc", std::to_string(n)}}};
  if (closed_form) t.columns.insert(t.columns.end(), {"c_qq", "c_qp", "c_pq", "c_pp", "det"});
  t.columns.push_back("fidelity");
  double worst = 1.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double time = times[i];
    std::vector<double> row = {time, taus[i], mass(time), transformed_frequency(mass, omega, time)};
    if (closed_form) {
      const auto c = heisenberg_exp_mass(expo->m0, cfg.omega0, expo->rate, time);
      row.insert(row.end(), {c.c_qq, c.c_qp, c.c_pq, c.c_pp, c.determinant()});
    }
    const double f = std::norm(direct[i].dot(mapped[i]));
    worst = std::min(worst, f);
    row.push_back(f);
    t.rows.push_back(std::move(row));
  }
  t.meta.emplace_back("min_fidelity", format_cell(worst));
  return {t};
}

}  // namespace detail

/// Run one subcommand and write its artifacts under cfg.out_dir; returns the
/// paths written.
inline std::vector<std::filesystem::path> run_scenario(const ScenarioConfig& cfg, Subcommand cmd) {
  validate(cfg);
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  const std::string config_text = emit_config(cfg);
  const auto base = detail::base_metadata(cfg, cmd);
  const bool json = cfg.format == "json";
  std::vector<std::filesystem::path> written;
  auto emit = [&](const Table& t) {
    const auto path = dir / (t.stem + (json ? ".json" : ".csv"));
    if (json) {
      detail::write_json(path, t, base, config_text);
    } else {
      detail::write_csv(path, t, base, config_text);
    }
    written.push_back(path);
  };

  std::vector<Table> tables;
  switch (cmd) {
    case Subcommand::simulate: tables = detail::run_simulate(cfg); break;
    case Subcommand::oracle: tables = detail::run_oracle(cfg); break;
    case Subcommand::variances: tables = detail::run_variances(cfg); break;
    case Subcommand::autocorr: tables = detail::run_autocorr(cfg); break;
    case Subcommand::spectrum: tables = detail::run_spectrum(cfg); break;
    case Subcommand::timemap: tables = detail::run_timemap(cfg); break;
    case Subcommand::husimi:
      for (auto& snap : detail::run_husimi(cfg)) {
        emit(snap.table);
        if (!json) {
          const auto side = dir / (snap.table.stem + ".meta.json");
          std::ofstream(side) << snap.sidecar.dump(1) << "\n";
          written.push_back(side);
        }
      }
      break;
  }
  for (const auto& t : tables) emit(t);
  return written;
}

}  // namespace kerrosc
