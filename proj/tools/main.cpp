// Command-line front end: single runs, parameter sweeps, estimation on CSV
// curves, and the canned benchmark studies. All outputs are deterministic
// CSV/JSON; exit code is nonzero on any precondition or convergence error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nvac/constants.hpp"
#include "nvac/curves.hpp"
#include "nvac/estimation.hpp"
#include "nvac/io.hpp"
#include "nvac/scenarios.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Applies --set key.path=value overrides onto the parsed config JSON.
void apply_overrides(json& j, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key.path=value: " + s);
    const std::string path = s.substr(0, eq);
    const std::string value = s.substr(eq + 1);
    json* node = &j;
    std::size_t pos = 0;
    for (;;) {
      const auto dot = path.find('.', pos);
      const std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
      if (key.empty()) throw std::invalid_argument("bad --set path: " + path);
      if (dot == std::string::npos) {
        json parsed = json::parse(value, nullptr, false);
        (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
        break;
      }
      node = &(*node)[key];
      pos = dot + 1;
    }
  }
}

nvac::Scenario load_scenario_with_overrides(const std::string& config_path,
                                            const std::vector<std::string>& sets) {
  json j = config_path.empty() ? json::object() : json::parse(nvac::read_text_file(config_path));
  apply_overrides(j, sets);
  return nvac::scenario_from_json(j);
}

nvac::CurveRequest request_from_scenario(const nvac::Scenario& sc) {
  nvac::CurveRequest req;
  req.cfg = sc.cfg;
  req.mod = sc.mod;
  req.readout = sc.readout;
  req.kind = sc.sequence.kind;
  req.n_pi = sc.sequence.n_pi;
  req.p_offset = sc.sequence.p_offset;
  req.rabi = sc.sequence.rabi;
  req.reference = sc.sequence.reference;
  req.mode = sc.mode;
  req.prop = sc.prop;
  return req;
}

int run_simulate(const std::string& config, const std::vector<std::string>& sets,
                 const std::string& out_prefix, double record_dt) {
  const auto sc = load_scenario_with_overrides(config, sets);
  nvac::SequenceOptions seq_opts;
  seq_opts.reference = sc.sequence.reference;
  seq_opts.varphi = sc.readout.varphi;
  const bool idealized = sc.sequence.idealized || sc.mode != nvac::CurveMode::numeric_finite;
  const auto seq = nvac::build_dd_sequence(sc.sequence.kind, sc.sequence.n_pi, sc.cfg,
                                           sc.sequence.p_offset, sc.sequence.rabi, idealized,
                                           seq_opts);
  nvac::PropagatorOptions prop = sc.prop;
  prop.record_dt = record_dt > 0.0 ? record_dt : seq.total_time / 1000.0;
  const auto traj = nvac::propagate(seq, sc.cfg, sc.mod, prop);
  const double contrast = nvac::contrast_from_trajectory(traj, sc.readout);

  nvac::write_trajectory_csv(out_prefix + "_trajectory.csv", traj);
  const json summary = {{"phi_nv", traj.phi_nv},
                        {"contrast", contrast},
                        {"final_vz", traj.final_vz},
                        {"norm_drift", traj.norm_drift},
                        {"phi_nv_analytic", nvac::phi_nv_analytic(sc.cfg, sc.mod, sc.sequence.n_pi,
                                                                  sc.sequence.p_offset)},
                        {"samples", traj.states.size()}};
  nvac::write_text_file(out_prefix + "_summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int run_sweep(const std::string& config, const std::vector<std::string>& sets,
              const std::string& param, double start, double stop, int count, bool include_stop,
              const std::string& out_prefix) {
  const auto sc = load_scenario_with_overrides(config, sets);
  nvac::SweepSpec sweep;
  sweep.parameter = nvac::sweep_parameter_from_string(param);
  sweep.start = start;
  sweep.stop = stop;
  sweep.count = count;
  sweep.include_stop = include_stop;
  if (sweep.parameter == nvac::SweepParameter::bs_mod && stop <= start)
    sweep = nvac::make_bs_mod_sweep(sc.cfg.f_d, sc.sequence.n_pi, count);

  const auto curve = nvac::magnetometry_curve(sweep, request_from_scenario(sc));
  nvac::write_curve_csv(out_prefix + ".csv", curve);
  nvac::write_curve_sidecar(out_prefix + ".json", curve);
  std::cout << "wrote " << out_prefix << ".csv (" << curve.params.size() << " points)\n";
  return 0;
}

int run_fit(const std::string& input, std::string sidecar, bool symmetry, bool eta_bounds,
            bool dipolar, bool free_exponent, int n_pi, const std::string& out_path) {
  json report;
  if (dipolar) {
    const auto points = nvac::read_distance_series(input);
    nvac::DipolarOptions opts;
    opts.fit_exponent = free_exponent;
    report = nvac::to_json(nvac::fit_dipolar(points, opts));
  } else {
    if (sidecar.empty()) {
      fs::path guess = fs::path(input).replace_extension(".json");
      if (fs::exists(guess)) sidecar = guess.string();
    }
    const auto curve = nvac::read_curve(input, sidecar);
    const int n = n_pi > 0 ? n_pi : curve.n_pi;
    report = nvac::to_json(nvac::fit_contrast_curve(curve, curve.readout, n));
    if (symmetry) {
      const auto sym = nvac::delta_from_symmetry(curve);
      report["delta_symmetry"] = sym.delta;
      report["symmetry_score"] = sym.score;
      report["low_symmetry_warning"] = sym.low_symmetry_warning;
      if (sym.low_symmetry_warning)
        std::cerr << "warning: low symmetry score " << sym.score
                  << "; axis estimate may reflect drive leakage\n";
    }
    if (eta_bounds) {
      const int eta = nvac::count_local_maxima(curve.contrast);
      const auto [lo, hi] = nvac::bs_bounds_from_maxima(eta, curve.cfg.f_d, n);
      report["eta"] = eta;
      report["b_s_lower"] = lo;
      report["b_s_upper"] = hi;
    }
    if (!report.value("converged", true)) {
      std::cerr << "fit did not converge; best residual " << report["residual_norm"] << "\n";
      std::cout << report.dump(2) << "\n";
      return 2;
    }
  }
  if (!out_path.empty()) nvac::write_text_file(out_path, report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AC magnetometry simulator and estimation toolkit for two-level spin sensors"};
  app.require_subcommand(1);

  std::vector<std::string> sets;
  app.add_option("--set", sets, "Override config entries, e.g. --set field.b_d=1e-4")
      ->take_all();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Propagate one sequence and export the trajectory");
  std::string sim_config, sim_out = "run";
  double sim_record_dt = 0.0;
  sim->add_option("--config", sim_config, "Scenario JSON file");
  sim->add_option("-o,--output", sim_out, "Output prefix");
  sim->add_option("--record-dt", sim_record_dt, "Trajectory sampling interval [s]");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Sweep p_offset or bs_mod and export the contrast curve");
  std::string sw_config, sw_param = "p_offset", sw_out = "sweep";
  double sw_start = 0.0, sw_stop = nvac::two_pi;
  int sw_count = 64;
  bool sw_include_stop = false;
  sw->add_option("--config", sw_config, "Scenario JSON file");
  sw->add_option("--param", sw_param, "p_offset | bs_mod");
  sw->add_option("--start", sw_start, "Sweep start");
  sw->add_option("--stop", sw_stop, "Sweep stop (bs_mod: <= start selects one full period)");
  sw->add_option("--count", sw_count, "Sample count");
  sw->add_flag("--include-stop", sw_include_stop, "Closed grid (default half-open)");
  sw->add_option("-o,--output", sw_out, "Output prefix");

  // fit
  auto* ft = app.add_subcommand("fit", "Estimate parameters from a contrast-curve CSV");
  std::string ft_input, ft_sidecar, ft_out;
  bool ft_symmetry = false, ft_eta = false, ft_dipolar = false, ft_free_q = false;
  int ft_n_pi = 0;
  ft->add_option("--input", ft_input, "Curve CSV (or d,b_s CSV with --dipolar)")->required();
  ft->add_option("--sidecar", ft_sidecar, "Curve sidecar JSON (default: input with .json)");
  ft->add_flag("--symmetry", ft_symmetry, "Also report the symmetry-axis delta estimate");
  ft->add_flag("--eta-bounds", ft_eta, "Also report b_s bounds from the maxima count");
  ft->add_flag("--dipolar", ft_dipolar, "Fit b_s = A/(d+d0)^3 to a distance series");
  ft->add_flag("--free-exponent", ft_free_q, "Fit the dipolar exponent too");
  ft->add_option("--n-pi", ft_n_pi, "Override the pi-pulse count");
  ft->add_option("-o,--output", ft_out, "Write the report JSON here as well");

  // canned studies
  auto* f2 = app.add_subcommand("fig2", "Contrast vs pulse-train phase offset, modulated vs conventional");
  double f2_omega = nvac::two_pi * 9.6e6;
  int f2_count = 512;
  std::string f2_out = "fig2_out";
  f2->add_option("--omega", f2_omega, "Rabi strength [rad/s]");
  f2->add_option("--count", f2_count, "p samples");
  f2->add_option("-o,--output", f2_out, "Output directory");

  auto* f3 = app.add_subcommand("fig3", "Relative contrast vs normalized drive amplitude");
  int f3_count = 33;
  std::string f3_out = "fig3_out";
  f3->add_option("--sweep-count", f3_count, "bs_mod samples per curve");
  f3->add_option("-o,--output", f3_out, "Output directory");

  auto* f4a = app.add_subcommand("fig4a", "Drive-rejection benchmark (three p sweeps + leakage)");
  double f4a_mismatch = 0.0;
  std::string f4a_out = "fig4a_out", f4a_mode = "numeric_finite";
  int f4a_count = 256;
  f4a->add_option("--mismatch", f4a_mismatch, "Relative modulation amplitude mismatch");
  f4a->add_option("--mode", f4a_mode, "analytic | numeric_ideal | numeric_finite");
  f4a->add_option("--count", f4a_count, "p samples");
  f4a->add_option("-o,--output", f4a_out, "Output directory");

  auto* f4b = app.add_subcommand("fig4b", "Phase-delay recovery across the full delta range");
  nvac::Fig4bOptions f4b_opts;
  std::string f4b_out = "fig4b_out";
  f4b->add_option("--delta-count", f4b_opts.delta_count, "Number of delta values");
  f4b->add_option("--seeds", f4b_opts.seeds, "Noise seeds per cell");
  f4b->add_option("--noise", f4b_opts.noise_sigma, "Contrast noise sigma");
  f4b->add_option("--base-seed", f4b_opts.base_seed, "Base RNG seed");
  f4b->add_option("-o,--output", f4b_out, "Output directory");

  auto* f5 = app.add_subcommand("fig5", "Synthetic eddy-current response study");
  nvac::Fig5Options f5_opts;
  std::string f5_out = "fig5_out";
  f5->add_option("--noise", f5_opts.noise_sigma, "Contrast noise sigma");
  f5->add_option("--base-seed", f5_opts.base_seed, "Base RNG seed");
  f5->add_option("-o,--output", f5_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(sim_config, sets, sim_out, sim_record_dt);
    if (sw->parsed())
      return run_sweep(sw_config, sets, sw_param, sw_start, sw_stop, sw_count, sw_include_stop,
                       sw_out);
    if (ft->parsed())
      return run_fit(ft_input, ft_sidecar, ft_symmetry, ft_eta, ft_dipolar, ft_free_q, ft_n_pi,
                     ft_out);
    if (f2->parsed()) {
      nvac::Fig2Options o;
      o.omega = f2_omega;
      o.p_count = f2_count;
      o.out_dir = fs::path(f2_out);
      run_fig2(o);
      std::cout << "wrote " << f2_out << "/\n";
      return 0;
    }
    if (f3->parsed()) {
      nvac::Fig3Options o;
      o.sweep_count = f3_count;
      o.out_dir = fs::path(f3_out);
      const auto rows = run_fig3(o);
      for (const auto& r : rows)
        std::printf("normalized drive %.3f: ratio %.3f\n", r.normalized_drive, r.ratio);
      return 0;
    }
    if (f4a->parsed()) {
      nvac::Fig4aOptions o;
      o.mod_mismatch = f4a_mismatch;
      o.mode = nvac::curve_mode_from_string(f4a_mode);
      o.p_count = f4a_count;
      o.out_dir = fs::path(f4a_out);
      const auto res = run_fig4a(o);
      std::printf("leakage fraction: %.6g (well defined: %s)\n", res.leakage.fraction,
                  res.leakage.well_defined ? "yes" : "no");
      return 0;
    }
    if (f4b->parsed()) {
      f4b_opts.out_dir = fs::path(f4b_out);
      const auto rows = run_fig4b(f4b_opts);
      for (const auto& r : rows)
        std::printf("b_s %.2g T, delta %.4f: mean err %.5f rad, sym-vs-fit %.5f rad\n", r.b_s,
                    r.delta_true, r.mean_delta_error, r.symmetry_vs_fit);
      return 0;
    }
    if (f5->parsed()) {
      f5_opts.out_dir = fs::path(f5_out);
      const auto res = run_fig5(f5_opts);
      for (const auto& r : res)
        std::printf("%s: delta %.4f (true %.4f, symmetry %.4f), d0 %.4g m, exponent %.3f\n",
                    r.name.c_str(), r.delta_hat, r.delta_true, r.delta_symmetry,
                    r.dipolar.d0_hat, r.dipolar_free_exponent.exponent);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
