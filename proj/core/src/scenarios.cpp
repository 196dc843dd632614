#include "nvac/scenarios.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "nvac/angles.hpp"
#include "nvac/levmar.hpp"
#include "nvac/parallel.hpp"
#include "nvac/rng.hpp"

namespace nvac {

using nlohmann::json;

ContrastCurve add_contrast_noise(const ContrastCurve& curve, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
  ContrastCurve noisy = curve;
  GaussianStream g(seed);
  for (auto& c : noisy.contrast) c += sigma * g.next();
  return noisy;
}

namespace {

// First-harmonic amplitude of a magnetometry curve with known angular rate
// (rad per sweep unit): linear least squares on {1, cos, sin}.
double fitted_sinusoid_amplitude(const ContrastCurve& curve, double rate) {
  const int m = static_cast<int>(curve.params.size());
  std::vector<double> a(9, 0.0), b(3, 0.0), x;
  for (int j = 0; j < m; ++j) {
    const double basis[3] = {1.0, std::cos(rate * curve.params[j]),
                             std::sin(rate * curve.params[j])};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r * 3 + c] += basis[r] * basis[c];
      b[r] += basis[r] * curve.contrast[j];
    }
  }
  if (!solve_spd(a, b, 3, x)) throw std::runtime_error("sinusoid amplitude fit is singular");
  return std::hypot(x[1], x[2]);
}

void write_curve_pair(const std::filesystem::path& dir, const std::string& stem,
                      const ContrastCurve& curve) {
  write_curve_csv(dir / (stem + ".csv"), curve);
  write_curve_sidecar(dir / (stem + ".json"), curve);
}

}  // namespace

Fig2Result run_fig2(const Fig2Options& opts) {
  FieldConfig cfg;
  cfg.b_d = 100e-6;
  cfg.b_s = 4e-6;
  cfg.f_d = 152e3;
  cfg.delta = 0.065 * two_pi;

  CurveRequest req;
  req.cfg = cfg;
  req.mode = CurveMode::numeric_finite;
  req.rabi = opts.omega;

  Fig2Result result;
  req.mod.b_d_mod = cfg.b_d;
  result.sipht = magnetometry_curve(make_p_sweep(opts.p_count), req);
  req.mod.b_d_mod = 0.0;
  result.conventional = magnetometry_curve(make_p_sweep(opts.p_count), req);

  if (opts.out_dir) {
    write_curve_pair(*opts.out_dir, "p_sweep_sipht", result.sipht);
    write_curve_pair(*opts.out_dir, "p_sweep_conventional", result.conventional);
  }
  return result;
}

std::vector<Fig3Point> fig3_default_pairs() {
  // Normalized drive gamma*b_d/omega grid {0.1, 0.3, 0.5, 0.81, 1.2, 1.75}.
  const double omega = two_pi * 3.32e6;
  auto b_for = [&](double x) { return x * omega / gamma_nv; };
  return {{b_for(0.1), omega}, {b_for(0.3), omega},     {b_for(0.5), omega},
          {97e-6, omega},      {b_for(1.2), omega},     {250e-6, two_pi * 4e6}};
}

std::vector<Fig3Row> run_fig3(const Fig3Options& opts) {
  const auto pairs = opts.pairs.empty() ? fig3_default_pairs() : opts.pairs;
  const double f_d = 149e3;
  const int n_pi = 1;
  const double rate = phi_per_tesla(f_d, n_pi);

  std::vector<Fig3Row> rows(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pr = pairs[i];
    FieldConfig cfg;
    cfg.b_d = pr.b_d;
    cfg.f_d = f_d;

    CurveRequest req;
    req.cfg = cfg;
    req.mod.delta_mod = pi / 2.0;  // out-of-phase timing p = delta = pi/2
    req.p_offset = pi / 2.0;
    req.mode = CurveMode::numeric_finite;
    req.rabi = pr.omega;

    const auto sweep = make_bs_mod_sweep(f_d, n_pi, opts.sweep_count);
    req.mod.b_d_mod = cfg.b_d;
    const auto sipht = magnetometry_curve(sweep, req);
    req.mod.b_d_mod = 0.0;
    const auto conventional = magnetometry_curve(sweep, req);

    Fig3Row row;
    row.b_d = pr.b_d;
    row.omega = pr.omega;
    row.normalized_drive = gamma_nv * pr.b_d / pr.omega;
    row.amplitude_sipht = fitted_sinusoid_amplitude(sipht, rate);
    row.amplitude_conventional = fitted_sinusoid_amplitude(conventional, rate);
    row.ratio = row.amplitude_sipht / row.amplitude_conventional;
    rows[i] = row;

    if (opts.out_dir) {
      const std::string tag = "drive_" + std::to_string(i);
      write_curve_pair(*opts.out_dir, tag + "_sipht", sipht);
      write_curve_pair(*opts.out_dir, tag + "_conventional", conventional);
    }
  }

  if (opts.out_dir) {
    json j = json::array();
    for (const auto& r : rows)
      j.push_back({{"b_d", r.b_d},
                   {"omega", r.omega},
                   {"normalized_drive", r.normalized_drive},
                   {"amplitude_sipht", r.amplitude_sipht},
                   {"amplitude_conventional", r.amplitude_conventional},
                   {"ratio", r.ratio}});
    write_text_file(*opts.out_dir / "relative_contrast.json", j.dump(2) + "\n");
  }
  return rows;
}

Fig4aResult run_fig4a(const Fig4aOptions& opts) {
  FieldConfig cfg;
  cfg.b_d = opts.b_d;
  cfg.f_d = opts.f_d;

  CurveRequest req;
  req.cfg = cfg;
  req.mode = opts.mode;
  req.rabi = opts.omega;
  const auto sweep = make_p_sweep(opts.p_count);

  Fig4aResult result;
  // Reference: no drive, no modulation.
  req.cfg.b_d = 0.0;
  req.mod.b_d_mod = 0.0;
  result.reference = magnetometry_curve(sweep, req);
  // Conventional: drive on, no modulation.
  req.cfg.b_d = opts.b_d;
  result.conventional = magnetometry_curve(sweep, req);
  // Matched modulation (with optional injected mismatch).
  req.mod.b_d_mod = (1.0 - opts.mod_mismatch) * opts.b_d;
  result.sipht = magnetometry_curve(sweep, req);

  result.leakage = measure_leakage(result.sipht, result.conventional);

  if (opts.out_dir) {
    write_curve_pair(*opts.out_dir, "p_sweep_reference", result.reference);
    write_curve_pair(*opts.out_dir, "p_sweep_conventional", result.conventional);
    write_curve_pair(*opts.out_dir, "p_sweep_sipht", result.sipht);
    json j = {{"leakage_fraction", result.leakage.fraction},
              {"well_defined", result.leakage.well_defined},
              {"modulated_leakage", result.leakage.modulated_leakage},
              {"conventional_leakage", result.leakage.conventional_leakage},
              {"mod_mismatch", opts.mod_mismatch}};
    write_text_file(*opts.out_dir / "leakage.json", j.dump(2) + "\n");
  }
  return result;
}

std::vector<Fig4bRow> run_fig4b(const Fig4bOptions& opts) {
  if (opts.b_s.size() != opts.b_d.size())
    throw std::invalid_argument("b_s and b_d lists must pair up");
  const int n_cells = opts.delta_count * static_cast<int>(opts.b_s.size());
  std::vector<Fig4bRow> rows(static_cast<std::size_t>(n_cells));

  parallel_for(static_cast<std::size_t>(n_cells), [&](std::size_t cell) {
    const std::size_t amp_idx = cell / static_cast<std::size_t>(opts.delta_count);
    const int delta_idx = static_cast<int>(cell % static_cast<std::size_t>(opts.delta_count));
    const double delta_true = two_pi * delta_idx / opts.delta_count;

    FieldConfig cfg;
    cfg.b_d = opts.b_d[amp_idx];
    cfg.b_s = opts.b_s[amp_idx];
    cfg.f_d = opts.f_d;
    cfg.delta = delta_true;

    CurveRequest req;
    req.cfg = cfg;
    req.mod.b_d_mod = cfg.b_d;  // SIPHT condition
    req.mode = CurveMode::analytic;
    const auto clean = magnetometry_curve(make_p_sweep(opts.p_count), req);

    double sum_err = 0.0, sum_sq = 0.0;
    double sym_vs_fit = 0.0;
    for (int s = 0; s < opts.seeds; ++s) {
      const std::uint64_t seed = opts.base_seed + 100000u * cell + static_cast<std::uint64_t>(s);
      const auto noisy = add_contrast_noise(clean, opts.noise_sigma, seed);
      const auto fit = fit_contrast_curve(noisy, noisy.readout, 1);
      const double err = circular_diff(fit.delta_hat, delta_true);
      sum_err += err;
      sum_sq += err * err;
      if (s == 0) {
        const auto sym = delta_from_symmetry(noisy);
        sym_vs_fit = std::abs(circular_diff(sym.delta, fit.delta_hat));
      }
    }
    Fig4bRow row;
    row.b_s = cfg.b_s;
    row.delta_true = delta_true;
    row.mean_delta_error = sum_err / opts.seeds;
    row.std_delta_error =
        std::sqrt(std::max(0.0, sum_sq / opts.seeds - row.mean_delta_error * row.mean_delta_error));
    row.symmetry_vs_fit = sym_vs_fit;
    row.sample_spacing = two_pi / opts.p_count;
    rows[cell] = row;
  });

  if (opts.out_dir) {
    json j = json::array();
    for (const auto& r : rows)
      j.push_back({{"b_s", r.b_s},
                   {"delta_true", r.delta_true},
                   {"mean_delta_error", r.mean_delta_error},
                   {"std_delta_error", r.std_delta_error},
                   {"symmetry_vs_fit", r.symmetry_vs_fit},
                   {"sample_spacing", r.sample_spacing}});
    write_text_file(*opts.out_dir / "delta_recovery.json", j.dump(2) + "\n");
  }
  return rows;
}

std::vector<Fig5Material> fig5_default_materials() {
  return {{"Cu", 0.48 * two_pi, 1.4e-13, 2e-3},
          {"Al", 0.47 * two_pi, 1.2e-13, 2e-3},
          {"Ti", 0.31 * two_pi, 4e-14, 2e-3}};
}

std::vector<Fig5MaterialResult> run_fig5(const Fig5Options& opts) {
  const auto materials = opts.materials.empty() ? fig5_default_materials() : opts.materials;
  if (opts.distances.size() < 3)
    throw std::invalid_argument("need >= 3 distances for the dipolar series");

  std::vector<Fig5MaterialResult> results;
  std::uint64_t seed = opts.base_seed;
  for (const auto& mat : materials) {
    Fig5MaterialResult res;
    res.name = mat.name;
    res.delta_true = mat.delta;

    for (std::size_t di = 0; di < opts.distances.size(); ++di) {
      const double d = opts.distances[di];
      FieldConfig cfg;
      cfg.b_d = opts.b_d;
      cfg.f_d = opts.f_d;
      cfg.delta = mat.delta;
      cfg.b_s = mat.amplitude / std::pow(d + mat.d0, 3.0);

      CurveRequest req;
      req.cfg = cfg;
      req.mod.b_d_mod = cfg.b_d;
      req.mode = CurveMode::analytic;
      auto curve = magnetometry_curve(make_p_sweep(opts.p_count), req);
      if (opts.noise_sigma > 0.0) curve = add_contrast_noise(curve, opts.noise_sigma, seed++);

      const auto fit = fit_contrast_curve(curve, curve.readout, 1);
      res.series.emplace_back(d, fit.b_s_hat);
      if (di == 0) {
        res.delta_hat = fit.delta_hat;
        res.delta_symmetry = delta_from_symmetry(curve).delta;
      }
      if (opts.out_dir)
        write_curve_pair(*opts.out_dir, mat.name + "_d" + std::to_string(di), curve);
    }

    res.dipolar = fit_dipolar(res.series);
    DipolarOptions free_q;
    free_q.fit_exponent = true;
    res.dipolar_free_exponent = fit_dipolar(res.series, free_q);
    results.push_back(std::move(res));
  }

  if (opts.out_dir) {
    json j = json::array();
    for (const auto& r : results) {
      json series = json::array();
      for (const auto& [d, b] : r.series) series.push_back({d, b});
      j.push_back({{"name", r.name},
                   {"delta_true", r.delta_true},
                   {"delta_hat", r.delta_hat},
                   {"delta_symmetry", r.delta_symmetry},
                   {"series", series},
                   {"dipolar", to_json(r.dipolar)},
                   {"dipolar_free_exponent", to_json(r.dipolar_free_exponent)}});
      write_distance_series(*opts.out_dir / (r.name + "_series.csv"), r.series);
    }
    write_text_file(*opts.out_dir / "materials.json", j.dump(2) + "\n");
  }
  return results;
}

}  // namespace nvac
