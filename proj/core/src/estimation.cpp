#include "nvac/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nvac/angles.hpp"
#include "nvac/levmar.hpp"

namespace nvac {

namespace {

void require_uniform_full_period(const ContrastCurve& curve) {
  curve.validate();
  if (curve.sweep_param != SweepParameter::p_offset)
    throw std::invalid_argument("operation requires a p_offset sweep");
  const std::size_t m = curve.params.size();
  const double spacing = curve.params[1] - curve.params[0];
  for (std::size_t i = 1; i < m; ++i) {
    const double d = curve.params[i] - curve.params[i - 1];
    if (std::abs(d - spacing) > 1e-6 * spacing)
      throw std::invalid_argument("curve must be uniformly sampled");
  }
  const double span = curve.params.back() - curve.params.front() + spacing;
  if (std::abs(span - two_pi) > 1e-6)
    throw std::invalid_argument("curve must cover one full 2*pi period in p");
}

double curve_variance(const std::vector<double>& y) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  return var / static_cast<double>(y.size());
}

// SSE of the single-response symmetry model
//   c(p) = c0 + c_star*cos(A*cos(p - axis) + varphi)
// at fixed axis, minimized over A >= 0 by scan plus golden-section.
double best_axis_model_sse(const ContrastCurve& curve, double axis, double a_max) {
  const auto& ps = curve.params;
  const auto& ys = curve.contrast;
  const auto sse_at = [&](double a) {
    double s = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const double m = curve.readout.c0 +
                       curve.readout.c_star *
                           std::cos(a * std::cos(ps[i] - axis) + curve.readout.varphi);
      s += (m - ys[i]) * (m - ys[i]);
    }
    return s;
  };
  const int n_scan = 256;
  double best_a = 0.0, best = sse_at(0.0);
  for (int i = 1; i <= n_scan; ++i) {
    const double a = a_max * i / n_scan;
    const double s = sse_at(a);
    if (s < best) {
      best = s;
      best_a = a;
    }
  }
  double lo = std::max(0.0, best_a - a_max / n_scan);
  double hi = std::min(a_max, best_a + a_max / n_scan);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
  double f1 = sse_at(x1), f2 = sse_at(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-12 * (1.0 + a_max); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = sse_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = sse_at(x2);
    }
  }
  return sse_at(0.5 * (lo + hi));
}

}  // namespace

int count_local_maxima(std::span<const double> contrast) {
  const std::size_t m = contrast.size();
  if (m < 3) throw std::invalid_argument("need at least 3 samples to count maxima");
  std::vector<double> sm(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double prev = contrast[(i + m - 1) % m];
    const double next = contrast[(i + 1) % m];
    sm[i] = (prev + contrast[i] + next) / 3.0;
  }
  int count = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double prev = sm[(i + m - 1) % m];
    const double next = sm[(i + 1) % m];
    if (sm[i] > prev && sm[i] > next) ++count;
  }
  return count;
}

std::pair<double, double> bs_bounds_from_maxima(int eta, double f_d, int n_pi) {
  if (eta < 1) throw std::invalid_argument("eta must be >= 1");
  if (!(f_d > 0.0)) throw std::invalid_argument("f_d must be > 0");
  if (n_pi < 1) throw std::invalid_argument("n_pi must be >= 1");
  const double unit = pi * pi * f_d / (4.0 * gamma_nv * static_cast<double>(n_pi));
  const double lower = std::max(0.0, (eta - 2) * unit);
  const double upper = eta * unit;
  return {lower, upper};
}

FitResult fit_contrast_curve(const ContrastCurve& curve, const ReadoutModel& readout, int n_pi,
                             const CurveFitOptions& opts) {
  require_uniform_full_period(curve);
  readout.validate();
  if (curve.params.size() < 8)
    throw std::invalid_argument("fit_contrast_curve needs >= 8 samples");
  if (readout.c_star <= 0.0)
    throw std::invalid_argument("fit_contrast_curve needs c_star > 0");

  const double k = phi_per_tesla(curve.cfg.f_d, n_pi);
  const auto& ps = curve.params;
  const auto& ys = curve.contrast;
  const int m = static_cast<int>(ps.size());

  // Parameters x = (leakage, b_s, delta).
  const auto residual_fn = [&](const std::vector<double>& x, std::vector<double>& r) {
    for (int j = 0; j < m; ++j) {
      const double arg = k * (x[0] * std::cos(ps[j]) + x[1] * std::cos(ps[j] - x[2])) +
                         readout.varphi;
      r[j] = readout.c0 + readout.c_star * std::cos(arg) - ys[j];
    }
  };
  const auto jacobian_fn = [&](const std::vector<double>& x, std::vector<double>& jac) {
    for (int j = 0; j < m; ++j) {
      const double arg = k * (x[0] * std::cos(ps[j]) + x[1] * std::cos(ps[j] - x[2])) +
                         readout.varphi;
      const double outer = -readout.c_star * std::sin(arg);
      jac[j * 3 + 0] = outer * k * std::cos(ps[j]);
      jac[j * 3 + 1] = outer * k * std::cos(ps[j] - x[2]);
      jac[j * 3 + 2] = outer * k * x[1] * std::sin(ps[j] - x[2]);
    }
  };

  // Initial response amplitude from the maxima count of the data.
  const int eta = count_local_maxima(ys);
  const double a_init = (eta <= 1) ? pi / 4.0 : (eta - 1) * pi / 2.0;
  const double bs_init = a_init / k;
  // Nominal generating configuration seeds the (possibly large) leakage.
  const double leak_init = curve.cfg.b_d - curve.mod.b_d_mod;

  LMOptions lm_opts;
  lm_opts.max_iter = opts.max_iter;
  LMResult best;
  best.ssr = std::numeric_limits<double>::infinity();
  for (int s = 0; s < std::max(1, opts.n_delta_starts); ++s) {
    const double delta0 = two_pi * s / std::max(1, opts.n_delta_starts);
    auto result = levmar_fit(m, residual_fn, jacobian_fn, {leak_init, bs_init, delta0}, lm_opts);
    if (result.ssr < best.ssr) best = std::move(result);
  }

  FitResult out;
  out.converged = best.converged;
  out.iterations = best.iterations;
  out.leakage_hat = best.x[0];
  out.b_s_hat = best.x[1];
  out.delta_hat = best.x[2];
  if (out.b_s_hat < 0.0) {
    out.b_s_hat = -out.b_s_hat;
    out.delta_hat += pi;
  }
  out.delta_hat = wrap_to_2pi(out.delta_hat);
  out.residual_norm = std::sqrt(best.ssr / m);
  out.delta_unidentifiable =
      out.b_s_hat < opts.bs_identifiable_rel * bs_mod_period(curve.cfg.f_d, n_pi);

  // Covariance sigma^2 * (J^T J)^-1 from the Gauss-Newton Hessian.
  const double sigma2 = (m > 3) ? best.ssr / (m - 3) : 0.0;
  bool cov_ok = true;
  for (int col = 0; col < 3 && cov_ok; ++col) {
    std::vector<double> e(3, 0.0);
    e[static_cast<std::size_t>(col)] = 1.0;
    std::vector<double> x;
    if (!solve_spd(best.jtj, e, 3, x)) {
      cov_ok = false;
      break;
    }
    for (int row = 0; row < 3; ++row)
      out.covariance[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] =
          sigma2 * x[static_cast<std::size_t>(row)];
  }
  if (!cov_ok) {
    for (auto& row : out.covariance) row.fill(0.0);
    out.delta_unidentifiable = true;
  } else {
    // Symmetrize away the solve round-off.
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) {
        const double avg = 0.5 * (out.covariance[a][b] + out.covariance[b][a]);
        out.covariance[a][b] = avg;
        out.covariance[b][a] = avg;
      }
  }
  return out;
}

SymmetryResult delta_from_symmetry(const ContrastCurve& curve) {
  require_uniform_full_period(curve);
  const auto& ys = curve.contrast;
  const std::size_t m = ys.size();
  const double spacing = curve.params[1] - curve.params[0];

  // Reflection mismatch over all sample and half-sample axes. An axis at
  // j*spacing/2 reflects sample i onto sample (j - i) mod m exactly.
  const std::size_t n_axes = 2 * m;
  std::vector<double> score(n_axes, 0.0);
  for (std::size_t j = 0; j < n_axes; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t r = (j + 2 * m - i) % m;
      const double d = ys[i] - ys[r];
      s += d * d;
    }
    score[j] = s / static_cast<double>(m);
  }
  std::size_t j_best = 0;
  for (std::size_t j = 1; j < n_axes; ++j)
    if (score[j] < score[j_best]) j_best = j;

  // Parabolic refinement on the circular score profile.
  const double sl = score[(j_best + n_axes - 1) % n_axes];
  const double sc = score[j_best];
  const double sr = score[(j_best + 1) % n_axes];
  double shift = 0.0;
  const double denom = sl - 2.0 * sc + sr;
  if (denom > 1e-300) shift = 0.5 * (sl - sr) / denom;
  shift = std::clamp(shift, -0.5, 0.5);
  const double axis = curve.params.front() + (static_cast<double>(j_best) + shift) * 0.5 * spacing;

  const double var = curve_variance(ys);
  SymmetryResult out;
  out.score = (var > 0.0) ? sc / (2.0 * var) : 1.0;
  out.low_symmetry_warning = out.score > 0.05;

  // Tie-break axis vs axis + pi with the varphi-consistent response model:
  // the true axis is the one where phi(p) = +A*cos(p - axis) explains the
  // curve (the readout phase breaks the cosine's evenness).
  const int eta = count_local_maxima(ys);
  const double a_max = (eta + 1) * pi / 2.0;
  const double sse_a = best_axis_model_sse(curve, axis, a_max);
  const double sse_b = best_axis_model_sse(curve, axis + pi, a_max);
  out.delta = wrap_to_2pi(sse_a <= sse_b ? axis : axis + pi);
  return out;
}

LeakageResult measure_leakage(const ContrastCurve& curve_sipht,
                              const ContrastCurve& curve_conventional) {
  if (std::abs(curve_sipht.cfg.f_d - curve_conventional.cfg.f_d) > 1e-9 ||
      std::abs(curve_sipht.cfg.b_d - curve_conventional.cfg.b_d) > 1e-15)
    throw std::invalid_argument("leakage curves must share the field configuration");

  const auto fit_s = fit_contrast_curve(curve_sipht, curve_sipht.readout, curve_sipht.n_pi);
  const auto fit_c =
      fit_contrast_curve(curve_conventional, curve_conventional.readout, curve_conventional.n_pi);

  LeakageResult out;
  out.modulated_leakage = fit_s.leakage_hat;
  out.conventional_leakage = fit_c.leakage_hat;
  const double denom = std::abs(fit_c.leakage_hat);
  out.well_defined = denom > 1e-12 * std::max(curve_conventional.cfg.b_d, 1e-9);
  out.fraction = out.well_defined ? std::abs(fit_s.leakage_hat) / denom : 0.0;
  return out;
}

DipolarFit fit_dipolar(std::span<const std::pair<double, double>> points,
                       const DipolarOptions& opts) {
  if (points.size() < 3) throw std::invalid_argument("fit_dipolar needs >= 3 points");
  std::vector<std::pair<double, double>> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].second > 0.0)) throw std::invalid_argument("fit_dipolar needs b_s > 0");
    if (i > 0 && !(pts[i].first > pts[i - 1].first))
      throw std::invalid_argument("fit_dipolar needs distinct distances");
  }

  DipolarFit out;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].second > pts[i - 1].second) out.non_monotonic_warning = true;

  // Log-linear solve on the two farthest points:
  //   (d2 + d0)/(d1 + d0) = (b1/b2)^(1/3)
  const auto& [d1, b1] = pts[pts.size() - 2];
  const auto& [d2, b2] = pts[pts.size() - 1];
  double d0_init = 0.0;
  const double rho = std::cbrt(b1 / b2);
  if (rho > 1.0 + 1e-12) d0_init = std::max(0.0, (d2 - rho * d1) / (rho - 1.0));
  double a_init = b2 * std::pow(d2 + d0_init, 3.0);

  const int m = static_cast<int>(pts.size());
  const bool free_q = opts.fit_exponent;
  const int n = free_q ? 3 : 2;

  const auto model = [&](const std::vector<double>& x, double d) {
    const double q = free_q ? x[2] : 3.0;
    return x[0] / std::pow(d + x[1], q);
  };
  const auto residual_fn = [&](const std::vector<double>& x, std::vector<double>& r) {
    for (int j = 0; j < m; ++j) r[j] = model(x, pts[static_cast<std::size_t>(j)].first) -
                                       pts[static_cast<std::size_t>(j)].second;
  };
  const auto jacobian_fn = [&](const std::vector<double>& x, std::vector<double>& jac) {
    const double q = free_q ? x[2] : 3.0;
    for (int j = 0; j < m; ++j) {
      const double base = pts[static_cast<std::size_t>(j)].first + x[1];
      const double pw = std::pow(base, q);
      jac[j * n + 0] = 1.0 / pw;
      jac[j * n + 1] = -q * x[0] / (pw * base);
      if (free_q) jac[j * n + 2] = -x[0] * std::log(base) / pw;
    }
  };
  const auto project = [&](std::vector<double>& x) {
    x[0] = std::max(x[0], 0.0);
    x[1] = std::max(x[1], 0.0);
    if (free_q) x[2] = std::clamp(x[2], 0.5, 12.0);
  };

  std::vector<double> x0 = {a_init, d0_init};
  if (free_q) x0.push_back(3.0);
  LMOptions lm_opts;
  lm_opts.max_iter = opts.max_iter;
  const auto result = levmar_fit(m, residual_fn, jacobian_fn, x0, lm_opts, project);

  out.amplitude = result.x[0];
  out.d0_hat = result.x[1];
  out.exponent = free_q ? result.x[2] : 3.0;
  out.residual_norm = std::sqrt(result.ssr / m);
  out.converged = result.converged;
  return out;
}

NullSearchResult null_search_b_mod(const std::function<double(double)>& variation_oracle,
                                   double lo, double hi, const NullSearchOptions& opts) {
  if (!(lo < hi)) throw std::invalid_argument("null search needs lo < hi");
  const int n = std::max(opts.scan_points, 5);
  std::vector<double> xs(static_cast<std::size_t>(n)), vs(static_cast<std::size_t>(n));
  double v_min = std::numeric_limits<double>::infinity();
  double v_max = -std::numeric_limits<double>::infinity();
  int i_min = 0;
  for (int i = 0; i < n; ++i) {
    xs[i] = lo + (hi - lo) * i / (n - 1);
    vs[i] = variation_oracle(xs[i]);
    if (vs[i] < v_min) {
      v_min = vs[i];
      i_min = i;
    }
    v_max = std::max(v_max, vs[i]);
  }

  NullSearchResult out;
  if (v_max - v_min <= opts.flat_rel * std::max(v_max, 1e-300)) {
    out.flat_response = true;
    out.b_mod = xs[static_cast<std::size_t>(i_min)];
    out.variation_at_min = v_min;
    return out;
  }

  double a = xs[static_cast<std::size_t>(std::max(0, i_min - 1))];
  double b = xs[static_cast<std::size_t>(std::min(n - 1, i_min + 1))];
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = variation_oracle(x1), f2 = variation_oracle(x2);
  while (b - a > opts.rel_tol * (hi - lo)) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = variation_oracle(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = variation_oracle(x2);
    }
  }
  out.b_mod = 0.5 * (a + b);
  out.variation_at_min = variation_oracle(out.b_mod);
  out.at_boundary = (i_min == 0 || i_min == n - 1);
  out.converged = !out.at_boundary;
  return out;
}

std::function<double(double)> make_analytic_variation_oracle(FieldConfig cfg, ModulationConfig mod,
                                                             ReadoutModel readout, int n_pi,
                                                             int probe_points) {
  cfg.validate();
  mod.validate();
  readout.validate();
  if (probe_points < 3) throw std::invalid_argument("need >= 3 probe points");
  return [=](double b_mod) {
    ModulationConfig m = mod;
    m.b_d_mod = b_mod;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < probe_points; ++i) {
      const double p = two_pi * i / probe_points;
      const double c = contrast_from_phase(phi_nv_analytic(cfg, m, n_pi, p), readout);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    return hi - lo;
  };
}

std::function<double(double)> make_numeric_variation_oracle(FieldConfig cfg, ModulationConfig mod,
                                                            ReadoutModel readout,
                                                            SequenceKind kind, int n_pi,
                                                            double rabi, PropagatorOptions prop,
                                                            int probe_points) {
  cfg.validate();
  mod.validate();
  readout.validate();
  if (probe_points < 3) throw std::invalid_argument("need >= 3 probe points");
  return [=](double b_mod) {
    ModulationConfig m = mod;
    m.b_d_mod = b_mod;
    SequenceOptions seq_opts;
    seq_opts.varphi = readout.varphi;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < probe_points; ++i) {
      const double p = two_pi * i / probe_points;
      const auto seq = build_dd_sequence(kind, n_pi, cfg, p, rabi, false, seq_opts);
      const auto traj = propagate(seq, cfg, m, prop);
      const double c = contrast_from_trajectory(traj, readout);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    return hi - lo;
  };
}

}  // namespace nvac
