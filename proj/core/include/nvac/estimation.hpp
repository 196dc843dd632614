#pragma once

#include <array>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "nvac/curves.hpp"

namespace nvac {

struct CurveFitOptions {
  int n_delta_starts = 8;  // multi-start grid over the delta initialization
  int max_iter = 200;
  // Fitted |b_s| below this fraction of the bs_mod period flags delta as
  // unidentifiable.
  double bs_identifiable_rel = 1e-6;
};

struct FitResult {
  double b_s_hat = 0.0;      // [T], >= 0
  double delta_hat = 0.0;    // [rad], wrapped to [0, 2pi)
  double leakage_hat = 0.0;  // fitted residual drive amplitude b_d - b_d_mod [T]
  std::array<std::array<double, 3>, 3> covariance{};  // (leakage, b_s, delta)
  double residual_norm = 0.0;  // RMS residual
  bool converged = false;
  bool delta_unidentifiable = false;
  int iterations = 0;
};

// Nonlinear least squares of
//   C(p) = c0 + c_star*cos( phi_per_tesla(f_d, n_pi) *
//            [leakage*cos(p) + b_s*cos(p - delta)] + varphi )
// over (leakage, b_s, delta), multi-started over a delta grid. Requires at
// least 8 samples spanning at least one 2*pi period in p.
FitResult fit_contrast_curve(const ContrastCurve& curve, const ReadoutModel& readout, int n_pi,
                             const CurveFitOptions& opts = {});

struct SymmetryResult {
  double delta = 0.0;  // symmetry-axis estimate, wrapped to [0, 2pi)
  double score = 0.0;  // reflection mismatch relative to curve variance (0 = perfect)
  bool low_symmetry_warning = false;
};

// Finds the axis p = delta about which the curve is even, by minimizing the
// reflection mismatch over all sample and half-sample axes (with parabolic
// refinement). The delta vs delta+pi tie is broken by the readout-phase sign
// convention: both candidates are scored against the varphi-consistent
// single-response model and the consistent one wins. Assumes a uniform,
// full-period p sweep and SIPHT-like conditions (leakage ~ 0); a large
// reflection mismatch raises low_symmetry_warning.
SymmetryResult delta_from_symmetry(const ContrastCurve& curve);

// Strict three-point local maxima of a periodic sample set after a
// window-3 moving average.
int count_local_maxima(std::span<const double> contrast);

// Response-amplitude bounds from the count of local maxima over one 2*pi
// period in p:  ( max(0, (eta-2)*pi^2*f_d/(4*gamma)), eta*pi^2*f_d/(4*gamma) )
// scaled by 1/n_pi.
std::pair<double, double> bs_bounds_from_maxima(int eta, double f_d, int n_pi);

struct LeakageResult {
  double fraction = 0.0;  // |fitted drive phase, modulated| / |fitted, conventional|
  bool well_defined = false;
  double modulated_leakage = 0.0;     // [T]
  double conventional_leakage = 0.0;  // [T]
};

// Ratio of fitted drive-induced phase amplitudes between a phase-modulated
// p sweep and its conventional counterpart (same field, b_d_mod differs).
// Reported as not well defined when the conventional amplitude is ~ 0.
LeakageResult measure_leakage(const ContrastCurve& curve_sipht,
                              const ContrastCurve& curve_conventional);

struct DipolarFit {
  double amplitude = 0.0;  // A [T*m^3] (units follow the fitted exponent)
  double d0_hat = 0.0;     // offset distance [m], >= 0
  double exponent = 3.0;   // fixed at 3 unless fit_exponent is set
  double residual_norm = 0.0;
  bool converged = false;
  bool non_monotonic_warning = false;
};

struct DipolarOptions {
  bool fit_exponent = false;
  int max_iter = 200;
};

// Least squares of b_s = A/(d + d0)^3 over (A, d0 >= 0), initialized from a
// log-linear solve on the two farthest points. Requires >= 3 points with
// distinct d; non-monotonic data warns but still fits.
DipolarFit fit_dipolar(std::span<const std::pair<double, double>> points,
                       const DipolarOptions& opts = {});

struct NullSearchOptions {
  int scan_points = 129;    // coarse grid over the search range
  double rel_tol = 1e-9;    // golden-section width target, relative to range
  double flat_rel = 1e-3;   // variation dynamic range below this is "flat"
};

struct NullSearchResult {
  double b_mod = 0.0;          // variation-minimizing modulation amplitude [T]
  double variation_at_min = 0.0;
  bool converged = false;
  bool flat_response = false;  // no usable structure in range
  bool at_boundary = false;    // minimum pinned to an endpoint (range likely excludes the null)
};

// Minimizes a drive-variation merit over b_d_mod in [lo, hi]: coarse scan
// plus golden-section refinement. The oracle must map b_d_mod to a
// non-negative measure of drive-induced contrast variation (see the
// make_*_variation_oracle builders); a single fixed-p contrast value is not
// sufficient, as it is periodic in b_d_mod.
NullSearchResult null_search_b_mod(const std::function<double(double)>& variation_oracle,
                                   double lo, double hi, const NullSearchOptions& opts = {});

// Max-minus-min contrast over a p probe grid, as a function of b_d_mod, from
// the closed-form model. Zero exactly at b_d_mod = b_d when b_s = 0.
std::function<double(double)> make_analytic_variation_oracle(FieldConfig cfg, ModulationConfig mod,
                                                             ReadoutModel readout, int n_pi,
                                                             int probe_points = 17);

// Same merit evaluated with finite-pulse propagation.
std::function<double(double)> make_numeric_variation_oracle(FieldConfig cfg, ModulationConfig mod,
                                                            ReadoutModel readout,
                                                            SequenceKind kind, int n_pi,
                                                            double rabi, PropagatorOptions prop,
                                                            int probe_points = 17);

}  // namespace nvac
