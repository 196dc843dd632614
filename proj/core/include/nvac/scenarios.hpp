#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nvac/curves.hpp"
#include "nvac/estimation.hpp"
#include "nvac/io.hpp"

namespace nvac {

// Canned desk-scale studies. Each returns its results in memory; pass an
// output directory to also write CSV data plus JSON metadata. Reruns with
// identical inputs are byte-identical.

// Adds zero-mean Gaussian noise (sigma, seed) to a curve's contrast.
ContrastCurve add_contrast_noise(const ContrastCurve& curve, double sigma, std::uint64_t seed);

// --- fig2: p sweep at fixed drive/response, phase-modulated vs conventional.
struct Fig2Options {
  double omega = two_pi * 9.6e6;  // Rabi strength [rad/s]
  int p_count = 512;
  std::optional<std::filesystem::path> out_dir;
};
struct Fig2Result {
  ContrastCurve sipht;
  ContrastCurve conventional;
};
Fig2Result run_fig2(const Fig2Options& opts = {});

// --- fig3: relative contrast of modulated vs conventional echo over a
// normalized drive amplitude grid, from fitted magnetometry-curve amplitudes.
struct Fig3Point {
  double b_d = 0.0;    // [T]
  double omega = 0.0;  // [rad/s]
};
struct Fig3Options {
  std::vector<Fig3Point> pairs;  // empty selects the default grid
  int sweep_count = 33;
  std::optional<std::filesystem::path> out_dir;
};
struct Fig3Row {
  double b_d = 0.0;
  double omega = 0.0;
  double normalized_drive = 0.0;  // gamma*b_d/omega
  double amplitude_sipht = 0.0;
  double amplitude_conventional = 0.0;
  double ratio = 0.0;
};
std::vector<Fig3Row> run_fig3(const Fig3Options& opts = {});
std::vector<Fig3Point> fig3_default_pairs();

// --- fig4a: drive-rejection benchmark. Three p sweeps (no drive / drive
// without modulation / drive with matched modulation) and the fitted
// leakage fraction; optionally with a relative amplitude mismatch injected
// into the modulation.
struct Fig4aOptions {
  double b_d = 102e-6;
  double f_d = 152e3;
  double omega = two_pi * 9.6e6;
  double mod_mismatch = 0.0;  // relative: b_d_mod = (1 - mod_mismatch)*b_d
  CurveMode mode = CurveMode::numeric_finite;
  int p_count = 128;
  std::optional<std::filesystem::path> out_dir;
};
struct Fig4aResult {
  ContrastCurve reference;     // no drive, no modulation
  ContrastCurve conventional;  // drive, no modulation
  ContrastCurve sipht;         // drive, matched modulation
  LeakageResult leakage;
};
Fig4aResult run_fig4a(const Fig4aOptions& opts = {});

// --- fig4b: phase-delay recovery across the full delta range under noise.
struct Fig4bOptions {
  int delta_count = 16;
  std::vector<double> b_s = {2e-6, 7e-6};
  std::vector<double> b_d = {78e-6, 75e-6};
  double f_d = 160e3;
  double noise_sigma = 0.01;
  int seeds = 100;
  int p_count = 64;
  std::uint64_t base_seed = 1234;
  std::optional<std::filesystem::path> out_dir;
};
struct Fig4bRow {
  double b_s = 0.0;
  double delta_true = 0.0;
  double mean_delta_error = 0.0;  // circular mean of delta_hat - delta_true [rad]
  double std_delta_error = 0.0;
  double symmetry_vs_fit = 0.0;   // |delta_symmetry - delta_hat| on the first seed [rad]
  double sample_spacing = 0.0;
};
std::vector<Fig4bRow> run_fig4b(const Fig4bOptions& opts = {});

// --- fig5: synthetic eddy-current response study. Per-material phase
// delays and a dipolar distance series, generated, measured through the
// p-sweep + fit pipeline, then fit for the distance law.
struct Fig5Material {
  std::string name;
  double delta = 0.0;      // response phase delay [rad]
  double amplitude = 0.0;  // dipolar amplitude A [T*m^3]
  double d0 = 0.0;         // offset distance [m]
};
struct Fig5Options {
  std::vector<Fig5Material> materials;  // empty selects Cu/Al/Ti defaults
  std::vector<double> distances = {1e-3, 1.5e-3, 2e-3, 3e-3, 4e-3, 5e-3};
  double b_d = 100e-6;
  double f_d = 152e3;
  int p_count = 128;
  double noise_sigma = 0.0;
  std::uint64_t base_seed = 99;
  std::optional<std::filesystem::path> out_dir;
};
struct Fig5MaterialResult {
  std::string name;
  double delta_true = 0.0;
  double delta_hat = 0.0;       // fitted at the reference (closest) distance
  double delta_symmetry = 0.0;  // symmetry readout at the reference distance
  std::vector<std::pair<double, double>> series;  // (d, fitted b_s)
  DipolarFit dipolar;
  DipolarFit dipolar_free_exponent;
};
std::vector<Fig5MaterialResult> run_fig5(const Fig5Options& opts = {});
std::vector<Fig5Material> fig5_default_materials();

}  // namespace nvac
