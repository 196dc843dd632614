#pragma once

#include <string>
#include <vector>

#include "nvac/analytic.hpp"
#include "nvac/propagator.hpp"
#include "nvac/sequence.hpp"

namespace nvac {

enum class SweepParameter { p_offset, bs_mod, bd_over_omega, distance };
enum class CurveMode { analytic, numeric_ideal, numeric_finite };

struct SweepSpec {
  SweepParameter parameter = SweepParameter::p_offset;
  double start = 0.0;
  double stop = two_pi;
  int count = 64;
  // Half-open grids (stop excluded) are the natural sampling for periodic
  // p sweeps; closed grids for amplitude/distance sweeps.
  bool include_stop = false;

  std::vector<double> values() const;
  double spacing() const;
  void validate() const;
};

SweepSpec make_p_sweep(int count);                          // [0, 2*pi), half open
SweepSpec make_bs_mod_sweep(double f_d, int n_pi, int count);  // [0, period], closed

// Everything needed to evaluate one contrast point.
struct CurveRequest {
  FieldConfig cfg;
  ModulationConfig mod;
  ReadoutModel readout;
  SequenceKind kind = SequenceKind::hahn;
  int n_pi = 1;
  double p_offset = 0.0;  // used when the sweep parameter is not p
  double rabi = 0.0;      // required for numeric_finite
  PulseTrainReference reference = PulseTrainReference::node;
  CurveMode mode = CurveMode::analytic;
  PropagatorOptions prop;
};

struct ContrastCurve {
  SweepParameter sweep_param = SweepParameter::p_offset;
  std::vector<double> params;    // sorted sweep values
  std::vector<double> contrast;  // same length
  // Generating configuration, carried for fitting and serialization.
  FieldConfig cfg;
  ModulationConfig mod;
  ReadoutModel readout;
  SequenceKind kind = SequenceKind::hahn;
  int n_pi = 1;
  double p_offset = 0.0;
  double rabi = 0.0;
  PulseTrainReference reference = PulseTrainReference::node;
  CurveMode mode = CurveMode::analytic;

  void validate() const;
};

// Sweeps p_offset or bs_mod and evaluates contrast per point. Analytic mode
// uses the closed-form phase; numeric modes build and propagate a sequence
// per point (fanned out over the worker pool).
ContrastCurve magnetometry_curve(const SweepSpec& sweep, const CurveRequest& req);

const char* to_string(SweepParameter p);
const char* to_string(CurveMode m);

}  // namespace nvac
