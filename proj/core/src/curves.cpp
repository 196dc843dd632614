#include "nvac/curves.hpp"

#include <stdexcept>

#include "nvac/parallel.hpp"

namespace nvac {

void SweepSpec::validate() const {
  if (count < 2) throw std::invalid_argument("sweep count must be >= 2");
  if (!(start < stop)) throw std::invalid_argument("sweep start must be < stop");
}

double SweepSpec::spacing() const {
  validate();
  return include_stop ? (stop - start) / (count - 1) : (stop - start) / count;
}

std::vector<double> SweepSpec::values() const {
  const double d = spacing();
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = start + d * i;
  return v;
}

SweepSpec make_p_sweep(int count) { return {SweepParameter::p_offset, 0.0, two_pi, count, false}; }

SweepSpec make_bs_mod_sweep(double f_d, int n_pi, int count) {
  return {SweepParameter::bs_mod, 0.0, bs_mod_period(f_d, n_pi), count, true};
}

namespace {

double evaluate_point(const CurveRequest& req, SweepParameter param, double value) {
  FieldConfig cfg = req.cfg;
  ModulationConfig mod = req.mod;
  double p = req.p_offset;
  if (param == SweepParameter::p_offset)
    p = value;
  else if (param == SweepParameter::bs_mod)
    mod.b_s_mod = value;
  else
    throw std::invalid_argument("magnetometry_curve sweeps p_offset or bs_mod");

  if (req.mode == CurveMode::analytic)
    return contrast_from_phase(phi_nv_analytic(cfg, mod, req.n_pi, p), req.readout);

  SequenceOptions seq_opts;
  seq_opts.reference = req.reference;
  seq_opts.varphi = req.readout.varphi;
  const bool idealized = (req.mode == CurveMode::numeric_ideal);
  const auto seq = build_dd_sequence(req.kind, req.n_pi, cfg, p, req.rabi, idealized, seq_opts);
  const auto traj = propagate(seq, cfg, mod, req.prop);
  return contrast_from_trajectory(traj, req.readout);
}

}  // namespace

ContrastCurve magnetometry_curve(const SweepSpec& sweep, const CurveRequest& req) {
  sweep.validate();
  req.cfg.validate();
  req.mod.validate();
  req.readout.validate();
  if (req.mode == CurveMode::numeric_finite && !(req.rabi > 0.0))
    throw std::invalid_argument("numeric_finite mode requires rabi > 0");

  ContrastCurve curve;
  curve.sweep_param = sweep.parameter;
  curve.params = sweep.values();
  curve.contrast.resize(curve.params.size());
  curve.cfg = req.cfg;
  curve.mod = req.mod;
  curve.readout = req.readout;
  curve.kind = req.kind;
  curve.n_pi = req.n_pi;
  curve.p_offset = req.p_offset;
  curve.rabi = req.rabi;
  curve.reference = req.reference;
  curve.mode = req.mode;

  if (req.mode == CurveMode::analytic) {
    for (std::size_t i = 0; i < curve.params.size(); ++i)
      curve.contrast[i] = evaluate_point(req, sweep.parameter, curve.params[i]);
  } else {
    parallel_for(curve.params.size(), [&](std::size_t i) {
      curve.contrast[i] = evaluate_point(req, sweep.parameter, curve.params[i]);
    });
  }
  return curve;
}

void ContrastCurve::validate() const {
  if (params.size() != contrast.size()) throw std::invalid_argument("curve arrays differ in size");
  if (params.size() < 2) throw std::invalid_argument("curve needs at least two samples");
  for (std::size_t i = 1; i < params.size(); ++i)
    if (!(params[i] > params[i - 1])) throw std::invalid_argument("curve params must be increasing");
}

const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::p_offset: return "p_offset";
    case SweepParameter::bs_mod: return "bs_mod";
    case SweepParameter::bd_over_omega: return "bd_over_omega";
    case SweepParameter::distance: return "distance";
  }
  return "?";
}

const char* to_string(CurveMode m) {
  switch (m) {
    case CurveMode::analytic: return "analytic";
    case CurveMode::numeric_ideal: return "numeric_ideal";
    case CurveMode::numeric_finite: return "numeric_finite";
  }
  return "?";
}

}  // namespace nvac
