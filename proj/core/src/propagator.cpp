#include "nvac/propagator.hpp"

#include <cmath>
#include <stdexcept>

#include "nvac/angles.hpp"
#include "nvac/constants.hpp"

namespace nvac {

namespace {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

// Right-handed rotation of v about the axis-angle vector u (angle = |u|).
std::array<double, 3> rotate(const std::array<double, 3>& v, const Vec3& u) {
  const double angle = std::sqrt(u.x * u.x + u.y * u.y + u.z * u.z);
  if (angle < 1e-300) return v;
  const double nx = u.x / angle, ny = u.y / angle, nz = u.z / angle;
  const double c = std::cos(angle), s = std::sin(angle);
  const double dot = nx * v[0] + ny * v[1] + nz * v[2];
  const double cx = ny * v[2] - nz * v[1];
  const double cy = nz * v[0] - nx * v[2];
  const double cz = nx * v[1] - ny * v[0];
  return {v[0] * c + cx * s + nx * dot * (1.0 - c),
          v[1] * c + cy * s + ny * dot * (1.0 - c),
          v[2] * c + cz * s + nz * dot * (1.0 - c)};
}

std::array<double, 3> rotate_about_equatorial_axis(const std::array<double, 3>& v, double phase,
                                                   double angle) {
  return rotate(v, Vec3{angle * std::cos(phase), angle * std::sin(phase), 0.0});
}

// Angular-velocity vector (drive_x, drive_y, detuning) of the piecewise
// Hamiltonian H = detuning*sz/2 + drive_x*sx/2 + drive_y*sy/2.
class HamiltonianModel {
 public:
  HamiltonianModel(const FieldConfig& cfg, const ModulationConfig& mod,
                   const PropagatorOptions& opts)
      : cfg_(cfg), mod_(mod), frame_(opts.frame), rwa_(opts.rwa) {
    carrier_ = opts.carrier > 0.0 ? opts.carrier : zero_field_splitting - gamma_nv * cfg.b_dc;
  }

  Vec3 eval(double t, const PulseEvent* pulse) const {
    Vec3 h;
    const double detuning_rf0 = gamma_nv * total_ac_field(t, cfg_);
    if (frame_ == Frame::rfmod) {
      h.z = detuning_rf0 - mw_phase_modulation_rate(t, cfg_, mod_);
      if (pulse) {
        h.x = pulse->rabi * std::cos(pulse->phase);
        h.y = pulse->rabi * std::sin(pulse->phase);
      }
    } else {
      h.z = detuning_rf0;
      if (pulse) {
        const double phase = pulse->phase + mw_phase_modulation(t, cfg_, mod_);
        h.x = pulse->rabi * std::cos(phase);
        h.y = pulse->rabi * std::sin(phase);
        if (!rwa_) {
          const double counter = 2.0 * carrier_ * t + phase;
          h.x += pulse->rabi * std::cos(counter);
          h.y -= pulse->rabi * std::sin(counter);
        }
      }
    }
    return h;
  }

  // Effective pulse phase for an instantaneous rotation at time t.
  double ideal_pulse_phase(const PulseEvent& ev, double t) const {
    if (frame_ == Frame::rfmod) return ev.phase;
    return ev.phase + mw_phase_modulation(t, cfg_, mod_);
  }

  double carrier() const { return carrier_; }

 private:
  FieldConfig cfg_;
  ModulationConfig mod_;
  Frame frame_;
  bool rwa_;
  double carrier_ = 0.0;
};

// Gauss-Legendre nodes of the 4th-order commutator-free Magnus step.
constexpr double kCfNodeLo = 0.5 - 0.28867513459481287;  // 1/2 - sqrt(3)/6
constexpr double kCfNodeHi = 0.5 + 0.28867513459481287;

}  // namespace

HamiltonianCoeffs hamiltonian_rfmod(double t, const FieldConfig& cfg, const ModulationConfig& mod,
                                    const PulseEvent* pulse) {
  HamiltonianCoeffs out;
  out.detuning = gamma_nv * total_ac_field(t, cfg) - mw_phase_modulation_rate(t, cfg, mod);
  if (pulse) {
    out.drive_x = pulse->rabi * std::cos(pulse->phase);
    out.drive_y = pulse->rabi * std::sin(pulse->phase);
  }
  return out;
}

namespace {

class Integrator {
 public:
  Integrator(const HamiltonianModel& model, double max_step)
      : model_(model), max_step_(max_step) {}

  // Advances v over [t0, t1]; on_step is called after each step with the
  // current state (used for azimuth tracking and recording).
  template <typename F>
  void advance(std::array<double, 3>& v, double t0, double t1, const PulseEvent* pulse,
               F&& on_step) const {
    static constexpr double g_big = (3.0 + 2.0 * 1.7320508075688772) / 12.0;
    static constexpr double g_small = (3.0 - 2.0 * 1.7320508075688772) / 12.0;
    const double span = t1 - t0;
    if (span <= 0.0) return;
    const int n = std::max(1, static_cast<int>(std::ceil(span / max_step_)));
    const double h = span / n;
    for (int i = 0; i < n; ++i) {
      const double ta = t0 + i * h;
      const Vec3 h1 = model_.eval(ta + kCfNodeLo * h, pulse);
      const Vec3 h2 = model_.eval(ta + kCfNodeHi * h, pulse);
      const Vec3 ua{h * (g_big * h1.x + g_small * h2.x), h * (g_big * h1.y + g_small * h2.y),
                    h * (g_big * h1.z + g_small * h2.z)};
      const Vec3 ub{h * (g_small * h1.x + g_big * h2.x), h * (g_small * h1.y + g_big * h2.y),
                    h * (g_small * h1.z + g_big * h2.z)};
      v = rotate(v, ua);
      v = rotate(v, ub);
      on_step(ta + h, v);
    }
  }

 private:
  const HamiltonianModel& model_;
  double max_step_;
};

class AzimuthTracker {
 public:
  void reset(const std::array<double, 3>& v) {
    prev_ = azimuth_or(v, 0.0);
    accum_ = 0.0;
  }
  void update(const std::array<double, 3>& v) {
    const double az = azimuth_or(v, prev_);
    accum_ += wrap_to_pi(az - prev_);
    prev_ = az;
  }
  double accumulated() const { return accum_; }

 private:
  static double azimuth_or(const std::array<double, 3>& v, double fallback) {
    if (v[0] * v[0] + v[1] * v[1] < 1e-24) return fallback;
    return std::atan2(v[1], v[0]);
  }
  double prev_ = 0.0;
  double accum_ = 0.0;
};

double auto_max_step(const PulseSequence& seq, const FieldConfig& cfg,
                     const PropagatorOptions& opts, const HamiltonianModel& model) {
  double step = 1.0 / (2000.0 * cfg.f_d);
  const double min_dur = seq.min_pulse_duration();
  if (min_dur > 0.0) step = std::min(step, min_dur / 40.0);
  if (!opts.rwa) step = std::min(step, pi / (40.0 * model.carrier()));
  return step;
}

}  // namespace

SpinTrajectory propagate(const PulseSequence& seq, const FieldConfig& cfg,
                         const ModulationConfig& mod, const PropagatorOptions& opts) {
  seq.validate();
  cfg.validate();
  mod.validate();
  if (!opts.rwa && opts.frame == Frame::rfmod)
    throw std::invalid_argument("rwa = false is supported in the rf0 frame only");

  const HamiltonianModel model(cfg, mod, opts);
  const double min_dur = seq.min_pulse_duration();
  double max_step = opts.max_step;
  if (max_step > 0.0) {
    if (max_step > 1.0 / (20.0 * cfg.f_d))
      throw std::invalid_argument("max_step must be <= 1/(20*f_d)");
    if (min_dur > 0.0 && max_step > min_dur / 20.0)
      throw std::invalid_argument("max_step must be <= min pulse duration / 20");
  } else {
    max_step = auto_max_step(seq, cfg, opts, model);
  }
  const Integrator integrator(model, max_step);

  SpinTrajectory traj;
  std::array<double, 3> v{0.0, 0.0, 1.0};
  AzimuthTracker az;

  double record_clock = 0.0;
  auto record = [&](double t, const std::array<double, 3>& state) {
    traj.states.push_back({t, state});
    record_clock = t;
  };
  auto maybe_record = [&](double t, const std::array<double, 3>& state) {
    if (opts.record_dt > 0.0 && t - record_clock >= opts.record_dt * (1.0 - 1e-12))
      record(t, state);
  };

  const auto& events = seq.events;
  const std::size_t n_events = events.size();
  const std::size_t last = n_events - 1;
  record(seq.idealized ? events.front().center() : events.front().start, v);

  double phi = 0.0;
  for (std::size_t i = 0; i < n_events; ++i) {
    const PulseEvent& ev = events[i];
    const bool is_last = (i == last);
    if (is_last && !opts.apply_final_half_pulse) break;

    // Pulse i.
    if (seq.idealized || ev.duration <= 0.0) {
      v = rotate_about_equatorial_axis(v, model.ideal_pulse_phase(ev, ev.center()),
                                       ev.nominal_rotation);
      record(ev.center(), v);
    } else {
      integrator.advance(v, ev.start, ev.end, &ev,
                         [&](double t, const std::array<double, 3>& s) { maybe_record(t, s); });
      record(ev.end, v);
    }
    if (is_last) break;

    // Free interval between pulse i and pulse i+1.
    const double t0 = seq.idealized ? ev.center() : ev.end;
    const double t1 = seq.idealized ? events[i + 1].center() : events[i + 1].start;
    az.reset(v);
    integrator.advance(v, t0, t1, nullptr, [&](double t, const std::array<double, 3>& s) {
      az.update(s);
      maybe_record(t, s);
    });
    phi += seq.interval_signs[i] * az.accumulated();
    record(t1, v);
  }

  traj.phi_nv = phi;
  traj.final_pulse_applied = opts.apply_final_half_pulse;
  traj.final_vz = v[2];
  traj.norm_drift = std::abs(std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) - 1.0);

  const double drift_budget = seq.idealized ? 1e-9 : 1e-6;
  if (traj.norm_drift > drift_budget)
    throw std::runtime_error("propagate: Bloch-norm drift " + std::to_string(traj.norm_drift) +
                             " exceeds budget; reduce max_step");
  return traj;
}

double contrast_from_trajectory(const SpinTrajectory& traj, const ReadoutModel& readout) {
  readout.validate();
  if (traj.final_pulse_applied) return readout.c0 + readout.c_star * traj.final_vz;
  return contrast_from_phase(traj.phi_nv, readout);
}

const char* to_string(Frame frame) { return frame == Frame::rf0 ? "rf0" : "rfmod"; }

}  // namespace nvac
