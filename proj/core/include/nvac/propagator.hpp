#pragma once

#include <array>
#include <vector>

#include "nvac/analytic.hpp"
#include "nvac/fields.hpp"
#include "nvac/sequence.hpp"

namespace nvac {

// RF0: frame rotating at the bare carrier; the MW phase modulation appears on
//      the pulse phases. RFmod: frame co-rotating with the modulated carrier;
//      the modulation rate is subtracted from the detuning. Both give the
//      same physical readout.
enum class Frame { rf0, rfmod };

struct SpinState {
  std::array<double, 3> bloch{0.0, 0.0, 1.0};
};

struct PropagatorOptions {
  Frame frame = Frame::rfmod;
  // Integrator step bound [s]. 0 selects an automatic step (drive period /
  // 2000, and min pulse duration / 40 for finite pulses). Explicit values
  // must satisfy max_step <= 1/(20*f_d) and <= min pulse duration / 20.
  double max_step = 0.0;
  // Convergence budget for derived quantities; also bounds the acceptable
  // Bloch-norm drift before the run is reported as failed.
  double tolerance = 1e-9;
  bool rwa = true;
  // Carrier angular frequency [rad/s], used only when rwa == false (small
  // toy carriers keep such validation runs tractable). 0 selects
  // zero_field_splitting - gamma_nv*b_dc.
  double carrier = 0.0;
  // Dense trajectory recording interval [s]; 0 records segment boundaries only.
  double record_dt = 0.0;
  // Simulate the readout pi/2 pulse. When false the trajectory ends on the
  // equator and contrast must be taken from the phase path.
  bool apply_final_half_pulse = true;
};

struct TrajectorySample {
  double t = 0.0;
  std::array<double, 3> bloch{};
};

struct SpinTrajectory {
  std::vector<TrajectorySample> states;
  // Sign-weighted free-precession azimuth accumulation [rad], continuously
  // unwrapped. Equals the sequence's sensing phase exactly for idealized
  // pulses; excludes in-pulse precession for finite pulses.
  double phi_nv = 0.0;
  double final_vz = 0.0;  // z projection after the readout pulse
  bool final_pulse_applied = false;
  double norm_drift = 0.0;  // | |bloch| - 1 | at the end of the run
};

struct HamiltonianCoeffs {
  double detuning = 0.0;  // sigma_z/2 coefficient [rad/s]
  double drive_x = 0.0;   // sigma_x/2 coefficient [rad/s]
  double drive_y = 0.0;   // sigma_y/2 coefficient [rad/s]
};

// Rotating-frame (RFmod) Hamiltonian coefficients between pulses:
//   detuning(t) = gamma*[ (b_d - b_d_mod)*cos(2*pi*f_d*t)
//                         + b_s*cos(2*pi*f_d*t - delta)
//                         - b_s_mod*cos(2*pi*f_d*t - delta_mod) ]
// With pulse != nullptr, adds the resonant transverse drive of magnitude
// pulse->rabi at the pulse's carrier phase.
HamiltonianCoeffs hamiltonian_rfmod(double t, const FieldConfig& cfg, const ModulationConfig& mod,
                                    const PulseEvent* pulse = nullptr);

// Propagates the Bloch vector from the m_s = 0 pole through the sequence
// under the piecewise time-dependent Hamiltonian, using a 4th-order
// commutator-free Magnus integrator built from exact axis-angle rotations
// (idealized pulses are applied as exact instantaneous rotations).
//
// Throws std::invalid_argument on option/sequence violations and
// std::runtime_error if the integration accuracy guard trips.
SpinTrajectory propagate(const PulseSequence& seq, const FieldConfig& cfg,
                         const ModulationConfig& mod, const PropagatorOptions& opts = {});

// Contrast from a completed trajectory. Uses the z projection when the final
// pi/2 pulse was simulated (the sequence's built-in readout phase then
// realizes C = c0 + c_star*cos(phi_nv + varphi)), the phase path otherwise.
// Both paths agree for idealized pulses.
double contrast_from_trajectory(const SpinTrajectory& traj, const ReadoutModel& readout);

const char* to_string(Frame frame);

}  // namespace nvac
