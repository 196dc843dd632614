#pragma once

namespace nvac {

// Static bias plus the two synchronous AC fields along the sensing axis:
//   B_ac(t) = b_d*cos(2*pi*f_d*t) + b_s*cos(2*pi*f_d*t - delta)
struct FieldConfig {
  double b_dc = 0.0;   // static bias [T]
  double b_d = 0.0;    // AC drive amplitude [T]
  double b_s = 0.0;    // AC response amplitude [T]
  double f_d = 1.0;    // drive frequency [Hz]
  double delta = 0.0;  // response phase delay [rad]; canonical range [0, 2pi)

  // Throws std::invalid_argument on b_d < 0, b_s < 0, f_d <= 0 or
  // non-finite members.
  void validate() const;
};

// Additive MW carrier phase modulation
//   theta(t) = gamma*b_d_mod*sin(2*pi*f_d*t)/(2*pi*f_d)
//            + gamma*b_s_mod*sin(2*pi*f_d*t - delta_mod)/(2*pi*f_d).
// b_d_mod = b_s_mod = 0 recovers conventional DD. Both amplitudes carry the
// gamma factor so that matching a modulation amplitude to a physical field
// amplitude cancels that field's phase contribution exactly.
struct ModulationConfig {
  double b_d_mod = 0.0;    // drive-matched modulation amplitude [T]
  double b_s_mod = 0.0;    // secondary modulation amplitude [T]
  double delta_mod = 0.0;  // phase of the secondary term [rad]

  void validate() const;
};

// Instantaneous total AC field [T] at time t.
double total_ac_field(double t, const FieldConfig& cfg);

// MW carrier phase offset theta(t) [rad] beyond the resonant carrier.
double mw_phase_modulation(double t, const FieldConfig& cfg, const ModulationConfig& mod);

// d(theta)/dt [rad/s]; the instantaneous carrier-frequency shift of the
// modulated rotating frame.
double mw_phase_modulation_rate(double t, const FieldConfig& cfg, const ModulationConfig& mod);

}  // namespace nvac
