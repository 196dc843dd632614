#pragma once

#include "nvac/constants.hpp"
#include "nvac/fields.hpp"

namespace nvac {

// Maps accumulated spin phase to photoluminescence contrast:
//   C = c0 + c_star*cos(phi + varphi)
struct ReadoutModel {
  double c0 = 0.0;          // background contrast
  double c_star = 1.0;      // spin-dependent contrast amplitude, >= 0
  double varphi = pi / 2.0; // readout phase; pi/2 gives C - c0 = -c_star*sin(phi)

  void validate() const;
};

// Phase-to-field slope of the synchronized echo train, 2*gamma*n_pi/(pi*f_d)
// [rad/T].
double phi_per_tesla(double f_d, int n_pi);

// Closed-form accumulated phase of the drive-synchronized sequence:
//   phi = (2*gamma*n_pi/(pi*f_d)) * [ (b_d - b_d_mod)*cos(p)
//                                     + b_s*cos(p - delta)
//                                     - b_s_mod*cos(p - delta_mod) ]
// Exact for the Hahn echo (n_pi = 1); linear in n_pi by construction.
double phi_nv_analytic(const FieldConfig& cfg, const ModulationConfig& mod, int n_pi, double p);

double contrast_from_phase(double phi, const ReadoutModel& readout);

// Secondary-modulation amplitude increment that wraps the accumulated phase
// by 2*pi: one full period of the magnetometry curve swept in b_s_mod.
double bs_mod_period(double f_d, int n_pi);

}  // namespace nvac
