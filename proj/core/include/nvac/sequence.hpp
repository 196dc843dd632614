#pragma once

#include <vector>

#include "nvac/constants.hpp"
#include "nvac/fields.hpp"

namespace nvac {

enum class SequenceKind { hahn, cpmg, xy8 };

// Where the pulse train sits at p = 0. The node reference places pulse
// centers at drive-field zero crossings, which is the convention under which
// the closed-form phase is proportional to cos(p) and conventional-DD pulse
// infidelity peaks at p = pi/2 and 3*pi/2. The antinode reference shifts the
// train a quarter drive period later.
enum class PulseTrainReference { node, antinode };

struct PulseEvent {
  double start = 0.0;             // [s]; center - duration/2
  double duration = 0.0;          // [s]; 0 flags an idealized instantaneous rotation
  double rabi = 0.0;              // angular Rabi strength Omega [rad/s]
  double nominal_rotation = 0.0;  // pi/2 or pi [rad]
  double phase = 0.0;             // MW carrier phase offset of this pulse [rad]

  double center() const { return start + 0.5 * duration; }
  double end() const { return start + duration; }
  bool is_pi() const { return nominal_rotation > 0.75 * pi; }
};

struct SequenceOptions {
  PulseTrainReference reference = PulseTrainReference::node;
  // Readout phase between the two pi/2 pulses as it appears in the contrast
  // model C = c0 + c*cos(phi_nv + varphi). The final pulse's carrier phase is
  // derived from it (see build_dd_sequence).
  double varphi = pi / 2.0;
};

struct PulseSequence {
  std::vector<PulseEvent> events;  // time-ordered; first/last are pi/2 pulses
  int n_pi = 0;                    // count of pi events
  double p_offset = 0.0;           // train phase offset w.r.t. drive nodes [rad]
  double tau = 0.0;                // drive period 1/f_d [s]
  double total_time = 0.0;         // between pi/2 pulse centers [s]
  bool idealized = false;
  PulseTrainReference reference = PulseTrainReference::node;
  double readout_varphi = pi / 2.0;
  // Sensing sign of each free evolution interval (n_pi + 1 entries,
  // alternating starting at +1); fixes the sign convention of phi_nv.
  std::vector<int> interval_signs;

  double start_time() const { return events.front().center(); }
  double end_time() const { return events.back().center(); }
  double min_pulse_duration() const;
  void validate() const;
};

// Builds a drive-synchronized DD sequence.
//
//   hahn: n_pi == 1; pulse centers at s, s + T/2, s + T with T = 1/f_d.
//   cpmg: pi pulses at total_time*(2k-1)/(2*n_pi), total_time = n_pi/f_d,
//         all pi pulses about y.
//   xy8:  cpmg timing with the x,y,x,y,y,x,y,x phase pattern; n_pi % 8 == 0.
//
// The train is shifted by p/(2*pi*f_d) from the reference point; under the
// node reference s = (p - pi/2)/(2*pi*f_d), so p = pi/2 centers the pulses on
// drive antinodes. Pulse centers (not edges) realize the nominal timing and
// are identical for idealized and finite-duration builds. The first pi/2
// pulse is about x; the final pi/2 phase is chosen so that the z readout
// equals cos(phi_nv + varphi).
//
// Throws std::invalid_argument on bad arguments or when finite pulse
// durations would overlap (rabi too small for f_d).
PulseSequence build_dd_sequence(SequenceKind kind, int n_pi, const FieldConfig& cfg, double p,
                                double rabi, bool idealized, const SequenceOptions& opts = {});

const char* to_string(SequenceKind kind);
const char* to_string(PulseTrainReference ref);

}  // namespace nvac
