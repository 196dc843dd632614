#include "nvac/sequence.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nvac/angles.hpp"

namespace nvac {

namespace {

// Carrier phases of the internal pi pulses.
std::vector<double> pi_pulse_phases(SequenceKind kind, int n_pi) {
  std::vector<double> phases(static_cast<std::size_t>(n_pi), pi / 2.0);
  if (kind == SequenceKind::xy8) {
    static constexpr double pattern[8] = {0.0,      pi / 2.0, 0.0,      pi / 2.0,
                                          pi / 2.0, 0.0,      pi / 2.0, 0.0};
    for (int k = 0; k < n_pi; ++k) phases[static_cast<std::size_t>(k)] = pattern[k % 8];
  }
  return phases;
}

// Final pi/2 carrier phase realizing z readout = cos(phi_nv + varphi), given
// the first pulse phase and the pi phases. With right-handed Bloch rotations
// the equatorial azimuth maps through the sequence as
//   alpha_end = (-1)^N*(alpha_0 + phi_nv') + 2*sum_k (-1)^(N-k)*phase_k
// (phi_nv' = (-1)^N * signed sensing phase), and vz = sin(alpha_end - phase_last).
double readout_pulse_phase(double first_phase, const std::vector<double>& pi_phases,
                           double varphi) {
  const int n = static_cast<int>(pi_phases.size());
  double s = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double sign = ((n - k) % 2 == 0) ? 1.0 : -1.0;
    s += sign * pi_phases[static_cast<std::size_t>(k - 1)];
  }
  const bool odd = (n % 2 == 1);
  const double phase = odd ? (varphi - first_phase + 2.0 * s)
                           : (first_phase + 2.0 * s + pi - varphi);
  return wrap_to_2pi(phase);
}

}  // namespace

double PulseSequence::min_pulse_duration() const {
  double m = 0.0;
  bool found = false;
  for (const auto& ev : events) {
    if (ev.duration <= 0.0) continue;
    m = found ? std::min(m, ev.duration) : ev.duration;
    found = true;
  }
  return found ? m : 0.0;
}

void PulseSequence::validate() const {
  if (events.size() < 3) throw std::invalid_argument("sequence needs at least pi/2, pi, pi/2");
  if (events.front().is_pi() || events.back().is_pi())
    throw std::invalid_argument("first and last events must be pi/2 pulses");
  int pis = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].is_pi()) ++pis;
    if (i > 0 && events[i].start < events[i - 1].end())
      throw std::invalid_argument("pulse events overlap");
  }
  if (pis != n_pi) throw std::invalid_argument("n_pi does not match the count of pi events");
  if (interval_signs.size() != static_cast<std::size_t>(n_pi) + 1)
    throw std::invalid_argument("interval_signs must have n_pi + 1 entries");
}

PulseSequence build_dd_sequence(SequenceKind kind, int n_pi, const FieldConfig& cfg, double p,
                                double rabi, bool idealized, const SequenceOptions& opts) {
  cfg.validate();
  if (n_pi < 1) throw std::invalid_argument("n_pi must be >= 1");
  if (kind == SequenceKind::hahn && n_pi != 1)
    throw std::invalid_argument("hahn sequence has n_pi = 1");
  if (kind == SequenceKind::xy8 && n_pi % 8 != 0)
    throw std::invalid_argument("xy8 requires n_pi to be a multiple of 8");
  if (!idealized && !(rabi > 0.0)) throw std::invalid_argument("finite pulses require rabi > 0");
  if (!std::isfinite(p) || !std::isfinite(rabi)) throw std::invalid_argument("non-finite argument");

  const double period = 1.0 / cfg.f_d;
  const double total = static_cast<double>(n_pi) * period;
  // Node reference: pulse centers sit at drive zero crossings at p = 0 and
  // move to antinodes at p = pi/2.
  const double reference_shift = (opts.reference == PulseTrainReference::node) ? -0.25 * period : 0.0;
  const double start = reference_shift + p / (two_pi * cfg.f_d);

  std::vector<double> centers;
  centers.reserve(static_cast<std::size_t>(n_pi) + 2);
  centers.push_back(start);
  for (int k = 1; k <= n_pi; ++k)
    centers.push_back(start + total * (2.0 * k - 1.0) / (2.0 * n_pi));
  centers.push_back(start + total);

  const auto phases = pi_pulse_phases(kind, n_pi);
  const double first_phase = 0.0;
  const double last_phase = readout_pulse_phase(first_phase, phases, opts.varphi);

  PulseSequence seq;
  seq.n_pi = n_pi;
  seq.p_offset = p;
  seq.tau = period;
  seq.total_time = total;
  seq.idealized = idealized;
  seq.reference = opts.reference;
  seq.readout_varphi = opts.varphi;

  const double dur_half = idealized ? 0.0 : (pi / 2.0) / rabi;
  const double dur_pi = idealized ? 0.0 : pi / rabi;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    PulseEvent ev;
    const bool is_pi_pulse = (i > 0 && i + 1 < centers.size());
    ev.nominal_rotation = is_pi_pulse ? pi : pi / 2.0;
    ev.duration = is_pi_pulse ? dur_pi : dur_half;
    ev.start = centers[i] - 0.5 * ev.duration;
    ev.rabi = rabi;
    if (i == 0)
      ev.phase = first_phase;
    else if (i + 1 == centers.size())
      ev.phase = last_phase;
    else
      ev.phase = phases[i - 1];
    seq.events.push_back(ev);
  }

  if (!idealized) {
    for (std::size_t i = 1; i < seq.events.size(); ++i) {
      if (seq.events[i].start < seq.events[i - 1].end())
        throw std::invalid_argument(
            "finite pulse durations overlap: rabi too small for f_d (pi duration " +
            std::to_string(dur_pi) + " s vs pulse spacing " +
            std::to_string(seq.events[i].center() - seq.events[i - 1].center()) + " s)");
    }
  }

  seq.interval_signs.resize(static_cast<std::size_t>(n_pi) + 1);
  for (int i = 0; i <= n_pi; ++i) seq.interval_signs[static_cast<std::size_t>(i)] = (i % 2 == 0) ? 1 : -1;

  seq.validate();
  return seq;
}

const char* to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::hahn: return "hahn";
    case SequenceKind::cpmg: return "cpmg";
    case SequenceKind::xy8: return "xy8";
  }
  return "?";
}

const char* to_string(PulseTrainReference ref) {
  return ref == PulseTrainReference::node ? "node" : "antinode";
}

}  // namespace nvac
