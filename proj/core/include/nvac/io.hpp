#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "nvac/curves.hpp"
#include "nvac/estimation.hpp"
#include "nvac/propagator.hpp"

namespace nvac {

// A fully-specified run: field + modulation + sequence + readout +
// propagator options, as parsed from a JSON config file. Deterministic:
// identical scenarios produce byte-identical outputs.
struct SequenceSpec {
  SequenceKind kind = SequenceKind::hahn;
  int n_pi = 1;
  double p_offset = 0.0;
  double rabi = 0.0;
  bool idealized = true;
  PulseTrainReference reference = PulseTrainReference::node;
};

struct Scenario {
  std::string name = "run";
  FieldConfig cfg;
  ModulationConfig mod;
  SequenceSpec sequence;
  ReadoutModel readout;
  PropagatorOptions prop;
  CurveMode mode = CurveMode::analytic;
};

// JSON round trips (parse -> serialize -> parse is identity).
nlohmann::json to_json(const FieldConfig&);
nlohmann::json to_json(const ModulationConfig&);
nlohmann::json to_json(const ReadoutModel&);
nlohmann::json to_json(const SequenceSpec&);
nlohmann::json to_json(const PropagatorOptions&);
nlohmann::json to_json(const Scenario&);
nlohmann::json to_json(const FitResult&);
nlohmann::json to_json(const DipolarFit&);

FieldConfig field_from_json(const nlohmann::json&);
ModulationConfig modulation_from_json(const nlohmann::json&);
ReadoutModel readout_from_json(const nlohmann::json&);
SequenceSpec sequence_from_json(const nlohmann::json&);
PropagatorOptions propagator_from_json(const nlohmann::json&);
Scenario scenario_from_json(const nlohmann::json&);

Scenario load_scenario(const std::filesystem::path& config_path);

// Curve CSV ("<param>,contrast", %.17g) plus a JSON sidecar carrying the
// generating configuration. read_curve accepts externally produced CSV in
// the same schema; the sidecar is optional if the caller supplies metadata.
void write_curve_csv(const std::filesystem::path& csv_path, const ContrastCurve& curve);
void write_curve_sidecar(const std::filesystem::path& json_path, const ContrastCurve& curve);
ContrastCurve read_curve(const std::filesystem::path& csv_path,
                         const std::filesystem::path& sidecar_path = {});

// Trajectory CSV: "t,bx,by,bz".
void write_trajectory_csv(const std::filesystem::path& csv_path, const SpinTrajectory& traj);

// Distance/amplitude pairs for the dipolar fit: "d,b_s".
std::vector<std::pair<double, double>> read_distance_series(const std::filesystem::path& csv_path);
void write_distance_series(const std::filesystem::path& csv_path,
                           std::span<const std::pair<double, double>> points);

// Canonical full-precision double formatting used by every CSV writer.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

SequenceKind sequence_kind_from_string(const std::string&);
PulseTrainReference reference_from_string(const std::string&);
CurveMode curve_mode_from_string(const std::string&);
SweepParameter sweep_parameter_from_string(const std::string&);
Frame frame_from_string(const std::string&);

}  // namespace nvac
