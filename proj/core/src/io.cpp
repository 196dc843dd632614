#include "nvac/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace nvac {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- enum parsing -----------------------------------------------------------

SequenceKind sequence_kind_from_string(const std::string& s) {
  if (s == "hahn") return SequenceKind::hahn;
  if (s == "cpmg") return SequenceKind::cpmg;
  if (s == "xy8") return SequenceKind::xy8;
  throw std::invalid_argument("unknown sequence kind: " + s);
}

PulseTrainReference reference_from_string(const std::string& s) {
  if (s == "node") return PulseTrainReference::node;
  if (s == "antinode") return PulseTrainReference::antinode;
  throw std::invalid_argument("unknown pulse train reference: " + s);
}

CurveMode curve_mode_from_string(const std::string& s) {
  if (s == "analytic") return CurveMode::analytic;
  if (s == "numeric_ideal") return CurveMode::numeric_ideal;
  if (s == "numeric_finite") return CurveMode::numeric_finite;
  throw std::invalid_argument("unknown curve mode: " + s);
}

SweepParameter sweep_parameter_from_string(const std::string& s) {
  if (s == "p_offset") return SweepParameter::p_offset;
  if (s == "bs_mod") return SweepParameter::bs_mod;
  if (s == "bd_over_omega") return SweepParameter::bd_over_omega;
  if (s == "distance") return SweepParameter::distance;
  throw std::invalid_argument("unknown sweep parameter: " + s);
}

Frame frame_from_string(const std::string& s) {
  if (s == "rf0") return Frame::rf0;
  if (s == "rfmod") return Frame::rfmod;
  throw std::invalid_argument("unknown frame: " + s);
}

// --- JSON round trips -------------------------------------------------------

json to_json(const FieldConfig& c) {
  return {{"b_dc", c.b_dc}, {"b_d", c.b_d}, {"b_s", c.b_s}, {"f_d", c.f_d}, {"delta", c.delta}};
}

json to_json(const ModulationConfig& m) {
  return {{"b_d_mod", m.b_d_mod}, {"b_s_mod", m.b_s_mod}, {"delta_mod", m.delta_mod}};
}

json to_json(const ReadoutModel& r) {
  return {{"c0", r.c0}, {"c_star", r.c_star}, {"varphi", r.varphi}};
}

json to_json(const SequenceSpec& s) {
  return {{"kind", to_string(s.kind)},     {"n_pi", s.n_pi},
          {"p_offset", s.p_offset},        {"rabi", s.rabi},
          {"idealized", s.idealized},      {"reference", to_string(s.reference)}};
}

json to_json(const PropagatorOptions& o) {
  return {{"frame", to_string(o.frame)},   {"max_step", o.max_step},
          {"tolerance", o.tolerance},      {"rwa", o.rwa},
          {"carrier", o.carrier},          {"record_dt", o.record_dt},
          {"apply_final_half_pulse", o.apply_final_half_pulse}};
}

json to_json(const Scenario& s) {
  return {{"name", s.name},
          {"field", to_json(s.cfg)},
          {"modulation", to_json(s.mod)},
          {"sequence", to_json(s.sequence)},
          {"readout", to_json(s.readout)},
          {"propagator", to_json(s.prop)},
          {"mode", to_string(s.mode)}};
}

json to_json(const FitResult& f) {
  json cov = json::array();
  for (const auto& row : f.covariance) cov.push_back({row[0], row[1], row[2]});
  return {{"b_s_hat", f.b_s_hat},
          {"delta_hat", f.delta_hat},
          {"leakage_hat", f.leakage_hat},
          {"residual_norm", f.residual_norm},
          {"covariance", cov},
          {"converged", f.converged},
          {"delta_unidentifiable", f.delta_unidentifiable},
          {"iterations", f.iterations}};
}

json to_json(const DipolarFit& f) {
  return {{"amplitude", f.amplitude},       {"d0_hat", f.d0_hat},
          {"exponent", f.exponent},         {"residual_norm", f.residual_norm},
          {"converged", f.converged},       {"non_monotonic_warning", f.non_monotonic_warning}};
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

}  // namespace

FieldConfig field_from_json(const json& j) {
  FieldConfig c;
  c.b_dc = get_or(j, "b_dc", c.b_dc);
  c.b_d = get_or(j, "b_d", c.b_d);
  c.b_s = get_or(j, "b_s", c.b_s);
  c.f_d = get_or(j, "f_d", c.f_d);
  c.delta = get_or(j, "delta", c.delta);
  c.validate();
  return c;
}

ModulationConfig modulation_from_json(const json& j) {
  ModulationConfig m;
  m.b_d_mod = get_or(j, "b_d_mod", m.b_d_mod);
  m.b_s_mod = get_or(j, "b_s_mod", m.b_s_mod);
  m.delta_mod = get_or(j, "delta_mod", m.delta_mod);
  m.validate();
  return m;
}

ReadoutModel readout_from_json(const json& j) {
  ReadoutModel r;
  r.c0 = get_or(j, "c0", r.c0);
  r.c_star = get_or(j, "c_star", r.c_star);
  r.varphi = get_or(j, "varphi", r.varphi);
  r.validate();
  return r;
}

SequenceSpec sequence_from_json(const json& j) {
  SequenceSpec s;
  s.kind = sequence_kind_from_string(get_or<std::string>(j, "kind", "hahn"));
  s.n_pi = get_or(j, "n_pi", s.n_pi);
  s.p_offset = get_or(j, "p_offset", s.p_offset);
  s.rabi = get_or(j, "rabi", s.rabi);
  s.idealized = get_or(j, "idealized", s.idealized);
  s.reference = reference_from_string(get_or<std::string>(j, "reference", "node"));
  return s;
}

PropagatorOptions propagator_from_json(const json& j) {
  PropagatorOptions o;
  o.frame = frame_from_string(get_or<std::string>(j, "frame", "rfmod"));
  o.max_step = get_or(j, "max_step", o.max_step);
  o.tolerance = get_or(j, "tolerance", o.tolerance);
  o.rwa = get_or(j, "rwa", o.rwa);
  o.carrier = get_or(j, "carrier", o.carrier);
  o.record_dt = get_or(j, "record_dt", o.record_dt);
  o.apply_final_half_pulse = get_or(j, "apply_final_half_pulse", o.apply_final_half_pulse);
  return o;
}

Scenario scenario_from_json(const json& j) {
  Scenario s;
  s.name = get_or<std::string>(j, "name", s.name);
  if (j.contains("field")) s.cfg = field_from_json(j.at("field"));
  if (j.contains("modulation")) s.mod = modulation_from_json(j.at("modulation"));
  if (j.contains("sequence")) s.sequence = sequence_from_json(j.at("sequence"));
  if (j.contains("readout")) s.readout = readout_from_json(j.at("readout"));
  if (j.contains("propagator")) s.prop = propagator_from_json(j.at("propagator"));
  s.mode = curve_mode_from_string(get_or<std::string>(j, "mode", "analytic"));
  return s;
}

Scenario load_scenario(const std::filesystem::path& config_path) {
  return scenario_from_json(json::parse(read_text_file(config_path)));
}

// --- CSV --------------------------------------------------------------------

void write_curve_csv(const std::filesystem::path& csv_path, const ContrastCurve& curve) {
  curve.validate();
  std::string out;
  out += to_string(curve.sweep_param);
  out += ",contrast\n";
  for (std::size_t i = 0; i < curve.params.size(); ++i) {
    out += format_double(curve.params[i]);
    out += ',';
    out += format_double(curve.contrast[i]);
    out += '\n';
  }
  write_text_file(csv_path, out);
}

void write_curve_sidecar(const std::filesystem::path& json_path, const ContrastCurve& curve) {
  json j = {{"sweep_param", to_string(curve.sweep_param)},
            {"field", to_json(curve.cfg)},
            {"modulation", to_json(curve.mod)},
            {"readout", to_json(curve.readout)},
            {"kind", to_string(curve.kind)},
            {"n_pi", curve.n_pi},
            {"p_offset", curve.p_offset},
            {"rabi", curve.rabi},
            {"reference", to_string(curve.reference)},
            {"mode", to_string(curve.mode)}};
  write_text_file(json_path, j.dump(2) + "\n");
}

ContrastCurve read_curve(const std::filesystem::path& csv_path,
                         const std::filesystem::path& sidecar_path) {
  ContrastCurve curve;
  std::istringstream in(read_text_file(csv_path));
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty curve CSV: " + csv_path.string());
  const auto comma = line.find(',');
  if (comma == std::string::npos) throw std::runtime_error("malformed curve header");
  std::string param_name = line.substr(0, comma);
  if (!param_name.empty() && param_name.back() == '\r') param_name.pop_back();
  curve.sweep_param = sweep_parameter_from_string(param_name);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto pos = line.find(',');
    if (pos == std::string::npos) throw std::runtime_error("malformed curve row: " + line);
    curve.params.push_back(std::stod(line.substr(0, pos)));
    curve.contrast.push_back(std::stod(line.substr(pos + 1)));
  }

  if (!sidecar_path.empty()) {
    const json j = json::parse(read_text_file(sidecar_path));
    if (j.contains("field")) curve.cfg = field_from_json(j.at("field"));
    if (j.contains("modulation")) curve.mod = modulation_from_json(j.at("modulation"));
    if (j.contains("readout")) curve.readout = readout_from_json(j.at("readout"));
    if (j.contains("kind"))
      curve.kind = sequence_kind_from_string(j.at("kind").get<std::string>());
    curve.n_pi = get_or(j, "n_pi", curve.n_pi);
    curve.p_offset = get_or(j, "p_offset", curve.p_offset);
    curve.rabi = get_or(j, "rabi", curve.rabi);
    if (j.contains("reference"))
      curve.reference = reference_from_string(j.at("reference").get<std::string>());
    if (j.contains("mode")) curve.mode = curve_mode_from_string(j.at("mode").get<std::string>());
  }
  curve.validate();
  return curve;
}

void write_trajectory_csv(const std::filesystem::path& csv_path, const SpinTrajectory& traj) {
  std::string out = "t,bx,by,bz\n";
  for (const auto& s : traj.states) {
    out += format_double(s.t);
    out += ',';
    out += format_double(s.bloch[0]);
    out += ',';
    out += format_double(s.bloch[1]);
    out += ',';
    out += format_double(s.bloch[2]);
    out += '\n';
  }
  write_text_file(csv_path, out);
}

std::vector<std::pair<double, double>> read_distance_series(const std::filesystem::path& csv_path) {
  std::istringstream in(read_text_file(csv_path));
  std::string line;
  std::vector<std::pair<double, double>> pts;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto pos = line.find(',');
    if (pos == std::string::npos) throw std::runtime_error("malformed distance row: " + line);
    if (first) {
      first = false;
      // Optional header.
      if (line.find_first_not_of("0123456789.eE+-, \r") != std::string::npos) continue;
    }
    pts.emplace_back(std::stod(line.substr(0, pos)), std::stod(line.substr(pos + 1)));
  }
  return pts;
}

void write_distance_series(const std::filesystem::path& csv_path,
                           std::span<const std::pair<double, double>> points) {
  std::string out = "d,b_s\n";
  for (const auto& [d, b] : points) {
    out += format_double(d);
    out += ',';
    out += format_double(b);
    out += '\n';
  }
  write_text_file(csv_path, out);
}

}  // namespace nvac
