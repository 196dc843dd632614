#include "nvac/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "nvac/constants.hpp"

namespace nvac {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

}  // namespace

void FieldConfig::validate() const {
  require_finite(b_dc, "b_dc");
  require_finite(b_d, "b_d");
  require_finite(b_s, "b_s");
  require_finite(f_d, "f_d");
  require_finite(delta, "delta");
  if (b_d < 0.0) throw std::invalid_argument("b_d must be >= 0");
  if (b_s < 0.0) throw std::invalid_argument("b_s must be >= 0");
  if (f_d <= 0.0) throw std::invalid_argument("f_d must be > 0");
}

void ModulationConfig::validate() const {
  require_finite(b_d_mod, "b_d_mod");
  require_finite(b_s_mod, "b_s_mod");
  require_finite(delta_mod, "delta_mod");
  if (b_d_mod < 0.0) throw std::invalid_argument("b_d_mod must be >= 0");
  if (b_s_mod < 0.0) throw std::invalid_argument("b_s_mod must be >= 0");
}

double total_ac_field(double t, const FieldConfig& cfg) {
  const double wt = two_pi * cfg.f_d * t;
  return cfg.b_d * std::cos(wt) + cfg.b_s * std::cos(wt - cfg.delta);
}

double mw_phase_modulation(double t, const FieldConfig& cfg, const ModulationConfig& mod) {
  const double w = two_pi * cfg.f_d;
  const double wt = w * t;
  return gamma_nv * (mod.b_d_mod * std::sin(wt) + mod.b_s_mod * std::sin(wt - mod.delta_mod)) / w;
}

double mw_phase_modulation_rate(double t, const FieldConfig& cfg, const ModulationConfig& mod) {
  const double wt = two_pi * cfg.f_d * t;
  return gamma_nv * (mod.b_d_mod * std::cos(wt) + mod.b_s_mod * std::cos(wt - mod.delta_mod));
}

}  // namespace nvac
