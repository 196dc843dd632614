#include "nvac/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace nvac {

void ReadoutModel::validate() const {
  if (!(c_star >= 0.0)) throw std::invalid_argument("c_star must be >= 0");
  if (!std::isfinite(c0) || !std::isfinite(varphi))
    throw std::invalid_argument("readout parameters must be finite");
}

double phi_per_tesla(double f_d, int n_pi) {
  if (!(f_d > 0.0)) throw std::invalid_argument("f_d must be > 0");
  if (n_pi < 1) throw std::invalid_argument("n_pi must be >= 1");
  return 2.0 * gamma_nv * static_cast<double>(n_pi) / (pi * f_d);
}

double phi_nv_analytic(const FieldConfig& cfg, const ModulationConfig& mod, int n_pi, double p) {
  const double bracket = (cfg.b_d - mod.b_d_mod) * std::cos(p) +
                         cfg.b_s * std::cos(p - cfg.delta) -
                         mod.b_s_mod * std::cos(p - mod.delta_mod);
  return phi_per_tesla(cfg.f_d, n_pi) * bracket;
}

double contrast_from_phase(double phi, const ReadoutModel& readout) {
  return readout.c0 + readout.c_star * std::cos(phi + readout.varphi);
}

double bs_mod_period(double f_d, int n_pi) { return two_pi / phi_per_tesla(f_d, n_pi); }

}  // namespace nvac
