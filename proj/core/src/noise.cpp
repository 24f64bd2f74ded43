#include "pechaos/noise.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pechaos {

double q_coefficient(const NoiseSpec& spec, const ModeIndex& m) {
  if (!mode_index_valid(m) || std::abs(m.kx) > spec.K || std::abs(m.ky) > spec.K ||
      std::abs(m.kz) > spec.K)
    throw std::out_of_range("q_coefficient: mode outside truncation");
  const double k2 = static_cast<double>(m.kx) * m.kx + static_cast<double>(m.ky) * m.ky +
                    static_cast<double>(m.kz) * m.kz;
  return spec.amplitude * std::pow(k2, -0.5 * spec.alpha);
}

double injected_energy(const NoiseSpec& spec) {
  const auto table = ModeTable::shared(spec.K);
  double e0 = 0.0;
  for (const auto& e : table->entries())
    e0 += std::pow(e.k2, -spec.alpha);
  return spec.amplitude * spec.amplitude * e0;
}

double amplitude_for_energy(double alpha, int K, double E0) {
  NoiseSpec unit{alpha, 1.0, K, 0};
  return std::sqrt(E0 / injected_energy(unit));
}

std::string regime_warnings(const NoiseSpec& spec, double sigma_monitor) {
  std::ostringstream os;
  if (spec.alpha <= 6.0)
    os << "alpha = " << spec.alpha << " is outside the supported regime alpha > 6; ";
  if (sigma_monitor <= 4.5)
    os << "sigma_monitor = " << sigma_monitor << " violates sigma > 9/2; ";
  if (!(sigma_monitor > spec.alpha - 2.0 && sigma_monitor < spec.alpha - 1.5))
    os << "sigma_monitor = " << sigma_monitor << " outside the window (alpha-2, alpha-3/2); ";
  auto s = os.str();
  if (!s.empty()) s.resize(s.size() - 2);
  return s;
}

double ou_increment(double q, double lambda, double dt, double normal_draw) {
  if (!(dt > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("ou_increment: need dt > 0 and lambda > 0");
  return ou_step_stddev(q, lambda, dt) * normal_draw;
}

}  // namespace pechaos
