#include "pechaos/spectral.hpp"

namespace pechaos {

double sobolev_norm(const SpectralVelocity& v, double s) {
  const auto& tab = v.table();
  double acc = 0.0;
  if (s == 0.0) {
    for (std::size_t i = 0; i < v.size(); ++i) acc += v[i] * v[i];
    return std::sqrt(acc);
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = std::pow(1.0 + tab[i].lambda, s);
    acc += w * v[i] * v[i];
  }
  return std::sqrt(acc);
}

double grad_l2_norm(const SpectralVelocity& v) {
  const auto& tab = v.table();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += tab[i].lambda * v[i] * v[i];
  return std::sqrt(acc);
}

double inner_product(const SpectralVelocity& a, const SpectralVelocity& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("inner_product: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double basis_eval(const ModeIndex& m, const Vec3& x) {
  if (!mode_index_valid(m))
    throw std::invalid_argument("basis_eval: invalid mode index");
  constexpr double two_pi = 2.0 * M_PI;
  const double phase = two_pi * (m.kx * x.x + m.ky * x.y + m.kz * x.z);
  const double c = std::sqrt(2.0);
  return positive_class(m.kx, m.ky, m.kz) ? c * std::cos(phase) : c * std::sin(phase);
}

}  // namespace pechaos
