#pragma once

#include <cstdint>
#include <string>

#include "pechaos/modes.hpp"
#include "pechaos/rng.hpp"

namespace pechaos {

/// Diagonal forcing law q_k = amplitude * |k|^{-alpha} on every retained
/// mode. The theorems behind the diagnostics assume alpha > 6 and a
/// monitoring exponent inside the window (9/2, alpha - 3/2) with
/// sigma > alpha - 2; configurations outside it still run but are flagged.
struct NoiseSpec {
  double alpha = 7.0;
  double amplitude = 1.0;
  int K = 4;
  std::uint64_t seed = 0;

  bool enabled() const { return amplitude != 0.0; }
};

double q_coefficient(const NoiseSpec& spec, const ModeIndex& m);

/// E_0 = sum of q_k^2 over retained modes (squared Hilbert-Schmidt norm of
/// Q), the injected energy per unit mass of the truncated system.
double injected_energy(const NoiseSpec& spec);

/// Amplitude that normalizes the injected energy of (alpha, K) to E0.
double amplitude_for_energy(double alpha, int K, double E0);

/// Human-readable warnings for parameter choices outside the regime the
/// supporting theory covers; empty when none apply.
std::string regime_warnings(const NoiseSpec& spec, double sigma_monitor);

/// Exact Ornstein-Uhlenbeck increment of the stochastic convolution over a
/// step: N(0, q^2 (1 - e^{-2 lambda dt}) / (2 lambda)).
double ou_increment(double q, double lambda, double dt, double normal_draw);

inline double ou_step_stddev(double q, double lambda, double dt) {
  return q * std::sqrt(-std::expm1(-2.0 * lambda * dt) / (2.0 * lambda));
}

}  // namespace pechaos
