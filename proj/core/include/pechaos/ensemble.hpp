#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pechaos/dynamics.hpp"
#include "pechaos/lyapunov.hpp"

namespace pechaos {

/// Shared settings for multi-trajectory runs. Each trajectory owns an RNG
/// stream keyed by its id; results are merged in trajectory order, so the
/// outputs do not depend on the worker count.
struct EnsembleConfig {
  SolverConfig solver;
  NoiseSpec noise;
  int trajectories = 8;
  int particles = 64;
  double burn_in = 10.0;
  double horizon = 500.0;
  double renorm_interval = 0.1;
  int batches = 25;
  int workers = 1;
  std::string scalar_f0;     // "", "sinx", "siny" or "sinz": passive-scalar seed
  int scalar_samples = 100;  // points on the gradient-growth curve
};

struct LyapunovSuiteResult {
  LyapunovEstimate top_A, top_C;
  std::array<LyapunovEstimate, 3> spectrum_A, spectrum_C;
  LyapunovEstimate proj_xi, proj_xi_check, proj_xi_e1, proj_xi_e3;

  /// Max over e1-seeded particles of |logJ - sum log R11| / T: the discrete
  /// agreement between the QR and projective growth accounting.
  double qr_proj_gap = 0.0;
  /// Max |det A - 1| per unit time observed right before QR renormalization.
  double det_drift = 0.0;
  std::int64_t clamp_events = 0;

  /// Monte-Carlo curve of E |Acheck grad f0| (the L1 gradient of the
  /// advected scalar), with its fitted exponential rate.
  std::vector<std::pair<double, double>> scalar_curve;
  RateFit scalar_fit;

  double T_effective = 0.0;
};

LyapunovSuiteResult run_lyapunov_suite(const EnsembleConfig& config);

enum class CocycleSelector { kJacobian, kInverseTranspose };
enum class ProjectiveSelector { kXi, kXiCheck };

LyapunovEstimate estimate_top(const EnsembleConfig& config, CocycleSelector which);
std::array<LyapunovEstimate, 3> estimate_spectrum(const EnsembleConfig& config,
                                                  CocycleSelector which);
LyapunovEstimate estimate_top_projective(const EnsembleConfig& config, ProjectiveSelector which);

/// Initial passive-scalar presets: value and gradient of f0.
struct ScalarField {
  double (*value)(const Vec3&);
  Vec3 (*gradient)(const Vec3&);
};
ScalarField scalar_preset(const std::string& name);

}  // namespace pechaos
