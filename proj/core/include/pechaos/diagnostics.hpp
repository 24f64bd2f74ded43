#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pechaos/dynamics.hpp"
#include "pechaos/lyapunov.hpp"

namespace pechaos {

struct MeanWithCI {
  double mean = 0.0;
  double ci_half_width = 0.0;
  int n_batches = 0;
};

struct LpMoment {
  double p = 0.0;
  MeanWithCI coarse;  // dealiasing grid
  MeanWithCI fine;    // doubled grid
  double grid_ratio = 0.0;  // fine/coarse, the resolution-stability number
};

struct AnisoMoment {
  double p = 0.0;
  MeanWithCI value;  // int_{xy} sup_z |dz v|^p
};

/// Time-averaged stationary statistics of one ensemble of trajectories.
struct StationaryReport {
  MeanWithCI grad_sq;     // time average of |grad v|_{L2}^2
  MeanWithCI v_sq;        // time average of |v|_{L2}^2
  MeanWithCI exp_moment;  // time average of exp(eta |v|^2)
  double eta = 0.0;
  double E0 = 0.0;        // injected energy of the truncated forcing
  std::vector<LpMoment> lp;
  std::vector<AnisoMoment> aniso;
  std::vector<double> mode_mean_sq;  // per-mode time averages (optional)
  double T_effective = 0.0;
  std::int64_t steps = 0;
};

struct StationaryConfig {
  SolverConfig solver;
  NoiseSpec noise;
  int trajectories = 8;
  double burn_in = 10.0;
  double horizon = 500.0;
  int batches = 25;
  int workers = 1;
  std::vector<double> lp_exponents = {1.0, 1.25, 4.0 / 3.0, 2.0};
  int sample_interval = 100;  // steps between grid-quadrature samples
  bool per_mode_stats = false;
  bool aniso_stats = true;
};

StationaryReport run_stationary(const StationaryConfig& config);

/// Report of the energy-balance identity: the time average of
/// |grad v|_{L2}^2 against E0/2, its exact Galerkin target.
struct EnergyBalanceReport {
  double measured = 0.0;
  double target = 0.0;
  double relative_error = 0.0;
  MeanWithCI detail;
};
EnergyBalanceReport energy_balance(const StationaryReport& report);

/// Grid quadrature of int |grad u|^p dx for a fixed field.
double lp_gradient_integral(const SpectralVelocity& v, double p, int grid);
double lp_gradient_integral(SpectralTransform& tf, const SpectralVelocity& v, double p);

/// int_{T^2_{xy}} sup_z |dz v|^p dx dy for a fixed field.
double anisotropic_dzv_integral(const SpectralVelocity& v, double p, int grid);
double anisotropic_dzv_integral(SpectralTransform& tf, const SpectralVelocity& v, double p);

/// Empirical boundedness probe of the four nonlinearity estimates. Fields
/// are random with per-mode scale |k|^{-slope}.
struct NonlinearityProbe {
  double max_ratio_l2 = 0.0;      // |b|_{L2} / (|v1|_{3/2} |v2|_{3/2})
  double max_ratio_h1 = 0.0;      // |b|_{H1} / (|v1|_{5/2}|v2|_{3/2} + |v1|_{3/2}|v2|_{5/2})
  double max_ratio_h1_eps = 0.0;  // |b|_{H1} / (|v1|_{2+2d}|v2|_{2+2d}), d = 1/4
  double max_ratio_h2 = 0.0;      // |b|_{H2} / (|v1|_{H3} |v2|_{H3})
  int samples = 0;
};
NonlinearityProbe nonlinearity_bound_probe(int K, int samples, double slope, std::uint64_t seed);

/// Random constrained field with coefficients ~ N(0, |k|^{-2 slope}),
/// normalized to unit L2 norm.
SpectralVelocity random_field(int K, double slope, std::uint64_t seed, std::uint64_t id = 0);

}  // namespace pechaos
