#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pechaos/noise.hpp"
#include "pechaos/spectral.hpp"
#include "pechaos/transform.hpp"

namespace pechaos {

enum class SolverMode { kStochastic, kDeterministic, kControlled };

SolverMode solver_mode_from_string(const std::string& s);
std::string to_string(SolverMode m);

struct SolverConfig {
  int K = 4;
  double dt = 1e-3;
  SolverMode mode = SolverMode::kStochastic;
  double sigma_monitor = 5.25;
  double safeguard_norm = 0.0;  // 0 disables the blow-up flag
  double viscosity = 1.0;
  bool nonlinearity = true;
  double cfl_limit = 0.5;
  int cfl_interval = 100;  // steps between advective CFL checks; 0 disables
};

struct FluidState {
  double t = 0.0;
  SpectralVelocity v;
};

/// Trajectory aborted by a runtime safeguard (CFL violation or the H^sigma
/// blow-up flag). Carries a diagnostic; the CLI maps this to exit code 3.
struct SafeguardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Spectral coefficients of the forcing Q g_t for controlled runs.
class ControlInput {
 public:
  virtual ~ControlInput() = default;
  virtual void qg(double t, std::span<double> out) const = 0;
};

/// Time-differentiable spectral trajectory, the input of residual control.
class AnalyticTrajectory {
 public:
  virtual ~AnalyticTrajectory() = default;
  virtual int truncation() const = 0;
  virtual void value(double t, SpectralVelocity& out) const = 0;
  virtual void derivative(double t, SpectralVelocity& out) const = 0;
};

/// Trajectory given on a uniform time grid; values between nodes come from
/// cubic Hermite interpolation with centered-difference slopes.
class SampledTrajectory : public AnalyticTrajectory {
 public:
  SampledTrajectory(std::vector<double> times, std::vector<SpectralVelocity> values);
  int truncation() const override { return values_.front().truncation(); }
  void value(double t, SpectralVelocity& out) const override;
  void derivative(double t, SpectralVelocity& out) const override;

 private:
  void hermite(double t, SpectralVelocity* val, SpectralVelocity* deriv) const;
  std::vector<double> times_;
  std::vector<SpectralVelocity> values_;
  std::vector<SpectralVelocity> slopes_;
};

/// Control synthesis g_t = Q^{-1}(dv/dt - Delta v + b(v,v)) along a given
/// trajectory. Feeding the result into a controlled solve reproduces the
/// trajectory. Requires q > 0 on every retained mode.
class ResidualControl : public ControlInput {
 public:
  ResidualControl(std::shared_ptr<const AnalyticTrajectory> traj, NoiseSpec noise,
                  double viscosity = 1.0);

  void qg(double t, std::span<double> out) const override;

  /// The control itself (residual divided per mode by q).
  SpectralVelocity g(double t) const;

 private:
  std::shared_ptr<const AnalyticTrajectory> traj_;
  NoiseSpec noise_;
  double viscosity_;
  mutable std::unique_ptr<SpectralTransform> transform_;
  mutable SpectralVelocity scratch_val_, scratch_der_;
};

class Observer;

/// Exponential Euler-Maruyama stepper: exact heat flow and exact per-mode
/// OU noise, leaving only the advective CFL restriction. Controlled mode
/// upgrades to the exponential midpoint rule with the forcing evaluated at
/// the step midpoint.
class Stepper {
 public:
  Stepper(SolverConfig config, NoiseSpec noise, std::uint64_t trajectory_id);

  void set_control(std::shared_ptr<const ControlInput> control) { control_ = std::move(control); }

  const SolverConfig& config() const { return config_; }
  const NoiseSpec& noise() const { return noise_; }
  const ModeTable& table() const { return *table_; }
  std::uint64_t steps_taken() const { return step_index_; }
  bool blown_up() const { return blown_up_; }

  void step(FluidState& state);

  /// Advances until state.t >= t_end (within half a step), invoking
  /// observers after every step.
  void simulate(FluidState& state, double t_end, std::span<Observer* const> observers);

  SpectralTransform& transform() { return *transform_; }

 private:
  void apply_linear_and_forcing(FluidState& state);
  void check_cfl(const FluidState& state);

  SolverConfig config_;
  NoiseSpec noise_;
  std::shared_ptr<const ModeTable> table_;
  std::unique_ptr<SpectralTransform> transform_;
  NormalStream stream_;
  std::shared_ptr<const ControlInput> control_;
  std::uint64_t step_index_ = 0;
  bool blown_up_ = false;

  // Per-mode constants reused every step.
  std::vector<double> decay_, phi1dt_, ou_std_;
  std::vector<double> decay_half_, phi1dt_half_;
  std::vector<double> qg_buf_, b_buf_;
  SpectralVelocity predictor_;
};

/// Step observer; invoked with the pre- and post-step states.
class Observer {
 public:
  virtual ~Observer() = default;
  virtual void on_start(const FluidState& state) {}
  virtual void on_step(const FluidState& before, const FluidState& after, Stepper& stepper) = 0;
};

}  // namespace pechaos
