#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pechaos/dynamics.hpp"
#include "pechaos/lagrangian.hpp"

namespace pechaos {

/// C^2 bump t -> C (t-t0)^3 (t1-t)^3 on (t0,t1), normalized to a prescribed
/// time integral. Closed-form antiderivative, so flow oracles that depend
/// on int phi are exact.
class BumpProfile {
 public:
  BumpProfile() = default;
  BumpProfile(double t0, double t1, double integral);

  double t0() const { return t0_; }
  double t1() const { return t1_; }
  double integral() const { return integral_; }
  bool active(double t) const { return t > t0_ && t < t1_; }

  double value(double t) const;
  double derivative(double t) const;
  double accumulated(double t) const;  // int_{t0}^{t} value

 private:
  double t0_ = 0.0, t1_ = 1.0, integral_ = 0.0, scale_ = 0.0;
};

/// Closed-form z-profile with exact value, derivative and running integral.
class ZProfile {
 public:
  virtual ~ZProfile() = default;
  virtual double value(double z) const = 0;
  virtual double derivative(double z) const = 0;
  virtual double integral0(double z) const = 0;  // int_0^z value
};

enum class ControlKind {
  kHorizontalShift,
  kVerticalShift,
  kRotation,
  kJacobianStretch,
  kTrajectoryControl,
};

enum class RotationAxis { kX, kY };

/// One time-compact flow v(t,x) = phi(t) V(x): the closed-form spatial
/// pattern together with its spectral representation and the precomputed
/// b(V,V) used for fast control synthesis.
struct ControlLeg {
  BumpProfile bump;
  std::function<FlowSample(const Vec3&)> pattern;  // unit-amplitude u, grad u
  SpectralVelocity V;                              // truncated representation
  SpectralVelocity bVV;                            // nonlinearity of V
  std::string name;
};

/// What the construction promises at the end of its window; filled by the
/// factories, composed multiplicatively by compose().
struct FlowOracles {
  Vec3 start{0.5, 0.5, 0.5};
  Vec3 end_position{0.5, 0.5, 0.5};
  bool fixed_point = false;  // u(start) = 0 for all t
  bool has_direction_map = false;
  Mat3 direction_map = Mat3::identity();  // xi_end = map xi_0
  bool has_jacobian_target = false;
  Mat3 jacobian_target = Mat3::identity();
  double top_singular_target = 1.0;
};

/// Explicit controllability construction: an ordered list of disjoint
/// time-window legs, each returning the velocity to zero at its endpoints.
/// Doubles as the analytic trajectory fed to the controlled solver.
class ControlFlow : public AnalyticTrajectory {
 public:
  ControlKind kind() const { return kind_; }
  const std::vector<ControlLeg>& legs() const { return legs_; }
  const FlowOracles& oracles() const { return oracles_; }
  double window_end() const;
  int truncation() const override { return K_; }

  void value(double t, SpectralVelocity& out) const override;
  void derivative(double t, SpectralVelocity& out) const override;

  /// Closed-form velocity and gradient at (t, x).
  FlowSample sample(double t, const Vec3& x) const;

  /// RK4 advection of a particle through the closed-form field with exact
  /// stage times.
  void advect(ParticleState& p, double t_begin, double t_end, double dt,
              const ParticleStepOptions& opt = {}) const;

  /// Max pointwise deviation between the closed-form field and its
  /// truncated spectral representation (the spectral-representation error).
  double representation_error(int probe_grid = 48) const;

  /// Moves (a,b,c) to (a,b,c') during the window; needs 0 < c, c' < 1.
  static ControlFlow make_vertical_shift(int K, const Vec3& start, double c_prime, double t0,
                                         double t1);

  /// Moves the horizontal position to (x',y') (two shear sub-legs).
  static ControlFlow make_horizontal_shift(int K, const Vec3& start, double x_prime,
                                           double y_prime, double t0, double t1);

  /// Rotates xi by theta about the given axis while fixing the particle at
  /// a_prime; theta in (0, 2 pi).
  static ControlFlow make_rotation(int K, const Vec3& a_prime, RotationAxis axis, double theta,
                                   double t0, double t1);

  /// Stretches the Jacobian at the fixed point: A(end) has hyperbolic-angle
  /// log(1+M) in the horizontal block and top singular value 1 + M.
  static ControlFlow make_jacobian_stretch(int K, const Vec3& a, double M, double t0, double t1);

  /// Concatenation of flows with ascending disjoint windows.
  static ControlFlow compose(std::vector<ControlFlow> stages);

 private:
  ControlKind kind_ = ControlKind::kTrajectoryControl;
  int K_ = 0;
  std::vector<ControlLeg> legs_;
  FlowOracles oracles_;
};

/// Fast control synthesis specialized to phi(t) V(x) legs:
/// Qg = phi' V + phi Lambda V + phi^2 b(V,V), all precomputed arrays.
class FlowControlInput : public ControlInput {
 public:
  explicit FlowControlInput(std::shared_ptr<const ControlFlow> flow, double viscosity = 1.0);
  void qg(double t, std::span<double> out) const override;

 private:
  std::shared_ptr<const ControlFlow> flow_;
  double viscosity_;
};

/// Closed-loop verification: synthesize the control from the flow residual,
/// run the controlled solver from rest, and check the trajectory and the
/// flow-specific endpoint oracles.
struct ControlVerifyConfig {
  SolverConfig solver;
  NoiseSpec noise;
  double particle_dt = 1e-4;
  double tail = 0.25;           // free decay after the last window
  bool use_generic_residual = false;  // ResidualControl instead of the fast path
};

struct OracleCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct ControlVerifyReport {
  std::string flow_name;
  std::vector<OracleCheck> checks;
  double closed_loop_hsigma = 0.0;    // max H^sigma error at window boundaries
  double final_state_hsigma = 0.0;
  double representation_error = 0.0;
  bool passed = true;
};

ControlVerifyReport verify_control(const ControlFlow& flow, const ControlVerifyConfig& config);

/// Pattern-level endpoint oracles on the closed-form field (no solver):
/// filled into the same report structure.
void run_flow_oracles(const ControlFlow& flow, double particle_dt, ControlVerifyReport& report);

}  // namespace pechaos
