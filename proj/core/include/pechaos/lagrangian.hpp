#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pechaos/evaluate.hpp"
#include "pechaos/geometry.hpp"
#include "pechaos/spectral.hpp"

namespace pechaos {

/// One tracked particle: position, both matrix cocycles, both projective
/// directions, and the accumulated log growth of each projective process.
struct ParticleState {
  Vec3 x{0.5, 0.5, 0.5};
  Mat3 A = Mat3::identity();        // Jacobian cocycle, grad of the flow map
  Mat3 A_check = Mat3::identity();  // inverse-transpose cocycle
  Vec3 xi{1, 0, 0};
  Vec3 xi_check{1, 0, 0};
  double logJ = 0.0;        // integral of <xi, grad u xi>
  double logJ_check = 0.0;  // integral of -<xi_check, (grad u)^T xi_check>
  std::int64_t clamp_events = 0;
};

struct ParticleStepOptions {
  bool evolve_jacobian = true;
  bool evolve_projective = true;
  double clamp_delta = 1e-12;  // z confined to [delta, 1 - delta]
};

/// Velocity over one solver step: spectral coefficients at t_n, the step
/// midpoint and t_{n+1} (linear interpolation in time between snapshots).
/// Shared read-only between all particles of the step window.
class StageField {
 public:
  StageField(std::shared_ptr<const ModeTable> table);

  void set(const SpectralVelocity& before, const SpectralVelocity& after);

  /// Frozen field (both endpoints equal); for steady-flow tests.
  void set_frozen(const SpectralVelocity& v);

  std::span<const double> at_begin() const { return c0_; }
  std::span<const double> at_half() const { return ch_; }
  std::span<const double> at_end() const { return c1_; }
  const std::shared_ptr<const ModeTable>& table() const { return table_; }

 private:
  std::shared_ptr<const ModeTable> table_;
  std::vector<double> c0_, ch_, c1_;
};

/// RK4 update of the particle flow, the two matrix cocycles, the two
/// projective directions, and the log-growth accumulators. All parts share
/// the same stages, so the discrete Jacobian is the exact derivative of the
/// discrete flow map up to stage-coupling error.
class ParticleStepper {
 public:
  explicit ParticleStepper(std::shared_ptr<const ModeTable> table);

  void step(ParticleState& p, const StageField& field, double dt,
            const ParticleStepOptions& opt = {});

  PointEvaluator& evaluator() { return eval_; }

 private:
  PointEvaluator eval_;
};

/// QR renormalization used by the Lyapunov estimators: factor the cocycle,
/// keep the orthogonal frame, return log of the R diagonal.
std::array<double, 3> qr_renormalize(Mat3& A);

}  // namespace pechaos
