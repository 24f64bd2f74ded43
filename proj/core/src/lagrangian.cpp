#include "pechaos/lagrangian.hpp"

#include <cmath>

namespace pechaos {

StageField::StageField(std::shared_ptr<const ModeTable> table) : table_(std::move(table)) {
  c0_.resize(table_->size());
  ch_.resize(table_->size());
  c1_.resize(table_->size());
}

void StageField::set(const SpectralVelocity& before, const SpectralVelocity& after) {
  const std::size_t n = table_->size();
  for (std::size_t i = 0; i < n; ++i) {
    c0_[i] = before[i];
    c1_[i] = after[i];
    ch_[i] = 0.5 * (before[i] + after[i]);
  }
}

void StageField::set_frozen(const SpectralVelocity& v) {
  const std::size_t n = table_->size();
  for (std::size_t i = 0; i < n; ++i) c0_[i] = ch_[i] = c1_[i] = v[i];
}

ParticleStepper::ParticleStepper(std::shared_ptr<const ModeTable> table)
    : eval_(std::move(table)) {}

namespace {

struct StageDeriv {
  Vec3 dx;
  Mat3 dA, dAc;
  Vec3 dxi, dxic;
  double dlogJ = 0.0, dlogJc = 0.0;
};

// Wrap the periodic horizontal coordinates only; z is confined by clamping.
inline Vec3 wrap_position(Vec3 x) {
  x.x -= std::floor(x.x);
  x.y -= std::floor(x.y);
  return x;
}

}  // namespace

void ParticleStepper::step(ParticleState& p, const StageField& field, double dt,
                           const ParticleStepOptions& opt) {
  const bool need_grad = opt.evolve_jacobian || opt.evolve_projective;
  std::span<const double> stage_coeffs[4] = {field.at_begin(), field.at_half(), field.at_half(),
                                             field.at_end()};
  const double stage_pos[4] = {0.0, 0.5, 0.5, 1.0};

  StageDeriv k[4];
  for (int s = 0; s < 4; ++s) {
    Vec3 x = p.x;
    Mat3 A = p.A, Ac = p.A_check;
    Vec3 xi = p.xi, xic = p.xi_check;
    if (s > 0) {
      const double a = stage_pos[s] * dt;
      x = p.x + a * k[s - 1].dx;
      if (opt.evolve_jacobian) {
        A += a * k[s - 1].dA;
        Ac += a * k[s - 1].dAc;
      }
      if (opt.evolve_projective) {
        xi += a * k[s - 1].dxi;
        xic += a * k[s - 1].dxic;
      }
    }
    if (need_grad) {
      const FlowSample f = eval_.sample(stage_coeffs[s], x);
      const Mat3& G = f.grad_u;
      k[s].dx = f.u;
      if (opt.evolve_jacobian) {
        k[s].dA = matmul(G, A);
        k[s].dAc = matTmul(G, Ac) * -1.0;
      }
      if (opt.evolve_projective) {
        const Vec3 Gxi = matvec(G, xi);
        const double r = dot(xi, Gxi);
        k[s].dxi = Gxi - r * xi;
        k[s].dlogJ = r;
        const Vec3 GTxic = matTvec(G, xic);
        const double rc = dot(xic, GTxic);
        k[s].dxic = (GTxic - rc * xic) * -1.0;
        k[s].dlogJc = -rc;
      }
    } else {
      k[s].dx = eval_.velocity(stage_coeffs[s], x);
    }
  }

  const double w = dt / 6.0;
  p.x = wrap_position(p.x + w * (k[0].dx + 2.0 * k[1].dx + 2.0 * k[2].dx + k[3].dx));
  if (opt.evolve_jacobian) {
    p.A += w * (k[0].dA + 2.0 * k[1].dA + 2.0 * k[2].dA + k[3].dA);
    p.A_check += w * (k[0].dAc + 2.0 * k[1].dAc + 2.0 * k[2].dAc + k[3].dAc);
  }
  if (opt.evolve_projective) {
    p.xi = normalized(p.xi + w * (k[0].dxi + 2.0 * k[1].dxi + 2.0 * k[2].dxi + k[3].dxi));
    p.xi_check =
        normalized(p.xi_check + w * (k[0].dxic + 2.0 * k[1].dxic + 2.0 * k[2].dxic + k[3].dxic));
    p.logJ += w * (k[0].dlogJ + 2.0 * k[1].dlogJ + 2.0 * k[2].dlogJ + k[3].dlogJ);
    p.logJ_check += w * (k[0].dlogJc + 2.0 * k[1].dlogJc + 2.0 * k[2].dlogJc + k[3].dlogJc);
  }

  if (p.x.z < opt.clamp_delta) {
    p.x.z = opt.clamp_delta;
    ++p.clamp_events;
  } else if (p.x.z > 1.0 - opt.clamp_delta) {
    p.x.z = 1.0 - opt.clamp_delta;
    ++p.clamp_events;
  }
}

std::array<double, 3> qr_renormalize(Mat3& A) {
  const QRResult qr = qr_positive(A);
  A = qr.Q;
  return {std::log(qr.r_diag[0]), std::log(qr.r_diag[1]), std::log(qr.r_diag[2])};
}

}  // namespace pechaos
