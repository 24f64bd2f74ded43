#include "pechaos/evaluate.hpp"

#include <cmath>

namespace pechaos {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kTwoPi = 2.0 * M_PI;
}  // namespace

PointEvaluator::PointEvaluator(std::shared_ptr<const ModeTable> table)
    : table_(std::move(table)) {
  const int K = table_->truncation();
  packed_.reserve(table_->size());
  const auto& entries = table_->entries();
  std::size_t i = 0;
  while (i < entries.size()) {
    const int kx = entries[i].idx.kx;
    const int ky = entries[i].idx.ky;
    Column col{kx, ky, packed_.size(), 0};
    while (i < entries.size() && entries[i].idx.kx == kx && entries[i].idx.ky == ky) {
      const auto& e = entries[i];
      packed_.push_back(PackedMode{e.gamma[0], e.gamma[1], e.gamma_w, 0.0, e.idx.kz,
                                   e.cosine ? 1 : 0, i});
      ++i;
    }
    col.end = packed_.size();
    columns_.push_back(col);
  }
  ex_.resize(2 * K + 1);
  ey_.resize(2 * K + 1);
  ez_.resize(2 * K + 1);
}

void PointEvaluator::fill_axis_tables(const Vec3& x) {
  const int K = table_->truncation();
  auto fill = [K](std::vector<std::complex<double>>& t, double coord) {
    const std::complex<double> step(std::cos(kTwoPi * coord), std::sin(kTwoPi * coord));
    t[K] = {1.0, 0.0};
    for (int j = 1; j <= K; ++j) {
      t[K + j] = t[K + j - 1] * step;
      t[K - j] = std::conj(t[K + j]);
    }
  };
  fill(ex_, x.x);
  fill(ey_, x.y);
  fill(ez_, x.z);
}

template <bool kNeedGrad>
FlowSample PointEvaluator::sample_impl(std::span<const double> coeffs, const Vec3& x) {
  fill_axis_tables(x);
  const int K = table_->truncation();
  FlowSample out;
  double u0 = 0, u1 = 0, u2 = 0;
  double g[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};

  for (const Column& col : columns_) {
    const std::complex<double> exy = ex_[col.kx + K] * ey_[col.ky + K];
    const double exy_re = exy.real();
    const double exy_im = exy.imag();
    const double tpkx = kTwoPi * col.kx;
    const double tpky = kTwoPi * col.ky;

    double anchor_c = 0.0;  // sum of coeff*gamma_w over cosine modes in column
    double anchor_s = 0.0;  // same over sine modes

    for (std::size_t m = col.begin; m < col.end; ++m) {
      const PackedMode& pm = packed_[m];
      const double c = coeffs[pm.index];
      if (c == 0.0) continue;
      const std::complex<double>& ez = ez_[pm.kz + K];
      const double re = exy_re * ez.real() - exy_im * ez.imag();
      const double im = exy_re * ez.imag() + exy_im * ez.real();
      const double e = kSqrt2 * (pm.cosine ? re : im);
      u0 += c * pm.g0 * e;
      u1 += c * pm.g1 * e;
      if (pm.gw != 0.0) {
        u2 += c * pm.gw * e;
        if (pm.cosine)
          anchor_c += c * pm.gw;
        else
          anchor_s += c * pm.gw;
      }
      if constexpr (kNeedGrad) {
        const double d = kSqrt2 * (pm.cosine ? -im : re);  // d_j e_k = 2 pi k_j * d
        const double s0 = c * pm.g0 * d;
        const double s1 = c * pm.g1 * d;
        const double tpkz = kTwoPi * pm.kz;
        g[0] += s0 * tpkx;
        g[1] += s0 * tpky;
        g[2] += s0 * tpkz;
        g[3] += s1 * tpkx;
        g[4] += s1 * tpky;
        g[5] += s1 * tpkz;
        if (pm.gw != 0.0) {
          const double s2 = c * pm.gw * d;
          g[6] += s2 * tpkx;
          g[7] += s2 * tpky;
          g[8] += s2 * tpkz;
        }
      }
    }

    if (anchor_c != 0.0 || anchor_s != 0.0) {
      // w carries -e_k(x,y,0) per mode; its value and horizontal gradient
      // depend only on the column phase.
      const double e0c = kSqrt2 * exy_re;
      const double e0s = kSqrt2 * exy_im;
      u2 -= anchor_c * e0c + anchor_s * e0s;
      if constexpr (kNeedGrad) {
        const double d0 = anchor_c * (-kSqrt2 * exy_im) + anchor_s * (kSqrt2 * exy_re);
        g[6] -= d0 * tpkx;
        g[7] -= d0 * tpky;
      }
    }
  }

  out.u = {u0, u1, u2};
  if constexpr (kNeedGrad) {
    for (int i = 0; i < 9; ++i) out.grad_u.a[i] = g[i];
  }
  return out;
}

FlowSample PointEvaluator::sample(std::span<const double> coeffs, const Vec3& x) {
  return sample_impl<true>(coeffs, x);
}

Vec3 PointEvaluator::velocity(std::span<const double> coeffs, const Vec3& x) {
  return sample_impl<false>(coeffs, x).u;
}

double PointEvaluator::vertical_velocity(std::span<const double> coeffs, const Vec3& x) {
  return sample_impl<false>(coeffs, x).u.z;
}

namespace {
PointEvaluator& cached_evaluator(const SpectralVelocity& v) {
  thread_local std::unique_ptr<PointEvaluator> eval;
  if (!eval || eval->table().truncation() != v.truncation())
    eval = std::make_unique<PointEvaluator>(v.table_ptr());
  return *eval;
}
}  // namespace

Vec3 velocity_u_at(const SpectralVelocity& v, const Vec3& x) {
  return cached_evaluator(v).velocity(v.coeffs(), x);
}

Mat3 gradient_u_at(const SpectralVelocity& v, const Vec3& x) {
  return cached_evaluator(v).sample(v.coeffs(), x).grad_u;
}

double vertical_velocity(const SpectralVelocity& v, const Vec3& x) {
  return cached_evaluator(v).vertical_velocity(v.coeffs(), x);
}

}  // namespace pechaos
