#pragma once

// Self-contained 2D Navier-Stokes pseudo-spectral reference, written
// against complex exponentials with a direct convolution nonlinearity.
// Deliberately shares no spatial machinery with the library: it is the
// independent oracle for everything that claims z-independent dynamics
// reduces to 2D Navier-Stokes.

#include <complex>
#include <map>
#include <vector>

#include "pechaos/spectral.hpp"

namespace ns2d {

using cd = std::complex<double>;

struct Field2D {
  int K = 0;
  // amplitude of e^{2 pi i k.x} for all k in [-K,K]^2 (both signs stored)
  std::vector<cd> ux, uy;

  explicit Field2D(int K_) : K(K_), ux((2 * K_ + 1) * (2 * K_ + 1)), uy(ux.size()) {}
  int idx(int kx, int ky) const { return (ky + K) * (2 * K + 1) + (kx + K); }
};

inline Field2D from_spectral(const pechaos::SpectralVelocity& v) {
  const int K = v.truncation();
  Field2D f(K);
  const auto& tab = v.table();
  const double s2 = std::sqrt(2.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& e = tab[i];
    if (e.idx.kz != 0 || v[i] == 0.0) continue;
    const cd amp = e.cosine ? cd(s2 / 2.0, 0.0) : cd(0.0, -s2 / 2.0);
    const cd cx = amp * v[i] * e.gamma[0];
    const cd cy = amp * v[i] * e.gamma[1];
    f.ux[f.idx(e.idx.kx, e.idx.ky)] += cx;
    f.uy[f.idx(e.idx.kx, e.idx.ky)] += cy;
    f.ux[f.idx(-e.idx.kx, -e.idx.ky)] += std::conj(cx);
    f.uy[f.idx(-e.idx.kx, -e.idx.ky)] += std::conj(cy);
  }
  return f;
}

inline pechaos::SpectralVelocity to_spectral(const Field2D& f) {
  pechaos::SpectralVelocity v(f.K);
  const auto& tab = v.table();
  const double s2 = std::sqrt(2.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& e = tab[i];
    if (e.idx.kz != 0) continue;
    const cd cx = f.ux[f.idx(e.idx.kx, e.idx.ky)];
    const cd cy = f.uy[f.idx(e.idx.kx, e.idx.ky)];
    const double c1 = e.cosine ? s2 * cx.real() : -s2 * cx.imag();
    const double c2 = e.cosine ? s2 * cy.real() : -s2 * cy.imag();
    v[i] = e.gamma[0] * c1 + e.gamma[1] * c2;
  }
  return v;
}

/// Leray-projected (u . grad) u by exact truncated convolution.
inline Field2D nonlinearity(const Field2D& u) {
  const int K = u.K;
  Field2D n(K);
  constexpr double two_pi = 2.0 * M_PI;
  for (int kx = -K; kx <= K; ++kx)
    for (int ky = -K; ky <= K; ++ky) {
      cd nx(0, 0), ny(0, 0);
      for (int px = -K; px <= K; ++px)
        for (int py = -K; py <= K; ++py) {
          const int qx = kx - px, qy = ky - py;
          if (std::abs(qx) > K || std::abs(qy) > K) continue;
          const cd ax = u.ux[u.idx(px, py)];
          const cd ay = u.uy[u.idx(px, py)];
          const cd gx(0.0, two_pi * qx);
          const cd gy(0.0, two_pi * qy);
          nx += (ax * gx + ay * gy) * u.ux[u.idx(qx, qy)];
          ny += (ax * gx + ay * gy) * u.uy[u.idx(qx, qy)];
        }
      if (kx == 0 && ky == 0) continue;  // mean removed by projection
      const double k2 = double(kx) * kx + double(ky) * ky;
      const cd kdot = (double(kx) * nx + double(ky) * ny) / k2;
      n.ux[n.idx(kx, ky)] = nx - kdot * double(kx);
      n.uy[n.idx(kx, ky)] = ny - kdot * double(ky);
    }
  return n;
}

/// One exponential-Euler step of 2D NS with unit viscosity.
inline void step(Field2D& u, double dt) {
  const Field2D n = nonlinearity(u);
  const int K = u.K;
  constexpr double four_pi2 = 4.0 * M_PI * M_PI;
  for (int kx = -K; kx <= K; ++kx)
    for (int ky = -K; ky <= K; ++ky) {
      if (kx == 0 && ky == 0) continue;
      const double lam = four_pi2 * (double(kx) * kx + double(ky) * ky);
      const double decay = std::exp(-lam * dt);
      const double phi1dt = -std::expm1(-lam * dt) / lam;
      const int i = u.idx(kx, ky);
      u.ux[i] = decay * u.ux[i] - phi1dt * n.ux[i];
      u.uy[i] = decay * u.uy[i] - phi1dt * n.uy[i];
    }
}

}  // namespace ns2d
