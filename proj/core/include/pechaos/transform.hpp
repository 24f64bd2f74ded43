#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "pechaos/spectral.hpp"

namespace pechaos {

/// Smallest FFT-friendly grid size >= n (factors 2,3,5,7 only).
int next_fast_grid(int n);

/// Grid large enough for alias-free quadratic products at truncation K.
inline int dealias_grid(int K) { return next_fast_grid(3 * K + 1); }

/// Grid large enough to represent the truncated field exactly.
inline int exact_grid(int K) { return next_fast_grid(2 * K + 1); }

/// FFTW-backed transforms between the constrained mode basis and uniform
/// grids of one fixed size M. One instance per worker thread; instances do
/// not share buffers. Plan creation is serialized internally.
class SpectralTransform {
 public:
  SpectralTransform(int K, int M);
  ~SpectralTransform();

  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  int truncation() const { return K_; }
  int grid_size() const { return M_; }

  /// Exact grid samples of the horizontal velocity (2 components).
  PhysicalGridField synthesize(const SpectralVelocity& v);

  /// Grid samples of the diagnostic vertical velocity w(v).
  PhysicalGridField synthesize_vertical(const SpectralVelocity& v);

  /// Grid samples of (v, w(v)) as a 3-component field.
  PhysicalGridField synthesize_full(const SpectralVelocity& v);

  /// Grid samples of the full velocity gradient, 9 components in row-major
  /// order d_j u_i (component index = 3*i + j).
  PhysicalGridField synthesize_gradient_u(const SpectralVelocity& v);

  /// Orthogonal projection of a 2-component grid field onto the retained
  /// constrained basis: removes the mean, truncates, and applies the
  /// hydrostatic Helmholtz projection in one pass.
  SpectralVelocity analyze(const PhysicalGridField& f);

  /// Spectral coefficients of b(v,v) = P[(v.grad_xy)v + w(v) dz v], formed
  /// pseudo-spectrally with alias-free products (requires M >= 3K+1).
  SpectralVelocity nonlinearity(const SpectralVelocity& v);

  /// b(v1, v2) with the paper's argument convention: advecting field first.
  SpectralVelocity nonlinearity(const SpectralVelocity& v1, const SpectralVelocity& v2);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int K_;
  int M_;
};

}  // namespace pechaos
