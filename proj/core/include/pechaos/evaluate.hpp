#pragma once

#include <complex>
#include <span>
#include <vector>

#include "pechaos/geometry.hpp"
#include "pechaos/spectral.hpp"

namespace pechaos {

struct FlowSample {
  Vec3 u;
  Mat3 grad_u;  // grad_u(i,j) = d_j u_i
};

/// Exact off-grid evaluation of u = (v, w(v)) and grad u by direct mode
/// summation. Owns scratch buffers; use one instance per thread.
class PointEvaluator {
 public:
  explicit PointEvaluator(std::shared_ptr<const ModeTable> table);

  const ModeTable& table() const { return *table_; }

  /// u and grad u at x for the given coefficient vector (canonical order).
  FlowSample sample(std::span<const double> coeffs, const Vec3& x);

  Vec3 velocity(std::span<const double> coeffs, const Vec3& x);

  double vertical_velocity(std::span<const double> coeffs, const Vec3& x);

 private:
  template <bool kNeedGrad>
  FlowSample sample_impl(std::span<const double> coeffs, const Vec3& x);

  void fill_axis_tables(const Vec3& x);

  struct PackedMode {
    double g0, g1, gw;      // basis direction and vertical weight
    double coeff_index;     // unused padding slot kept for alignment
    int kz;
    int cosine;             // 1 for the cosine branch
    std::size_t index;      // canonical coefficient index
  };
  struct Column {
    int kx, ky;
    std::size_t begin, end;  // packed-mode range
  };

  std::shared_ptr<const ModeTable> table_;
  std::vector<PackedMode> packed_;
  std::vector<Column> columns_;
  std::vector<std::complex<double>> ex_, ey_, ez_;  // axis phase tables, index j+K
};

/// Convenience wrappers matching the operation contracts; these construct a
/// thread-local evaluator keyed on the mode table.
Vec3 velocity_u_at(const SpectralVelocity& v, const Vec3& x);
Mat3 gradient_u_at(const SpectralVelocity& v, const Vec3& x);
double vertical_velocity(const SpectralVelocity& v, const Vec3& x);

}  // namespace pechaos
