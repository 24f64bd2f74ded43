#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "pechaos/geometry.hpp"
#include "pechaos/modes.hpp"

namespace pechaos {

/// Horizontal velocity in the constrained real Fourier basis. Storing only
/// coefficients of retained (k, component) modes enforces zero mean and the
/// divergence-free barotropic mode by construction.
class SpectralVelocity {
 public:
  SpectralVelocity() = default;
  explicit SpectralVelocity(int K)
      : table_(ModeTable::shared(K)), coeffs_(table_->size(), 0.0) {}
  SpectralVelocity(std::shared_ptr<const ModeTable> table, std::vector<double> coeffs)
      : table_(std::move(table)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != table_->size())
      throw std::invalid_argument("SpectralVelocity: coefficient count mismatch");
  }

  int truncation() const { return table_->truncation(); }
  std::size_t size() const { return coeffs_.size(); }
  const ModeTable& table() const { return *table_; }
  std::shared_ptr<const ModeTable> table_ptr() const { return table_; }

  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }

  double coeff(const ModeIndex& m) const {
    const auto i = table_->find(m);
    if (i < 0) throw std::out_of_range("SpectralVelocity::coeff: mode not retained");
    return coeffs_[static_cast<std::size_t>(i)];
  }
  void set_coeff(const ModeIndex& m, double v) {
    const auto i = table_->find(m);
    if (i < 0) throw std::out_of_range("SpectralVelocity::set_coeff: mode not retained");
    coeffs_[static_cast<std::size_t>(i)] = v;
  }

  SpectralVelocity& operator+=(const SpectralVelocity& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  SpectralVelocity& operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
  }

  bool all_finite() const {
    for (double c : coeffs_)
      if (!std::isfinite(c)) return false;
    return true;
  }

 private:
  std::shared_ptr<const ModeTable> table_;
  std::vector<double> coeffs_;
};

/// Samples of an n-component field on the uniform M x M x M grid,
/// component-major, x fastest: samples[c][(z*M + y)*M + x].
struct PhysicalGridField {
  int M = 0;
  int components = 0;
  std::vector<double> samples;

  PhysicalGridField() = default;
  PhysicalGridField(int M_, int components_)
      : M(M_), components(components_),
        samples(static_cast<std::size_t>(components_) * M_ * M_ * M_, 0.0) {}

  double* component(int c) { return samples.data() + static_cast<std::size_t>(c) * M * M * M; }
  const double* component(int c) const {
    return samples.data() + static_cast<std::size_t>(c) * M * M * M;
  }
  std::size_t points() const { return static_cast<std::size_t>(M) * M * M; }

  double& at(int c, int ix, int iy, int iz) {
    return samples[static_cast<std::size_t>(c) * points() +
                   (static_cast<std::size_t>(iz) * M + iy) * M + ix];
  }
  double at(int c, int ix, int iy, int iz) const {
    return samples[static_cast<std::size_t>(c) * points() +
                   (static_cast<std::size_t>(iz) * M + iy) * M + ix];
  }
};

/// Sobolev norm (sum (1 + 4 pi^2 |k|^2)^s v_k^2)^{1/2}; the inhomogeneous
/// multiplier is equivalent to the homogeneous one on these mean-zero fields.
double sobolev_norm(const SpectralVelocity& v, double s);

inline double l2_norm(const SpectralVelocity& v) { return sobolev_norm(v, 0.0); }

/// |grad v|_{L^2} = (sum lambda_k v_k^2 / (4 pi^2) * 4 pi^2)^{1/2}; kept
/// separate from sobolev_norm because the energy balance uses it verbatim.
double grad_l2_norm(const SpectralVelocity& v);

double inner_product(const SpectralVelocity& a, const SpectralVelocity& b);

/// Normalized basis function value for a single mode at a point of T^3.
double basis_eval(const ModeIndex& m, const Vec3& x);

}  // namespace pechaos
