#include "pechaos/transform.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace pechaos {

namespace {

std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kTwoPi = 2.0 * M_PI;

}  // namespace

int next_fast_grid(int n) {
  auto smooth = [](int m) {
    for (int p : {2, 3, 5, 7})
      while (m % p == 0) m /= p;
    return m == 1;
  };
  while (!smooth(n)) ++n;
  return n;
}

struct SpectralTransform::Impl {
  int K, M, Mh;
  std::shared_ptr<const ModeTable> table;

  std::vector<std::complex<double>> cbuf;   // one spectral scratch array
  std::vector<double> rbuf;                 // one real scratch array
  fftw_plan plan_c2r = nullptr;
  fftw_plan plan_r2c = nullptr;

  Impl(int K_, int M_) : K(K_), M(M_), Mh(M_ / 2 + 1), table(ModeTable::shared(K_)) {
    if (M < 2 * K + 1)
      throw std::invalid_argument("SpectralTransform: grid too small, aliasing (need M >= 2K+1)");
    cbuf.resize(static_cast<std::size_t>(M) * M * Mh);
    rbuf.resize(static_cast<std::size_t>(M) * M * M);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_c2r = fftw_plan_dft_c2r_3d(M, M, M,
                                    reinterpret_cast<fftw_complex*>(cbuf.data()), rbuf.data(),
                                    FFTW_ESTIMATE);
    plan_r2c = fftw_plan_dft_r2c_3d(M, M, M, rbuf.data(),
                                    reinterpret_cast<fftw_complex*>(cbuf.data()),
                                    FFTW_ESTIMATE);
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_c2r);
    fftw_destroy_plan(plan_r2c);
  }

  // Complex array layout: index (z, y, xc) with xc = 0..M/2 the halved axis.
  std::size_t cslot(int kx, int ky, int kz) const {
    const int iy = ky >= 0 ? ky : ky + M;
    const int iz = kz >= 0 ? kz : kz + M;
    return (static_cast<std::size_t>(iz) * M + iy) * Mh + kx;
  }

  /// Adds amplitude c at wavevector k (and implicitly conj(c) at -k).
  void add_amplitude(std::complex<double>* arr, int kx, int ky, int kz,
                     std::complex<double> c) const {
    if (kx > 0) {
      arr[cslot(kx, ky, kz)] += c;
    } else if (kx < 0) {
      arr[cslot(-kx, -ky, -kz)] += std::conj(c);
    } else {
      arr[cslot(0, ky, kz)] += c;
      arr[cslot(0, -ky, -kz)] += std::conj(c);
    }
  }

  std::complex<double> read_amplitude(const std::complex<double>* arr, int kx, int ky,
                                      int kz) const {
    if (kx >= 0) return arr[cslot(kx, ky, kz)];
    return std::conj(arr[cslot(-kx, -ky, -kz)]);
  }

  /// Complex amplitude of one unit-coefficient mode at its own wavevector.
  static std::complex<double> mode_amplitude(bool cosine) {
    return cosine ? std::complex<double>(kSqrt2 / 2.0, 0.0)
                  : std::complex<double>(0.0, -kSqrt2 / 2.0);
  }

  enum class Part { kComponent, kVertical };

  /// Fills cbuf with the complex spectrum of one scalar: horizontal
  /// component `comp` of v, or the vertical velocity w(v). `deriv` in
  /// {-1,0,1,2} selects none or d/dx_j. The x0-anchored term of w lands on
  /// the (kx,ky,0) wavevector with the opposite sign.
  void fill_spectrum(const SpectralVelocity& v, Part part, int comp, int deriv) {
    std::fill(cbuf.begin(), cbuf.end(), std::complex<double>(0.0, 0.0));
    const auto& entries = table->entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      const double vc = v[i];
      if (vc == 0.0) continue;
      double weight;
      if (part == Part::kComponent) {
        weight = e.gamma[comp];
      } else {
        if (e.idx.kz == 0) continue;
        weight = e.gamma_w;
      }
      if (weight == 0.0) continue;
      const std::complex<double> base = mode_amplitude(e.cosine) * (vc * weight);
      const int k[3] = {e.idx.kx, e.idx.ky, e.idx.kz};
      std::complex<double> c = base;
      if (deriv >= 0) c *= std::complex<double>(0.0, kTwoPi * k[deriv]);
      add_amplitude(cbuf.data(), k[0], k[1], k[2], c);
      if (part == Part::kVertical) {
        std::complex<double> c0 = base;
        if (deriv == 2) continue;  // the anchored term is z-independent
        if (deriv >= 0) c0 *= std::complex<double>(0.0, kTwoPi * k[deriv]);
        add_amplitude(cbuf.data(), k[0], k[1], 0, -c0);
      }
    }
  }

  void c2r_into(double* out) {
    fftw_execute(plan_c2r);
    std::memcpy(out, rbuf.data(), rbuf.size() * sizeof(double));
  }

  void scalar_grid(const SpectralVelocity& v, Part part, int comp, int deriv, double* out) {
    fill_spectrum(v, part, comp, deriv);
    c2r_into(out);
  }
};

SpectralTransform::SpectralTransform(int K, int M)
    : impl_(std::make_unique<Impl>(K, M)), K_(K), M_(M) {}

SpectralTransform::~SpectralTransform() = default;

PhysicalGridField SpectralTransform::synthesize(const SpectralVelocity& v) {
  PhysicalGridField f(M_, 2);
  impl_->scalar_grid(v, Impl::Part::kComponent, 0, -1, f.component(0));
  impl_->scalar_grid(v, Impl::Part::kComponent, 1, -1, f.component(1));
  return f;
}

PhysicalGridField SpectralTransform::synthesize_vertical(const SpectralVelocity& v) {
  PhysicalGridField f(M_, 1);
  impl_->scalar_grid(v, Impl::Part::kVertical, 0, -1, f.component(0));
  return f;
}

PhysicalGridField SpectralTransform::synthesize_full(const SpectralVelocity& v) {
  PhysicalGridField f(M_, 3);
  impl_->scalar_grid(v, Impl::Part::kComponent, 0, -1, f.component(0));
  impl_->scalar_grid(v, Impl::Part::kComponent, 1, -1, f.component(1));
  impl_->scalar_grid(v, Impl::Part::kVertical, 0, -1, f.component(2));
  return f;
}

PhysicalGridField SpectralTransform::synthesize_gradient_u(const SpectralVelocity& v) {
  PhysicalGridField g(M_, 9);
  for (int comp = 0; comp < 2; ++comp)
    for (int d = 0; d < 3; ++d)
      impl_->scalar_grid(v, Impl::Part::kComponent, comp, d, g.component(3 * comp + d));
  // Row 3: horizontal derivatives of w from the closed form, and
  // dz w = -div_xy v spectrally.
  impl_->scalar_grid(v, Impl::Part::kVertical, 0, 0, g.component(6));
  impl_->scalar_grid(v, Impl::Part::kVertical, 0, 1, g.component(7));
  const std::size_t n = g.points();
  const double* dxv1 = g.component(0);
  const double* dyv2 = g.component(4);
  double* dzw = g.component(8);
  for (std::size_t i = 0; i < n; ++i) dzw[i] = -(dxv1[i] + dyv2[i]);
  return g;
}

SpectralVelocity SpectralTransform::analyze(const PhysicalGridField& f) {
  if (f.M != M_ || f.components != 2)
    throw std::invalid_argument("analyze: expected a 2-component field on the workspace grid");
  const double inv_n = 1.0 / static_cast<double>(f.points());
  // Forward transforms of both components, kept in two spectra.
  std::vector<std::complex<double>> spec1(impl_->cbuf.size()), spec2(impl_->cbuf.size());
  std::memcpy(impl_->rbuf.data(), f.component(0), f.points() * sizeof(double));
  fftw_execute(impl_->plan_r2c);
  std::memcpy(spec1.data(), impl_->cbuf.data(), impl_->cbuf.size() * sizeof(impl_->cbuf[0]));
  std::memcpy(impl_->rbuf.data(), f.component(1), f.points() * sizeof(double));
  fftw_execute(impl_->plan_r2c);
  std::memcpy(spec2.data(), impl_->cbuf.data(), impl_->cbuf.size() * sizeof(impl_->cbuf[0]));

  SpectralVelocity v(K_);
  const auto& entries = impl_->table->entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const auto a1 = impl_->read_amplitude(spec1.data(), e.idx.kx, e.idx.ky, e.idx.kz) * inv_n;
    const auto a2 = impl_->read_amplitude(spec2.data(), e.idx.kx, e.idx.ky, e.idx.kz) * inv_n;
    const double c1 = e.cosine ? kSqrt2 * a1.real() : -kSqrt2 * a1.imag();
    const double c2 = e.cosine ? kSqrt2 * a2.real() : -kSqrt2 * a2.imag();
    // gamma is the retained direction; for k_z != 0 the two components are
    // the axes themselves, for k_z = 0 this projects out the gradient part.
    v[i] = e.gamma[0] * c1 + e.gamma[1] * c2;
  }
  return v;
}

SpectralVelocity SpectralTransform::nonlinearity(const SpectralVelocity& v) {
  return nonlinearity(v, v);
}

SpectralVelocity SpectralTransform::nonlinearity(const SpectralVelocity& v1,
                                                 const SpectralVelocity& v2) {
  if (M_ < 3 * K_ + 1)
    throw std::invalid_argument("nonlinearity: dealiasing requires M >= 3K+1");
  const std::size_t n = static_cast<std::size_t>(M_) * M_ * M_;
  std::vector<double> a1(n), a2(n), w(n), g(n);
  PhysicalGridField prod(M_, 2);

  // Advecting fields from v1.
  impl_->scalar_grid(v1, Impl::Part::kComponent, 0, -1, a1.data());
  impl_->scalar_grid(v1, Impl::Part::kComponent, 1, -1, a2.data());
  impl_->scalar_grid(v1, Impl::Part::kVertical, 0, -1, w.data());

  // Accumulate (v1 . grad_xy) v2 + w(v1) dz v2 one derivative grid at a time.
  for (int comp = 0; comp < 2; ++comp) {
    double* out = prod.component(comp);
    impl_->scalar_grid(v2, Impl::Part::kComponent, comp, 0, g.data());
    for (std::size_t i = 0; i < n; ++i) out[i] = a1[i] * g[i];
    impl_->scalar_grid(v2, Impl::Part::kComponent, comp, 1, g.data());
    for (std::size_t i = 0; i < n; ++i) out[i] += a2[i] * g[i];
    impl_->scalar_grid(v2, Impl::Part::kComponent, comp, 2, g.data());
    for (std::size_t i = 0; i < n; ++i) out[i] += w[i] * g[i];
  }
  return analyze(prod);
}

}  // namespace pechaos
