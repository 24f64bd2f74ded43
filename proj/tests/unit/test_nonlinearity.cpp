#include "doctest.h"

#include <cmath>

#include "pechaos/diagnostics.hpp"
#include "pechaos/transform.hpp"
#include "support/ns2d.hpp"

using namespace pechaos;

TEST_CASE("b(0,0) = 0") {
  SpectralTransform tf(2, dealias_grid(2));
  SpectralVelocity zero(2);
  CHECK(l2_norm(tf.nonlinearity(zero)) == 0.0);
}

TEST_CASE("energy cancellation <b(v,v), v> = 0") {
  const int K = 3;
  SpectralTransform tf(K, dealias_grid(K));
  for (int s = 0; s < 50; ++s) {
    auto v = random_field(K, 0.8, 1000 + s);
    v *= 0.5 + 0.1 * s;  // exercise a range of amplitudes
    const auto b = tf.nonlinearity(v);
    const double h1 = sobolev_norm(v, 1.0);
    CHECK(std::abs(inner_product(b, v)) <= 1e-10 * h1 * h1 * h1);
  }
}

TEST_CASE("dealiased products do not depend on the padding") {
  const int K = 3;
  SpectralTransform small(K, dealias_grid(K));
  SpectralTransform big(K, next_fast_grid(5 * K + 1));
  const auto v = random_field(K, 0.7, 77);
  const auto b1 = small.nonlinearity(v);
  const auto b2 = big.nonlinearity(v);
  double worst = 0.0;
  for (std::size_t i = 0; i < b1.size(); ++i) worst = std::max(worst, std::abs(b1[i] - b2[i]));
  CHECK(worst < 1e-13);
}

TEST_CASE("undersized grid is rejected") {
  const int K = 3;
  SpectralTransform tf(K, next_fast_grid(2 * K + 1));
  CHECK_THROWS(tf.nonlinearity(SpectralVelocity(K)));
}

TEST_CASE("z-independent fields reproduce the 2D Navier-Stokes nonlinearity") {
  const int K = 3;
  SpectralTransform tf(K, dealias_grid(K));
  // random field restricted to k_z = 0: automatically 2D divergence-free
  auto v = random_field(K, 0.9, 31337);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v.table()[i].idx.kz != 0) v[i] = 0.0;

  const auto b3d = tf.nonlinearity(v);
  const auto b2d = ns2d::to_spectral(ns2d::nonlinearity(ns2d::from_spectral(v)));
  double worst = 0.0;
  for (std::size_t i = 0; i < b3d.size(); ++i)
    worst = std::max(worst, std::abs(b3d[i] - b2d[i]));
  CHECK(worst < 1e-10);
  // and the result stays z-independent
  for (std::size_t i = 0; i < b3d.size(); ++i)
    if (v.table()[i].idx.kz != 0) CHECK(std::abs(b3d[i]) < 1e-13);
}

TEST_CASE("bilinearity and scaling of the estimate ratio") {
  const int K = 2;
  SpectralTransform tf(K, dealias_grid(K));
  const auto v1 = random_field(K, 1.0, 8);
  const auto v2 = random_field(K, 1.0, 9);
  const auto b = tf.nonlinearity(v1, v2);
  auto v1s = v1;
  v1s *= 3.0;
  auto v2s = v2;
  v2s *= 0.5;
  const auto bs = tf.nonlinearity(v1s, v2s);
  double worst = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i)
    worst = std::max(worst, std::abs(bs[i] - 1.5 * b[i]));
  CHECK(worst < 1e-12);

  const double r1 = l2_norm(b) / (sobolev_norm(v1, 1.5) * sobolev_norm(v2, 1.5));
  const double r2 = l2_norm(bs) / (sobolev_norm(v1s, 1.5) * sobolev_norm(v2s, 1.5));
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));
}

TEST_CASE("nonlinearity probe reports bounded ratios") {
  const auto probe = nonlinearity_bound_probe(2, 20, 1.0, 4242);
  CHECK(probe.max_ratio_l2 > 0.0);
  CHECK(probe.max_ratio_l2 < 10.0);
  CHECK(probe.max_ratio_h1 < 20.0);
  CHECK(probe.max_ratio_h1_eps < 20.0);
  CHECK(probe.max_ratio_h2 < 20.0);
}
