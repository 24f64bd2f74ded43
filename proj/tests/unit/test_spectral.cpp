#include "doctest.h"

#include <cmath>
#include <vector>

#include "pechaos/diagnostics.hpp"
#include "pechaos/evaluate.hpp"
#include "pechaos/transform.hpp"

using namespace pechaos;

namespace {

double quad_basis_l2(const ModeIndex& m, int N) {
  double acc = 0.0;
  for (int iz = 0; iz < N; ++iz)
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < N; ++ix) {
        const double e = basis_eval(m, {double(ix) / N, double(iy) / N, double(iz) / N});
        acc += e * e;
      }
  return acc / (double(N) * N * N);
}

double grid_inner(const PhysicalGridField& a, const PhysicalGridField& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) acc += a.samples[i] * b.samples[i];
  return acc / double(a.points());
}

}  // namespace

TEST_CASE("basis values at the origin") {
  CHECK(basis_eval({1, 2, 3, 1}, {0, 0, 0}) == doctest::Approx(std::sqrt(2.0)));  // cosine branch
  CHECK(basis_eval({1, 2, -3, 1}, {0, 0, 0}) == doctest::Approx(0.0));            // sine branch
  CHECK_THROWS(basis_eval({1, 0, 0, 2}, {0, 0, 0}));
}

TEST_CASE("basis normalization by quadrature") {
  for (const ModeIndex m : {ModeIndex{1, 0, 0, 1}, ModeIndex{0, 2, 0, 1}, ModeIndex{1, -1, 2, 2},
                            ModeIndex{-2, 1, -1, 1}, ModeIndex{0, 0, 3, 2}}) {
    CHECK(std::abs(quad_basis_l2(m, 16) - 1.0) < 1e-12);
  }
}

TEST_CASE("basis family is orthonormal (Gram matrix by quadrature)") {
  const int K = 2;
  const int M = 15;  // products are band-limited by 2K, so this grid is exact
  ModeTable tab(K);
  SpectralTransform tf(K, M);
  std::vector<PhysicalGridField> fields;
  fields.reserve(tab.size());
  for (std::size_t i = 0; i < tab.size(); ++i) {
    SpectralVelocity v(K);
    v[i] = 1.0;
    fields.push_back(tf.synthesize(v));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < fields.size(); ++i)
    for (std::size_t j = i; j < fields.size(); ++j) {
      const double g = grid_inner(fields[i], fields[j]);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("synthesis of a single mode matches direct evaluation") {
  const int K = 3, M = 12;
  SpectralTransform tf(K, M);
  ModeTable tab(K);
  for (std::size_t i = 0; i < tab.size(); i += 37) {
    SpectralVelocity v(K);
    v[i] = 1.37;
    const auto f = tf.synthesize(v);
    const auto g = gamma_vector(tab[i].idx);
    double worst = 0.0;
    for (int iz = 0; iz < M; ++iz)
      for (int iy = 0; iy < M; ++iy)
        for (int ix = 0; ix < M; ++ix) {
          const Vec3 x{double(ix) / M, double(iy) / M, double(iz) / M};
          const double e = 1.37 * basis_eval(tab[i].idx, x);
          worst = std::max(worst, std::abs(f.at(0, ix, iy, iz) - g[0] * e));
          worst = std::max(worst, std::abs(f.at(1, ix, iy, iz) - g[1] * e));
        }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("analyze is a left inverse of synthesize") {
  const int K = 3;
  SpectralTransform tf(K, 12);
  const auto v = random_field(K, 1.0, 99);
  const auto back = tf.analyze(tf.synthesize(v));
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(v[i] - back[i]));
  CHECK(worst < 1e-12);
}

TEST_CASE("projection annihilates horizontal gradients of z-independent potentials") {
  const int K = 3, M = 12;
  SpectralTransform tf(K, M);
  // psi = combination of 2D trig modes; f = grad_xy psi sampled on the grid
  PhysicalGridField f(M, 2);
  const double two_pi = 2.0 * M_PI;
  for (int iz = 0; iz < M; ++iz)
    for (int iy = 0; iy < M; ++iy)
      for (int ix = 0; ix < M; ++ix) {
        const double x = double(ix) / M, y = double(iy) / M;
        // psi = sin(2pi(x+2y)) + 0.3 cos(2pi(2x - y))
        f.at(0, ix, iy, iz) = two_pi * std::cos(two_pi * (x + 2 * y)) -
                              0.3 * two_pi * 2 * std::sin(two_pi * (2 * x - y));
        f.at(1, ix, iy, iz) = 2 * two_pi * std::cos(two_pi * (x + 2 * y)) +
                              0.3 * two_pi * std::sin(two_pi * (2 * x - y));
      }
  const auto v = tf.analyze(f);
  CHECK(l2_norm(v) < 1e-12);
}

TEST_CASE("projection is idempotent and symmetric") {
  const int K = 2, M = 12;
  SpectralTransform tf(K, M);
  NormalStream stream(7, 1);
  NormalCursor draws(stream, 0);
  PhysicalGridField f(M, 2), g(M, 2);
  for (auto& x : f.samples) x = draws.next();
  for (auto& x : g.samples) x = draws.next();
  const auto vf = tf.analyze(f);
  const auto vg = tf.analyze(g);
  // idempotence
  const auto vf2 = tf.analyze(tf.synthesize(vf));
  double worst = 0.0;
  for (std::size_t i = 0; i < vf.size(); ++i) worst = std::max(worst, std::abs(vf[i] - vf2[i]));
  CHECK(worst < 1e-12);
  // symmetry <Pf, g> = <f, Pg>
  const double a = grid_inner(tf.synthesize(vf), g);
  const double b = grid_inner(f, tf.synthesize(vg));
  CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(a)));
}

TEST_CASE("constraint closure of random fields") {
  const int K = 3, M = 15;
  SpectralTransform tf(K, M);
  const auto v = random_field(K, 1.2, 5);
  const auto f = tf.synthesize(v);
  double mean0 = 0, mean1 = 0;
  for (std::size_t i = 0; i < f.points(); ++i) {
    mean0 += f.component(0)[i];
    mean1 += f.component(1)[i];
  }
  CHECK(std::abs(mean0 / double(f.points())) < 1e-12);
  CHECK(std::abs(mean1 / double(f.points())) < 1e-12);

  // barotropic divergence: z-average of div_xy v vanishes pointwise
  const auto g = tf.synthesize_gradient_u(v);
  double worst = 0.0;
  for (int iy = 0; iy < M; ++iy)
    for (int ix = 0; ix < M; ++ix) {
      double col = 0.0;
      for (int iz = 0; iz < M; ++iz) col += g.at(0, ix, iy, iz) + g.at(4, ix, iy, iz);
      worst = std::max(worst, std::abs(col / M));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("vertical velocity closed form for one oblique mode") {
  const int K = 2;
  SpectralVelocity v(K);
  const double vc = 0.8;
  v.set_coeff({1, 0, 1, 1}, vc);
  // w = -vc (e_k(x) - e_k(x,y,0)) = -vc sqrt(2) (cos(2pi(x+z)) - cos(2pi x))
  PointEvaluator eval(v.table_ptr());
  const double s2 = std::sqrt(2.0);
  for (const Vec3 x : {Vec3{0.13, 0.82, 0.31}, Vec3{0.5, 0.25, 0.77}, Vec3{0.0, 0.0, 0.5}}) {
    const double expected = -vc * s2 * (std::cos(2 * M_PI * (x.x + x.z)) - std::cos(2 * M_PI * x.x));
    CHECK(std::abs(eval.vertical_velocity(v.coeffs(), x) - expected) < 1e-12);
  }
}

TEST_CASE("vertical velocity equals the divergence integral") {
  const int K = 2;
  const auto v = random_field(K, 1.0, 42);
  PointEvaluator eval(v.table_ptr());
  // Simpson quadrature of -int_0^z div_xy v dz'
  auto div_xy = [&](const Vec3& x) {
    const FlowSample s = eval.sample(v.coeffs(), x);
    return s.grad_u(0, 0) + s.grad_u(1, 1);
  };
  for (const Vec3 x : {Vec3{0.2, 0.6, 0.37}, Vec3{0.9, 0.1, 0.83}}) {
    const int n = 2048;  // even
    const double h = x.z / n;
    double acc = div_xy({x.x, x.y, 0.0}) + div_xy({x.x, x.y, x.z});
    for (int i = 1; i < n; ++i)
      acc += div_xy({x.x, x.y, i * h}) * ((i % 2) ? 4.0 : 2.0);
    const double integral = acc * h / 3.0;
    CHECK(std::abs(eval.vertical_velocity(v.coeffs(), x) + integral) < 1e-10);
  }
}

TEST_CASE("vertical velocity vanishes at the plates and for barotropic fields") {
  const int K = 3;
  const auto v = random_field(K, 1.0, 21);
  PointEvaluator eval(v.table_ptr());
  for (double x = 0.05; x < 1.0; x += 0.23)
    for (double y = 0.02; y < 1.0; y += 0.31) {
      CHECK(std::abs(eval.vertical_velocity(v.coeffs(), {x, y, 0.0})) < 1e-12);
      CHECK(std::abs(eval.vertical_velocity(v.coeffs(), {x, y, 1.0})) < 1e-12);
    }
  // z-independent field: zero out all k_z != 0 modes
  SpectralVelocity flat = v;
  for (std::size_t i = 0; i < flat.size(); ++i)
    if (flat.table()[i].idx.kz != 0) flat[i] = 0.0;
  for (const Vec3 x : {Vec3{0.3, 0.4, 0.5}, Vec3{0.8, 0.2, 0.9}})
    CHECK(std::abs(vertical_velocity(flat, x)) < 1e-13);
}

TEST_CASE("velocity gradient: trace-free and consistent with finite differences") {
  const int K = 2;
  const auto v = random_field(K, 1.0, 3);
  PointEvaluator eval(v.table_ptr());
  const Vec3 x{0.37, 0.11, 0.52};
  const FlowSample s = eval.sample(v.coeffs(), x);
  CHECK(std::abs(s.grad_u(0, 0) + s.grad_u(1, 1) + s.grad_u(2, 2)) < 1e-12);

  auto fd_col = [&](int j, double h) {
    Vec3 xp = x, xm = x;
    (&xp.x)[j] += h;
    (&xm.x)[j] -= h;
    const Vec3 up = eval.velocity(v.coeffs(), xp);
    const Vec3 um = eval.velocity(v.coeffs(), xm);
    return (up - um) * (1.0 / (2.0 * h));
  };
  double err_h = 0.0, err_h2 = 0.0;
  for (int j = 0; j < 3; ++j) {
    const Vec3 c1 = fd_col(j, 1e-4), c2 = fd_col(j, 5e-5);
    for (int i = 0; i < 3; ++i) {
      err_h = std::max(err_h, std::abs(c1[i] - s.grad_u(i, j)));
      err_h2 = std::max(err_h2, std::abs(c2[i] - s.grad_u(i, j)));
    }
  }
  CHECK(err_h < 1e-4);
  CHECK(err_h / err_h2 > 3.0);  // second-order decay of the FD residual
  CHECK(err_h / err_h2 < 5.0);

  SpectralVelocity zero(K);
  const FlowSample z = eval.sample(zero.coeffs(), x);
  CHECK(norm(z.u) == 0.0);
  CHECK(frobenius_norm(z.grad_u) == 0.0);
}

TEST_CASE("point evaluator agrees with grid synthesis") {
  const int K = 3, M = 12;
  SpectralTransform tf(K, M);
  const auto v = random_field(K, 0.8, 17);
  PointEvaluator eval(v.table_ptr());
  const auto f = tf.synthesize_full(v);
  double worst = 0.0;
  for (int iz = 0; iz < M; iz += 3)
    for (int iy = 0; iy < M; iy += 3)
      for (int ix = 0; ix < M; ix += 3) {
        const Vec3 x{double(ix) / M, double(iy) / M, double(iz) / M};
        const Vec3 u = eval.velocity(v.coeffs(), x);
        worst = std::max(worst, std::abs(u.x - f.at(0, ix, iy, iz)));
        worst = std::max(worst, std::abs(u.y - f.at(1, ix, iy, iz)));
        worst = std::max(worst, std::abs(u.z - f.at(2, ix, iy, iz)));
      }
  CHECK(worst < 1e-12);
}

TEST_CASE("sobolev norms") {
  const int K = 2;
  SpectralVelocity v(K);
  v.set_coeff({1, 1, 1, 2}, 1.0);
  CHECK(sobolev_norm(v, 0.0) == doctest::Approx(1.0));
  // s = 0 equals the grid L2 norm
  const auto w = random_field(K, 1.0, 11);
  SpectralTransform tf(K, 12);
  const auto f = tf.synthesize(w);
  double acc = 0.0;
  for (double s : f.samples) acc += s * s;
  acc /= double(f.points());
  CHECK(std::abs(std::sqrt(acc) - sobolev_norm(w, 0.0)) < 1e-10);
  // homogeneity
  SpectralVelocity w2 = w;
  w2 *= 2.0;
  CHECK(sobolev_norm(w2, 1.7) == doctest::Approx(2.0 * sobolev_norm(w, 1.7)).epsilon(1e-12));
  // monotone in s for the inhomogeneous multiplier
  CHECK(sobolev_norm(w, 2.0) >= sobolev_norm(w, 1.0));
  // grad norm is the homogeneous H^1 seminorm
  SpectralVelocity one(K);
  one.set_coeff({1, 0, 0, 1}, 1.0);
  CHECK(grad_l2_norm(one) == doctest::Approx(2.0 * M_PI));
}
