#include "pechaos/diagnostics.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "pechaos/transform.hpp"

namespace pechaos {

namespace {

struct BlockAcc {
  std::vector<double> grad_sq, v_sq, lse_max, lse_sum;  // per block
  std::vector<std::int64_t> count;
  std::vector<std::vector<double>> lp_coarse, lp_fine, aniso;  // [p][block]
  std::vector<std::int64_t> quad_count;
  std::vector<double> mode_sq;

  BlockAcc(int batches, std::size_t n_lp, std::size_t n_modes, bool per_mode) {
    grad_sq.assign(batches, 0.0);
    v_sq.assign(batches, 0.0);
    lse_max.assign(batches, -std::numeric_limits<double>::infinity());
    lse_sum.assign(batches, 0.0);
    count.assign(batches, 0);
    lp_coarse.assign(n_lp, std::vector<double>(batches, 0.0));
    lp_fine.assign(n_lp, std::vector<double>(batches, 0.0));
    aniso.assign(n_lp, std::vector<double>(batches, 0.0));
    quad_count.assign(batches, 0);
    if (per_mode) mode_sq.assign(n_modes, 0.0);
  }
};

MeanWithCI from_batches(const BatchMeans& bm) {
  return {bm.mean(), bm.half_width_95(), bm.n()};
}

void run_one(const StationaryConfig& cfg, int traj, double eta, BlockAcc& acc) {
  Stepper stepper(cfg.solver, cfg.noise, static_cast<std::uint64_t>(traj));
  FluidState state;
  state.v = SpectralVelocity(cfg.solver.K);
  if (cfg.burn_in > 0.0) stepper.simulate(state, cfg.burn_in, {});

  const double dt = cfg.solver.dt;
  const std::int64_t block_steps = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::llround(cfg.horizon / dt)) / cfg.batches);
  const std::int64_t total_steps = block_steps * cfg.batches;

  const int coarse = dealias_grid(cfg.solver.K);
  const int fine = next_fast_grid(2 * coarse);
  std::optional<SpectralTransform> tf_coarse, tf_fine;
  if (!cfg.lp_exponents.empty())
    tf_coarse.emplace(cfg.solver.K, coarse), tf_fine.emplace(cfg.solver.K, fine);

  for (std::int64_t s = 0; s < total_steps; ++s) {
    stepper.step(state);
    const int b = static_cast<int>(s / block_steps);
    const double g2 = grad_l2_norm(state.v);
    const double l2 = l2_norm(state.v);
    acc.grad_sq[b] += g2 * g2;
    acc.v_sq[b] += l2 * l2;
    // exp moment accumulated in log space per block
    const double e = eta * l2 * l2;
    if (e > acc.lse_max[b]) {
      acc.lse_sum[b] = acc.lse_sum[b] * std::exp(acc.lse_max[b] - e) + 1.0;
      acc.lse_max[b] = e;
    } else {
      acc.lse_sum[b] += std::exp(e - acc.lse_max[b]);
    }
    acc.count[b] += 1;
    if (!acc.mode_sq.empty())
      for (std::size_t i = 0; i < state.v.size(); ++i)
        acc.mode_sq[i] += state.v[i] * state.v[i];

    if (!cfg.lp_exponents.empty() && (s + 1) % cfg.sample_interval == 0) {
      for (std::size_t pi = 0; pi < cfg.lp_exponents.size(); ++pi) {
        const double p = cfg.lp_exponents[pi];
        acc.lp_coarse[pi][b] += lp_gradient_integral(*tf_coarse, state.v, p);
        acc.lp_fine[pi][b] += lp_gradient_integral(*tf_fine, state.v, p);
        if (cfg.aniso_stats && p < 4.0 / 3.0 + 1e-12)
          acc.aniso[pi][b] += anisotropic_dzv_integral(*tf_coarse, state.v, p);
      }
      acc.quad_count[b] += 1;
    }
  }
}

}  // namespace

double lp_gradient_integral(const SpectralVelocity& v, double p, int grid) {
  SpectralTransform tf(v.truncation(), grid);
  return lp_gradient_integral(tf, v, p);
}

double lp_gradient_integral(SpectralTransform& tf, const SpectralVelocity& v, double p) {
  auto g = tf.synthesize_gradient_u(v);
  const std::size_t n = g.points();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f2 = 0.0;
    for (int c = 0; c < 9; ++c) {
      const double x = g.component(c)[i];
      f2 += x * x;
    }
    acc += std::pow(f2, 0.5 * p);
  }
  return acc / static_cast<double>(n);
}

double anisotropic_dzv_integral(const SpectralVelocity& v, double p, int grid) {
  SpectralTransform tf(v.truncation(), grid);
  return anisotropic_dzv_integral(tf, v, p);
}

double anisotropic_dzv_integral(SpectralTransform& tf, const SpectralVelocity& v, double p) {
  auto g = tf.synthesize_gradient_u(v);  // components 2 and 5 are dz v
  const int M = tf.grid_size();
  double acc = 0.0;
  for (int iy = 0; iy < M; ++iy)
    for (int ix = 0; ix < M; ++ix) {
      double colmax = 0.0;
      for (int iz = 0; iz < M; ++iz) {
        const double a = g.at(2, ix, iy, iz);
        const double b = g.at(5, ix, iy, iz);
        colmax = std::max(colmax, a * a + b * b);
      }
      acc += std::pow(colmax, 0.5 * p);
    }
  return acc / static_cast<double>(M * M);
}

StationaryReport run_stationary(const StationaryConfig& cfg) {
  if (cfg.batches < 2) throw std::invalid_argument("run_stationary: need >= 2 batches");
  const double E0 = injected_energy(NoiseSpec{cfg.noise.alpha, cfg.noise.amplitude,
                                              cfg.solver.K, cfg.noise.seed});
  const double eta = E0 > 0.0 ? 1.0 / (2.0 * E0) : 0.0;
  const std::size_t n_modes = static_cast<std::size_t>(mode_count(cfg.solver.K));

  std::vector<BlockAcc> accs;
  accs.reserve(cfg.trajectories);
  for (int t = 0; t < cfg.trajectories; ++t)
    accs.emplace_back(cfg.batches, cfg.lp_exponents.size(), n_modes, cfg.per_mode_stats);

  {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    const int workers = std::max(1, std::min(cfg.workers, cfg.trajectories));
    auto work = [&]() {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= cfg.trajectories) return;
        run_one(cfg, t, eta, accs[t]);
      }
    };
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  StationaryReport rep;
  rep.E0 = E0;
  rep.eta = eta;

  BatchMeans bm_grad, bm_v, bm_exp;
  std::vector<BatchMeans> bm_lpc(cfg.lp_exponents.size()), bm_lpf(cfg.lp_exponents.size()),
      bm_an(cfg.lp_exponents.size());
  std::int64_t steps = 0;
  for (int b = 0; b < cfg.batches; ++b) {
    double g = 0, v = 0, lsum = 0, lmax = -std::numeric_limits<double>::infinity();
    std::int64_t n = 0, nq = 0;
    for (const auto& a : accs) {
      g += a.grad_sq[b];
      v += a.v_sq[b];
      n += a.count[b];
      nq += a.quad_count[b];
      lmax = std::max(lmax, a.lse_max[b]);
    }
    for (const auto& a : accs)
      if (a.count[b] > 0) lsum += a.lse_sum[b] * std::exp(a.lse_max[b] - lmax);
    bm_grad.add(g / n);
    bm_v.add(v / n);
    bm_exp.add(std::exp(lmax) * lsum / n);
    steps += n;
    for (std::size_t pi = 0; pi < cfg.lp_exponents.size(); ++pi) {
      if (nq == 0) continue;
      double c = 0, f = 0, an = 0;
      for (const auto& a : accs) {
        c += a.lp_coarse[pi][b];
        f += a.lp_fine[pi][b];
        an += a.aniso[pi][b];
      }
      bm_lpc[pi].add(c / nq);
      bm_lpf[pi].add(f / nq);
      bm_an[pi].add(an / nq);
    }
  }

  rep.grad_sq = from_batches(bm_grad);
  rep.v_sq = from_batches(bm_v);
  rep.exp_moment = from_batches(bm_exp);
  rep.steps = steps;
  rep.T_effective = steps * cfg.solver.dt;
  for (std::size_t pi = 0; pi < cfg.lp_exponents.size(); ++pi) {
    LpMoment m;
    m.p = cfg.lp_exponents[pi];
    m.coarse = from_batches(bm_lpc[pi]);
    m.fine = from_batches(bm_lpf[pi]);
    m.grid_ratio = m.coarse.mean != 0.0 ? m.fine.mean / m.coarse.mean : 0.0;
    rep.lp.push_back(m);
    if (cfg.aniso_stats && m.p < 4.0 / 3.0 + 1e-12)
      rep.aniso.push_back({m.p, from_batches(bm_an[pi])});
  }
  if (cfg.per_mode_stats) {
    rep.mode_mean_sq.assign(n_modes, 0.0);
    for (const auto& a : accs)
      for (std::size_t i = 0; i < n_modes; ++i) rep.mode_mean_sq[i] += a.mode_sq[i];
    for (auto& x : rep.mode_mean_sq) x /= static_cast<double>(steps);
  }
  return rep;
}

EnergyBalanceReport energy_balance(const StationaryReport& rep) {
  EnergyBalanceReport r;
  r.measured = rep.grad_sq.mean;
  r.target = rep.E0 / 2.0;
  r.relative_error = r.target != 0.0 ? std::abs(r.measured - r.target) / r.target : r.measured;
  r.detail = rep.grad_sq;
  return r;
}

SpectralVelocity random_field(int K, double slope, std::uint64_t seed, std::uint64_t id) {
  SpectralVelocity v(K);
  NormalStream stream(seed, 0xf1e1d5ull ^ (id << 20));
  NormalCursor draws(stream, 0);
  const auto& tab = v.table();
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::pow(tab[i].k2, -0.5 * slope) * draws.next();
  const double n = l2_norm(v);
  if (n > 0) v *= 1.0 / n;
  return v;
}

NonlinearityProbe nonlinearity_bound_probe(int K, int samples, double slope, std::uint64_t seed) {
  NonlinearityProbe probe;
  probe.samples = samples;
  SpectralTransform tf(K, dealias_grid(K));
  for (int s = 0; s < samples; ++s) {
    const auto v1 = random_field(K, slope, seed, 2 * s);
    const auto v2 = random_field(K, slope, seed, 2 * s + 1);
    const auto b = tf.nonlinearity(v1, v2);
    const double b_l2 = l2_norm(b), b_h1 = sobolev_norm(b, 1.0), b_h2 = sobolev_norm(b, 2.0);
    const double n32_1 = sobolev_norm(v1, 1.5), n32_2 = sobolev_norm(v2, 1.5);
    const double n52_1 = sobolev_norm(v1, 2.5), n52_2 = sobolev_norm(v2, 2.5);
    const double n225_1 = sobolev_norm(v1, 2.25), n225_2 = sobolev_norm(v2, 2.25);
    const double n3_1 = sobolev_norm(v1, 3.0), n3_2 = sobolev_norm(v2, 3.0);
    probe.max_ratio_l2 = std::max(probe.max_ratio_l2, b_l2 / (n32_1 * n32_2));
    probe.max_ratio_h1 = std::max(probe.max_ratio_h1, b_h1 / (n52_1 * n32_2 + n32_1 * n52_2));
    probe.max_ratio_h1_eps = std::max(probe.max_ratio_h1_eps, b_h1 / (n225_1 * n225_2));
    probe.max_ratio_h2 = std::max(probe.max_ratio_h2, b_h2 / (n3_1 * n3_2));
  }
  return probe;
}

}  // namespace pechaos
