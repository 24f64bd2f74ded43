#include "pechaos/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "pechaos/lagrangian.hpp"

namespace pechaos {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double f0_sinx(const Vec3& x) { return std::sin(kTwoPi * x.x); }
Vec3 g0_sinx(const Vec3& x) { return {kTwoPi * std::cos(kTwoPi * x.x), 0.0, 0.0}; }
double f0_siny(const Vec3& x) { return std::sin(kTwoPi * x.y); }
Vec3 g0_siny(const Vec3& x) { return {0.0, kTwoPi * std::cos(kTwoPi * x.y), 0.0}; }
double f0_sinz(const Vec3& x) { return std::sin(kTwoPi * x.z); }
Vec3 g0_sinz(const Vec3& x) { return {0.0, 0.0, kTwoPi * std::cos(kTwoPi * x.z)}; }

struct BlockSums {
  std::vector<double> a[3], c[3];       // QR log increments per block
  std::vector<double> pj, pj_e1, pj_e3, pjc;

  explicit BlockSums(int batches) {
    for (auto& v : a) v.assign(batches, 0.0);
    for (auto& v : c) v.assign(batches, 0.0);
    pj.assign(batches, 0.0);
    pj_e1.assign(batches, 0.0);
    pj_e3.assign(batches, 0.0);
    pjc.assign(batches, 0.0);
  }
};

struct TrajectoryResult {
  BlockSums blocks{1};
  double max_qr_proj_gap = 0.0;
  double max_det_drift = 0.0;
  std::int64_t clamp_events = 0;
  std::vector<double> scalar_sums;  // per sample index
};

struct ParticleBook {
  ParticleState state;
  double sum_logR_A1 = 0.0;
  double scalar_weight = 0.0;
  bool xi_is_e1 = false;
};

void run_one_trajectory(const EnsembleConfig& cfg, int traj, TrajectoryResult& out) {
  Stepper stepper(cfg.solver, cfg.noise, static_cast<std::uint64_t>(traj));
  FluidState state;
  state.v = SpectralVelocity(cfg.solver.K);

  if (cfg.burn_in > 0.0) stepper.simulate(state, cfg.burn_in, {});

  const double dt = cfg.solver.dt;
  const std::int64_t block_steps =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(cfg.horizon / dt)) /
                                    cfg.batches);
  const std::int64_t total_steps = block_steps * cfg.batches;
  const std::int64_t renorm_steps =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(cfg.renorm_interval / dt)));
  const std::int64_t sample_steps =
      std::max<std::int64_t>(1, total_steps / std::max(1, cfg.scalar_samples));

  const bool do_scalar = !cfg.scalar_f0.empty();
  const ScalarField f0 = do_scalar ? scalar_preset(cfg.scalar_f0) : ScalarField{};

  // Particle setup; positions from a dedicated uniform stream so particle
  // count does not disturb the noise draws.
  std::vector<ParticleBook> particles(cfg.particles);
  for (int i = 0; i < cfg.particles; ++i) {
    Philox4x32::Counter ctr = {static_cast<std::uint32_t>(i), 0x706f73u,
                               static_cast<std::uint32_t>(traj), 0x696e6974u};
    Philox4x32::Key key = {static_cast<std::uint32_t>(cfg.noise.seed),
                           static_cast<std::uint32_t>(cfg.noise.seed >> 32)};
    const auto u1 = philox_uniform2(ctr, key);
    ctr[3] ^= 0x5au;
    const auto u2 = philox_uniform2(ctr, key);
    auto& p = particles[i].state;
    p.x = {u1[0], u1[1], u2[0]};
    particles[i].xi_is_e1 = (i % 2 == 0);
    p.xi = particles[i].xi_is_e1 ? Vec3{1, 0, 0} : Vec3{0, 0, 1};
    if (do_scalar) {
      const Vec3 g = f0.gradient(p.x);
      const double gn = norm(g);
      particles[i].scalar_weight = gn;
      p.xi_check = gn > 0 ? g * (1.0 / gn) : Vec3{1, 0, 0};
    } else {
      p.xi_check = p.xi;
    }
  }

  out.blocks = BlockSums(cfg.batches);
  out.scalar_sums.assign(static_cast<std::size_t>(total_steps / sample_steps) + 1, 0.0);

  auto table = ModeTable::shared(cfg.solver.K);
  ParticleStepper pstep(table);
  StageField stage(table);
  ParticleStepOptions popt;

  // Block-boundary bookkeeping of the projective accumulators.
  std::vector<double> logJ_mark(cfg.particles, 0.0), logJc_mark(cfg.particles, 0.0);

  SpectralVelocity before = state.v;
  for (std::int64_t s = 0; s < total_steps; ++s) {
    before = state.v;
    stepper.step(state);
    stage.set(before, state.v);
    for (auto& pb : particles) pstep.step(pb.state, stage, dt, popt);

    const int block = static_cast<int>(s / block_steps);
    if ((s + 1) % renorm_steps == 0) {
      for (auto& pb : particles) {
        const double d = std::abs(det(pb.state.A)) - 1.0;
        out.max_det_drift =
            std::max(out.max_det_drift, std::abs(d) / (renorm_steps * dt));
        const auto rA = qr_renormalize(pb.state.A);
        const auto rC = qr_renormalize(pb.state.A_check);
        for (int j = 0; j < 3; ++j) {
          out.blocks.a[j][block] += rA[j];
          out.blocks.c[j][block] += rC[j];
        }
        pb.sum_logR_A1 += rA[0];
      }
    }
    if ((s + 1) % block_steps == 0) {
      for (int i = 0; i < cfg.particles; ++i) {
        const auto& p = particles[i].state;
        const double dJ = p.logJ - logJ_mark[i];
        out.blocks.pj[block] += dJ;
        (particles[i].xi_is_e1 ? out.blocks.pj_e1[block] : out.blocks.pj_e3[block]) += dJ;
        out.blocks.pjc[block] += p.logJ_check - logJc_mark[i];
        logJ_mark[i] = p.logJ;
        logJc_mark[i] = p.logJ_check;
      }
    }
    if (do_scalar && (s + 1) % sample_steps == 0) {
      const std::size_t si = static_cast<std::size_t>((s + 1) / sample_steps) - 1;
      double acc = 0.0;
      for (const auto& pb : particles) acc += pb.scalar_weight * std::exp(pb.state.logJ_check);
      out.scalar_sums[si] = acc;
    }
  }

  const double T = total_steps * dt;
  for (const auto& pb : particles) {
    out.clamp_events += pb.state.clamp_events;
    if (pb.xi_is_e1)
      out.max_qr_proj_gap =
          std::max(out.max_qr_proj_gap, std::abs(pb.state.logJ - pb.sum_logR_A1) / T);
  }
}

}  // namespace

ScalarField scalar_preset(const std::string& name) {
  if (name == "sinx") return {f0_sinx, g0_sinx};
  if (name == "siny") return {f0_siny, g0_siny};
  if (name == "sinz") return {f0_sinz, g0_sinz};
  throw std::invalid_argument("unknown scalar preset: " + name);
}

LyapunovSuiteResult run_lyapunov_suite(const EnsembleConfig& cfg) {
  if (cfg.trajectories < 1 || cfg.particles < 1)
    throw std::invalid_argument("run_lyapunov_suite: need >= 1 trajectory and particle");
  if (cfg.batches < 2) throw std::invalid_argument("run_lyapunov_suite: need >= 2 batches");

  std::vector<TrajectoryResult> results(cfg.trajectories);
  {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    const int workers = std::max(1, std::min(cfg.workers, cfg.trajectories));
    auto work = [&]() {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= cfg.trajectories) return;
        run_one_trajectory(cfg, t, results[t]);
      }
    };
    for (int wkr = 0; wkr < workers; ++wkr) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  const double dt = cfg.solver.dt;
  const std::int64_t block_steps =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(cfg.horizon / dt)) /
                                    cfg.batches);
  const double block_T = block_steps * dt;
  const double T_eff = block_T * cfg.batches;

  LyapunovSuiteResult suite;
  suite.T_effective = T_eff;

  const double np_all = static_cast<double>(cfg.trajectories) * cfg.particles;
  const double np_e1 = cfg.trajectories * ((cfg.particles + 1) / 2);
  const double np_e3 = cfg.trajectories * (cfg.particles / 2);

  auto collect = [&](auto member, double denom) {
    BatchMeans bm;
    for (int b = 0; b < cfg.batches; ++b) {
      double s = 0.0;
      for (const auto& r : results) s += member(r.blocks, b);
      bm.add(s / (denom * block_T));
    }
    return bm;
  };

  auto qr_bm = [&](const double* unused, int which, bool check) {
    (void)unused;
    return collect(
        [which, check](const BlockSums& bs, int b) {
          return check ? bs.c[which][b] : bs.a[which][b];
        },
        np_all);
  };

  for (int j = 0; j < 3; ++j) {
    suite.spectrum_A[j] = make_estimate("qr_A" + std::to_string(j + 1),
                                        qr_bm(nullptr, j, false), T_eff, cfg.renorm_interval);
    suite.spectrum_C[j] = make_estimate("qr_Acheck" + std::to_string(j + 1),
                                        qr_bm(nullptr, j, true), T_eff, cfg.renorm_interval);
  }
  suite.top_A = suite.spectrum_A[0];
  suite.top_A.estimator = "qr_top_A";
  suite.top_C = suite.spectrum_C[0];
  suite.top_C.estimator = "qr_top_Acheck";

  suite.proj_xi = make_estimate(
      "projective_xi", collect([](const BlockSums& b, int i) { return b.pj[i]; }, np_all), T_eff,
      cfg.renorm_interval);
  suite.proj_xi_check = make_estimate(
      "projective_xicheck", collect([](const BlockSums& b, int i) { return b.pjc[i]; }, np_all),
      T_eff, cfg.renorm_interval);
  suite.proj_xi_e1 = make_estimate(
      "projective_xi_e1", collect([](const BlockSums& b, int i) { return b.pj_e1[i]; }, np_e1),
      T_eff, cfg.renorm_interval);
  suite.proj_xi_e3 = make_estimate(
      "projective_xi_e3", collect([](const BlockSums& b, int i) { return b.pj_e3[i]; }, np_e3),
      T_eff, cfg.renorm_interval);

  for (const auto& r : results) {
    suite.qr_proj_gap = std::max(suite.qr_proj_gap, r.max_qr_proj_gap);
    suite.det_drift = std::max(suite.det_drift, r.max_det_drift);
    suite.clamp_events += r.clamp_events;
  }

  if (!cfg.scalar_f0.empty() && !results.empty()) {
    const std::size_t ns = results.front().scalar_sums.size();
    const std::int64_t total_steps = block_steps * cfg.batches;
    const std::int64_t sample_steps =
        std::max<std::int64_t>(1, total_steps / std::max(1, cfg.scalar_samples));
    for (std::size_t i = 0; i + 1 < ns; ++i) {
      double s = 0.0;
      for (const auto& r : results) s += r.scalar_sums[i];
      suite.scalar_curve.emplace_back(cfg.burn_in + (i + 1) * sample_steps * dt, s / np_all);
    }
    if (suite.scalar_curve.size() >= 3) suite.scalar_fit = fit_exponential_rate(suite.scalar_curve);
  }
  return suite;
}

LyapunovEstimate estimate_top(const EnsembleConfig& config, CocycleSelector which) {
  const auto suite = run_lyapunov_suite(config);
  return which == CocycleSelector::kJacobian ? suite.top_A : suite.top_C;
}

std::array<LyapunovEstimate, 3> estimate_spectrum(const EnsembleConfig& config,
                                                  CocycleSelector which) {
  const auto suite = run_lyapunov_suite(config);
  return which == CocycleSelector::kJacobian ? suite.spectrum_A : suite.spectrum_C;
}

LyapunovEstimate estimate_top_projective(const EnsembleConfig& config, ProjectiveSelector which) {
  const auto suite = run_lyapunov_suite(config);
  return which == ProjectiveSelector::kXi ? suite.proj_xi : suite.proj_xi_check;
}

}  // namespace pechaos
