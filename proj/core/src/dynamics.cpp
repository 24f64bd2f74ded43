#include "pechaos/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace pechaos {

namespace {

double phi1(double z) {
  if (std::abs(z) < 1e-12) return 1.0 + 0.5 * z;
  return std::expm1(z) / z;
}

}  // namespace

SolverMode solver_mode_from_string(const std::string& s) {
  if (s == "stochastic") return SolverMode::kStochastic;
  if (s == "deterministic") return SolverMode::kDeterministic;
  if (s == "controlled") return SolverMode::kControlled;
  throw std::invalid_argument("unknown solver mode: " + s);
}

std::string to_string(SolverMode m) {
  switch (m) {
    case SolverMode::kStochastic: return "stochastic";
    case SolverMode::kDeterministic: return "deterministic";
    case SolverMode::kControlled: return "controlled";
  }
  return "?";
}

SampledTrajectory::SampledTrajectory(std::vector<double> times,
                                     std::vector<SpectralVelocity> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() < 2 || times_.size() != values_.size())
    throw std::invalid_argument("SampledTrajectory: need >= 2 matching nodes");
  slopes_.reserve(times_.size());
  const std::size_t n = times_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? i : i + 1;
    SpectralVelocity s(values_[i].truncation());
    const double denom = times_[hi] - times_[lo];
    for (std::size_t m = 0; m < s.size(); ++m)
      s[m] = (values_[hi][m] - values_[lo][m]) / denom;
    slopes_.push_back(std::move(s));
  }
}

void SampledTrajectory::hermite(double t, SpectralVelocity* val, SpectralVelocity* deriv) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  i = std::min(i, times_.size() - 2);
  const double h = times_[i + 1] - times_[i];
  const double s = std::clamp((t - times_[i]) / h, 0.0, 1.0);
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  const double d00 = 6 * s * (s - 1) / h, d10 = (3 * s - 1) * (s - 1);
  const double d01 = -6 * s * (s - 1) / h, d11 = s * (3 * s - 2);
  const auto& p0 = values_[i];
  const auto& p1 = values_[i + 1];
  const auto& m0 = slopes_[i];
  const auto& m1 = slopes_[i + 1];
  for (std::size_t m = 0; m < p0.size(); ++m) {
    if (val) (*val)[m] = h00 * p0[m] + h10 * h * m0[m] + h01 * p1[m] + h11 * h * m1[m];
    if (deriv) (*deriv)[m] = d00 * p0[m] + d10 * m0[m] + d01 * p1[m] + d11 * m1[m];
  }
}

void SampledTrajectory::value(double t, SpectralVelocity& out) const { hermite(t, &out, nullptr); }
void SampledTrajectory::derivative(double t, SpectralVelocity& out) const {
  hermite(t, nullptr, &out);
}

ResidualControl::ResidualControl(std::shared_ptr<const AnalyticTrajectory> traj, NoiseSpec noise,
                                 double viscosity)
    : traj_(std::move(traj)), noise_(noise), viscosity_(viscosity),
      scratch_val_(traj_->truncation()), scratch_der_(traj_->truncation()) {
  if (!noise_.enabled())
    throw std::invalid_argument("ResidualControl: q = 0, control synthesis impossible");
  transform_ = std::make_unique<SpectralTransform>(traj_->truncation(),
                                                   dealias_grid(traj_->truncation()));
}

void ResidualControl::qg(double t, std::span<double> out) const {
  traj_->value(t, scratch_val_);
  traj_->derivative(t, scratch_der_);
  const auto b = transform_->nonlinearity(scratch_val_);
  const auto& tab = scratch_val_.table();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = scratch_der_[i] + viscosity_ * tab[i].lambda * scratch_val_[i] + b[i];
}

SpectralVelocity ResidualControl::g(double t) const {
  SpectralVelocity r(traj_->truncation());
  qg(t, r.coeffs());
  const auto& tab = r.table();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double q = q_coefficient(noise_, tab[i].idx);
    r[i] /= q;
  }
  return r;
}

Stepper::Stepper(SolverConfig config, NoiseSpec noise, std::uint64_t trajectory_id)
    : config_(config), noise_(noise), table_(ModeTable::shared(config.K)),
      stream_(noise.seed, trajectory_id), predictor_(config.K) {
  if (!(config_.dt > 0.0)) throw std::invalid_argument("Stepper: dt must be positive");
  noise_.K = config_.K;
  transform_ = std::make_unique<SpectralTransform>(config_.K, dealias_grid(config_.K));
  const std::size_t n = table_->size();
  decay_.resize(n);
  phi1dt_.resize(n);
  ou_std_.resize(n);
  decay_half_.resize(n);
  phi1dt_half_.resize(n);
  qg_buf_.resize(n);
  b_buf_.resize(n);
  const double h = config_.dt;
  for (std::size_t i = 0; i < n; ++i) {
    const double lam = config_.viscosity * (*table_)[i].lambda;
    decay_[i] = std::exp(-lam * h);
    phi1dt_[i] = h * phi1(-lam * h);
    decay_half_[i] = std::exp(-lam * h * 0.5);
    phi1dt_half_[i] = 0.5 * h * phi1(-lam * h * 0.5);
    const double q = q_coefficient(noise_, (*table_)[i].idx);
    ou_std_[i] = noise_.enabled() ? ou_step_stddev(q, lam, h) : 0.0;
  }
}

void Stepper::check_cfl(const FluidState& state) {
  auto grid = transform_->synthesize_full(state.v);
  double umax2 = 0.0;
  const std::size_t n = grid.points();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = grid.component(0)[i], b = grid.component(1)[i], c = grid.component(2)[i];
    umax2 = std::max(umax2, a * a + b * b + c * c);
  }
  const double dx = 1.0 / grid.M;
  const double courant = std::sqrt(umax2) * config_.dt / dx;
  if (courant > config_.cfl_limit)
    throw SafeguardError("advective CFL violated: u_max*dt/dx = " + std::to_string(courant) +
                         " at t = " + std::to_string(state.t));
}

void Stepper::step(FluidState& state) {
  const std::size_t n = table_->size();
  const double h = config_.dt;
  auto& v = state.v;

  if (config_.cfl_interval > 0 && step_index_ % static_cast<std::uint64_t>(config_.cfl_interval) == 0)
    check_cfl(state);

  if (config_.mode == SolverMode::kControlled) {
    if (!control_) throw std::invalid_argument("controlled mode requires a ControlInput");
    // Exponential midpoint rule; the forcing enters at the step midpoint.
    if (config_.nonlinearity) {
      const auto b = transform_->nonlinearity(v);
      for (std::size_t i = 0; i < n; ++i) b_buf_[i] = b[i];
    } else {
      std::fill(b_buf_.begin(), b_buf_.end(), 0.0);
    }
    control_->qg(state.t, qg_buf_);
    for (std::size_t i = 0; i < n; ++i)
      predictor_[i] = decay_half_[i] * v[i] + phi1dt_half_[i] * (qg_buf_[i] - b_buf_[i]);
    if (config_.nonlinearity) {
      const auto bm = transform_->nonlinearity(predictor_);
      for (std::size_t i = 0; i < n; ++i) b_buf_[i] = bm[i];
    }
    control_->qg(state.t + 0.5 * h, qg_buf_);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = decay_[i] * v[i] + phi1dt_[i] * (qg_buf_[i] - b_buf_[i]);
  } else {
    if (config_.nonlinearity) {
      const auto b = transform_->nonlinearity(v);
      for (std::size_t i = 0; i < n; ++i) b_buf_[i] = b[i];
    } else {
      std::fill(b_buf_.begin(), b_buf_.end(), 0.0);
    }
    if (config_.mode == SolverMode::kStochastic && noise_.enabled()) {
      NormalCursor draws(stream_, step_index_);
      for (std::size_t i = 0; i < n; ++i)
        v[i] = decay_[i] * v[i] - phi1dt_[i] * b_buf_[i] + ou_std_[i] * draws.next();
    } else {
      for (std::size_t i = 0; i < n; ++i) v[i] = decay_[i] * v[i] - phi1dt_[i] * b_buf_[i];
    }
  }

  ++step_index_;
  state.t += h;

  if (config_.safeguard_norm > 0.0 &&
      sobolev_norm(v, config_.sigma_monitor) > config_.safeguard_norm) {
    blown_up_ = true;
    throw SafeguardError("H^sigma safeguard exceeded at t = " + std::to_string(state.t));
  }
}

void Stepper::simulate(FluidState& state, double t_end, std::span<Observer* const> observers) {
  for (Observer* o : observers) o->on_start(state);
  FluidState before = state;
  while (state.t < t_end - 0.5 * config_.dt) {
    before.t = state.t;
    before.v = state.v;
    step(state);
    for (Observer* o : observers) o->on_step(before, state, *this);
  }
}

}  // namespace pechaos
