#include "pechaos/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace pechaos {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

const std::map<std::string, std::string>& RunConfig::defaults() {
  static const std::map<std::string, std::string> d = {
      {"solver.K", "4"},
      {"solver.dt", "1e-3"},
      {"solver.T", "10"},
      {"solver.mode", "stochastic"},
      {"solver.sigma_monitor", "5.25"},
      {"solver.safeguard_norm", "0"},
      {"solver.viscosity", "1"},
      {"solver.nonlinearity", "true"},
      {"solver.cfl_limit", "0.5"},
      {"solver.cfl_interval", "100"},
      {"noise.alpha", "7"},
      {"noise.amplitude", "0"},  // 0: derive from noise.energy
      {"noise.energy", "1"},
      {"noise.seed", "12345"},
      {"ensemble.trajectories", "8"},
      {"lagrangian.particles", "64"},
      {"lagrangian.clamp_delta", "1e-12"},
      {"lyapunov.burn_in", "10"},
      {"lyapunov.renorm_interval", "0.1"},
      {"lyapunov.batches", "25"},
      {"diagnostics.sample_interval", "100"},
      {"diagnostics.f0", "sinx"},
      {"diagnostics.scalar_samples", "100"},
      {"output.dir", "out"},
      {"output.cadence", "100"},
      {"output.checkpoint", "true"},
      {"output.svg", "false"},
      {"run.workers", "1"},
  };
  return d;
}

RunConfig::RunConfig() : values_(defaults()) {}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.resize(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (defaults().find(key) == defaults().end())
    throw ConfigError("unknown config key: " + key);
  if (value.empty()) throw ConfigError("empty value for config key: " + key);
  values_[key] = value;
}

std::string RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key: " + key);
  return it->second;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string v = get(key);
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not a number: " + v);
  }
}

int RunConfig::get_int(const std::string& key) const {
  const double d = get_double(key);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d)
    throw ConfigError("config key " + key + ": not an integer");
  return i;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string v = get(key);
  try {
    std::size_t pos = 0;
    const std::uint64_t u = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return u;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not an unsigned integer: " + v);
  }
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key " + key + ": not a boolean: " + v);
}

std::string RunConfig::canonical_text() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
  return os.str();
}

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t RunConfig::content_hash() const { return fnv1a_hash(canonical_text()); }

SolverConfig RunConfig::solver() const {
  SolverConfig s;
  s.K = get_int("solver.K");
  if (s.K < 1) throw ConfigError("solver.K must be >= 1");
  s.dt = get_double("solver.dt");
  if (!(s.dt > 0)) throw ConfigError("solver.dt must be positive");
  s.mode = solver_mode_from_string(get("solver.mode"));
  s.sigma_monitor = get_double("solver.sigma_monitor");
  s.safeguard_norm = get_double("solver.safeguard_norm");
  s.viscosity = get_double("solver.viscosity");
  if (!(s.viscosity > 0)) throw ConfigError("solver.viscosity must be positive");
  s.nonlinearity = get_bool("solver.nonlinearity");
  s.cfl_limit = get_double("solver.cfl_limit");
  s.cfl_interval = get_int("solver.cfl_interval");
  return s;
}

NoiseSpec RunConfig::noise() const {
  NoiseSpec n;
  n.alpha = get_double("noise.alpha");
  n.K = get_int("solver.K");
  n.seed = get_u64("noise.seed");
  n.amplitude = get_double("noise.amplitude");
  if (n.amplitude == 0.0) {
    const double e0 = get_double("noise.energy");
    n.amplitude = e0 > 0.0 ? amplitude_for_energy(n.alpha, n.K, e0) : 0.0;
  }
  return n;
}

EnsembleConfig RunConfig::ensemble() const {
  EnsembleConfig e;
  e.solver = solver();
  e.noise = noise();
  e.trajectories = get_int("ensemble.trajectories");
  e.particles = get_int("lagrangian.particles");
  e.burn_in = get_double("lyapunov.burn_in");
  e.horizon = get_double("solver.T");
  e.renorm_interval = get_double("lyapunov.renorm_interval");
  e.batches = get_int("lyapunov.batches");
  e.workers = get_int("run.workers");
  e.scalar_f0 = get("diagnostics.f0");
  e.scalar_samples = get_int("diagnostics.scalar_samples");
  return e;
}

StationaryConfig RunConfig::stationary() const {
  StationaryConfig s;
  s.solver = solver();
  s.noise = noise();
  s.trajectories = get_int("ensemble.trajectories");
  s.burn_in = get_double("lyapunov.burn_in");
  s.horizon = get_double("solver.T");
  s.batches = get_int("lyapunov.batches");
  s.workers = get_int("run.workers");
  s.sample_interval = get_int("diagnostics.sample_interval");
  return s;
}

}  // namespace pechaos
