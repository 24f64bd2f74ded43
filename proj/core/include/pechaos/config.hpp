#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pechaos/diagnostics.hpp"
#include "pechaos/dynamics.hpp"
#include "pechaos/ensemble.hpp"

namespace pechaos {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat `section.key = value` run configuration. Unknown keys are rejected
/// with the offending key path; the resolved canonical text is hashed into
/// every output.
class RunConfig {
 public:
  RunConfig();

  static RunConfig from_file(const std::string& path);
  static RunConfig from_text(const std::string& text);

  /// Applies one `key=value` override (the CLI --set flag).
  void set(const std::string& key, const std::string& value);

  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  /// Canonical text: sorted `key = value` lines of every key.
  std::string canonical_text() const;
  std::uint64_t content_hash() const;  // FNV-1a of the canonical text

  SolverConfig solver() const;
  NoiseSpec noise() const;
  EnsembleConfig ensemble() const;
  StationaryConfig stationary() const;

  std::string output_dir() const { return get("output.dir"); }
  int workers() const { return get_int("run.workers"); }

 private:
  std::map<std::string, std::string> values_;
  static const std::map<std::string, std::string>& defaults();
};

std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace pechaos
