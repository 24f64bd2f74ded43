#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pechaos/spectral.hpp"

namespace pechaos {

/// CSV writer: header row up front, one formatted row per record, and a
/// trailing comment line carrying the manifest hash. Doubles are written
/// with 17 significant digits so identical runs produce identical bytes.
class CsvWriter {
 public:
  CsvWriter(std::string path, std::vector<std::string> columns, std::uint64_t manifest_hash);

  void row(const std::vector<double>& values);
  void row_text(const std::vector<std::string>& cells);

  /// Writes header, rows and the trailing hash comment atomically.
  void flush();

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::vector<std::string> columns_;
  std::uint64_t hash_;
  std::vector<std::string> rows_;
};

std::string format_double(double v);

/// Reproducibility manifest written at run end (atomic rename).
struct RunManifest {
  std::string subcommand;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string code_version;
  double wall_clock_seconds = 0.0;
  std::map<std::string, std::string> summary;

  void write(const std::string& path) const;
};

/// Binary checkpoint: magic "PEC1", version, truncation, mode count, then
/// coefficients as little-endian f64 in canonical mode order.
void write_checkpoint(const std::string& path, const SpectralVelocity& v);
SpectralVelocity read_checkpoint(const std::string& path);

/// Minimal static SVG line chart of (x, y) series.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<std::pair<double, double>>& series);

extern const char* const kCodeVersion;

}  // namespace pechaos
