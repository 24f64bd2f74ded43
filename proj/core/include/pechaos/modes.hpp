#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace pechaos {

/// Wavevector with component index. Valid modes have k != 0 and, when
/// k_z == 0, only component 1 (the solenoidal horizontal direction).
struct ModeIndex {
  int kx = 0, ky = 0, kz = 0;
  int component = 1;  // 1 or 2

  bool operator==(const ModeIndex&) const = default;
};

/// Fixed total order splitting Z^3\{0} into a positive and a negative class.
/// Positive-class wavevectors carry the cosine branch of the basis, negative
/// the sine branch.
inline bool positive_class(int kx, int ky, int kz) {
  if (kz != 0) return kz > 0;
  if (ky != 0) return ky > 0;
  return kx > 0;
}

inline bool mode_index_valid(const ModeIndex& m) {
  if (m.kx == 0 && m.ky == 0 && m.kz == 0) return false;
  if (m.component != 1 && m.component != 2) return false;
  if (m.kz == 0 && m.component == 2) return false;
  return true;
}

/// Unit 2-vector attached to a mode: the Cartesian axes off the k_z = 0
/// plane, the normalized perp direction sign(k) k^perp/|k| on it.
std::array<double, 2> gamma_vector(const ModeIndex& m);

/// Vertical-velocity weight: -(k_x,k_y)·gamma / k_z for k_z != 0, else 0.
double gamma_w(const ModeIndex& m);

/// Number of retained modes for truncation |k|_inf <= K.
inline std::int64_t mode_count(int K) {
  const std::int64_t n = 2 * K + 1;
  return 2 * (n * n * n - 1) - (n * n - 1);
}

/// Precomputed per-mode data for one truncation radius, in canonical order
/// (lexicographic in (k_x, k_y, k_z, component)). The canonical order fixes
/// the checkpoint layout and the RNG draw order.
class ModeTable {
 public:
  struct Entry {
    ModeIndex idx;
    double gamma[2];     // horizontal basis direction
    double gamma_w;      // vertical-velocity weight
    double lambda;       // dissipation rate 4 pi^2 |k|^2
    double k2;           // |k|^2
    bool cosine;         // positive sign class
  };

  explicit ModeTable(int K);

  int truncation() const { return K_; }
  std::size_t size() const { return entries_.size(); }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<Entry>& entries() const { return entries_; }

  /// Canonical index of a mode, or -1 if not retained.
  std::int64_t find(const ModeIndex& m) const;

  static std::shared_ptr<const ModeTable> shared(int K);

 private:
  int K_;
  std::vector<Entry> entries_;
};

}  // namespace pechaos
