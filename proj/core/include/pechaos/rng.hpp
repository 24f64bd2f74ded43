#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace pechaos {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Draws are a pure function of (counter, key), so any (seed, trajectory,
/// step, draw index) tuple maps to the same value no matter how work is
/// scheduled across threads.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static inline void round_once(Counter& x, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * x[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * x[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
  }

  static Counter generate(Counter ctr, Key key) {
    for (int r = 0; r < 10; ++r) {
      round_once(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

/// Two uniform doubles in (0,1] from one Philox block.
inline std::array<double, 2> philox_uniform2(Philox4x32::Counter ctr, Philox4x32::Key key) {
  const auto r = Philox4x32::generate(ctr, key);
  const std::uint64_t u0 = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  const std::uint64_t u1 = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
  constexpr double kScale = 1.0 / 18446744073709551616.0;  // 2^-64
  return {(static_cast<double>(u0) + 1.0) * kScale, (static_cast<double>(u1) + 1.0) * kScale};
}

/// Standard-normal draws addressed by (seed, stream, step, index).
///
/// Box-Muller on Philox blocks; index pairs (2n, 2n+1) share one block, and
/// callers that consume draws sequentially get the cached partner for free.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_id_(stream_id) {}

  /// Normal draw `index` within logical step `step`.
  double at(std::uint64_t step, std::uint64_t index) const {
    const std::uint64_t pair = index >> 1;
    const auto z = normal_pair(step, pair);
    return z[(index & 1u)];
  }

  std::array<double, 2> normal_pair(std::uint64_t step, std::uint64_t pair) const {
    Philox4x32::Counter ctr = {
        static_cast<std::uint32_t>(pair),
        static_cast<std::uint32_t>(pair >> 32) ^ static_cast<std::uint32_t>(stream_id_ >> 32),
        static_cast<std::uint32_t>(step),
        static_cast<std::uint32_t>((step >> 32) ^ (stream_id_ << 8))};
    const auto u = philox_uniform2(ctr, key_);
    const double rho = std::sqrt(-2.0 * std::log(u[0]));
    const double ang = 6.283185307179586476925286766559 * u[1];
    return {rho * std::cos(ang), rho * std::sin(ang)};
  }

  std::uint64_t stream_id() const { return stream_id_; }

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_id_;
};

/// Sequential cursor over a NormalStream for one (step) epoch, consuming
/// draws in canonical order. Cheap to construct per step.
class NormalCursor {
 public:
  NormalCursor(const NormalStream& s, std::uint64_t step) : s_(&s), step_(step) {}

  double next() {
    if (!have_cached_) {
      const auto z = s_->normal_pair(step_, pair_++);
      cached_ = z[1];
      have_cached_ = true;
      return z[0];
    }
    have_cached_ = false;
    return cached_;
  }

 private:
  const NormalStream* s_;
  std::uint64_t step_;
  std::uint64_t pair_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace pechaos
