#include "pechaos/modes.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace pechaos {

std::array<double, 2> gamma_vector(const ModeIndex& m) {
  if (!mode_index_valid(m))
    throw std::invalid_argument("gamma_vector: invalid mode index");
  if (m.kz != 0) {
    return m.component == 1 ? std::array<double, 2>{1.0, 0.0}
                            : std::array<double, 2>{0.0, 1.0};
  }
  const double s = positive_class(m.kx, m.ky, m.kz) ? 1.0 : -1.0;
  const double nrm = std::sqrt(static_cast<double>(m.kx) * m.kx +
                               static_cast<double>(m.ky) * m.ky);
  return {s * m.ky / nrm, -s * m.kx / nrm};
}

double gamma_w(const ModeIndex& m) {
  if (m.kz == 0) return 0.0;
  const auto g = gamma_vector(m);
  return -(m.kx * g[0] + m.ky * g[1]) / static_cast<double>(m.kz);
}

ModeTable::ModeTable(int K) : K_(K) {
  if (K < 1) throw std::invalid_argument("ModeTable: K must be >= 1");
  entries_.reserve(static_cast<std::size_t>(mode_count(K)));
  constexpr double four_pi2 = 4.0 * M_PI * M_PI;
  for (int kx = -K; kx <= K; ++kx)
    for (int ky = -K; ky <= K; ++ky)
      for (int kz = -K; kz <= K; ++kz) {
        if (kx == 0 && ky == 0 && kz == 0) continue;
        const int ncomp = (kz == 0) ? 1 : 2;
        for (int c = 1; c <= ncomp; ++c) {
          Entry e;
          e.idx = {kx, ky, kz, c};
          const auto g = gamma_vector(e.idx);
          e.gamma[0] = g[0];
          e.gamma[1] = g[1];
          e.gamma_w = gamma_w(e.idx);
          e.k2 = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky +
                 static_cast<double>(kz) * kz;
          e.lambda = four_pi2 * e.k2;
          e.cosine = positive_class(kx, ky, kz);
          entries_.push_back(e);
        }
      }
}

std::int64_t ModeTable::find(const ModeIndex& m) const {
  if (!mode_index_valid(m)) return -1;
  if (std::abs(m.kx) > K_ || std::abs(m.ky) > K_ || std::abs(m.kz) > K_) return -1;
  // Canonical order is lexicographic, so the offset is computable in O(1);
  // a direct count keeps it obviously right.
  std::int64_t n = 0;
  const int K = K_;
  auto modes_for = [](int kz) { return kz == 0 ? 1 : 2; };
  auto column_count = [&](int) {
    return 2 * (2 * K + 1) - 1;  // modes over kz in -K..K for one (kx,ky) != (0,0) column
  };
  for (int kx = -K; kx < m.kx; ++kx)
    for (int ky = -K; ky <= K; ++ky)
      n += (kx == 0 && ky == 0) ? 2 * (2 * K) : column_count(0);
  for (int ky = -K; ky < m.ky; ++ky)
    n += (m.kx == 0 && ky == 0) ? 2 * (2 * K) : column_count(0);
  const bool zero_column = (m.kx == 0 && m.ky == 0);
  for (int kz = -K; kz < m.kz; ++kz) {
    if (zero_column && kz == 0) continue;
    n += modes_for(kz);
  }
  n += (m.component - 1);
  return (n < static_cast<std::int64_t>(entries_.size()) && entries_[n].idx == m) ? n : -1;
}

std::shared_ptr<const ModeTable> ModeTable::shared(int K) {
  static std::mutex mu;
  static std::map<int, std::weak_ptr<const ModeTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(K);
  if (it != cache.end()) {
    if (auto p = it->second.lock()) return p;
  }
  auto p = std::make_shared<const ModeTable>(K);
  cache[K] = p;
  return p;
}

}  // namespace pechaos
