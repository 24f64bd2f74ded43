#include "doctest.h"

#include <cmath>
#include <set>

#include "pechaos/modes.hpp"

using namespace pechaos;

TEST_CASE("mode counting matches brute-force enumeration") {
  for (int K : {1, 2, 3, 4}) {
    std::int64_t count = 0;
    for (int kx = -K; kx <= K; ++kx)
      for (int ky = -K; ky <= K; ++ky)
        for (int kz = -K; kz <= K; ++kz) {
          if (kx == 0 && ky == 0 && kz == 0) continue;
          count += (kz == 0) ? 1 : 2;
        }
    CHECK(count == mode_count(K));
    CHECK(count == static_cast<std::int64_t>(ModeTable(K).size()));
  }
  CHECK(mode_count(1) == 44);
  CHECK(mode_count(4) == 1376);  // the reference truncation, ~1.4k modes
}

TEST_CASE("sign classes partition the lattice") {
  const int K = 3;
  for (int kx = -K; kx <= K; ++kx)
    for (int ky = -K; ky <= K; ++ky)
      for (int kz = -K; kz <= K; ++kz) {
        if (kx == 0 && ky == 0 && kz == 0) continue;
        CHECK(positive_class(kx, ky, kz) != positive_class(-kx, -ky, -kz));
      }
}

TEST_CASE("gamma vectors") {
  // unit length and even in k
  for (const auto& e : ModeTable(2).entries()) {
    const auto g = gamma_vector(e.idx);
    CHECK(std::abs(g[0] * g[0] + g[1] * g[1] - 1.0) < 1e-15);
    ModeIndex neg{-e.idx.kx, -e.idx.ky, -e.idx.kz, e.idx.component};
    const auto gn = gamma_vector(neg);
    CHECK(g[0] == doctest::Approx(gn[0]).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(gn[1]).epsilon(1e-15));
  }
  // horizontal modes are solenoidal: gamma . (kx,ky) = 0
  for (int kx = -2; kx <= 2; ++kx)
    for (int ky = -2; ky <= 2; ++ky) {
      if (kx == 0 && ky == 0) continue;
      const auto g = gamma_vector({kx, ky, 0, 1});
      CHECK(std::abs(g[0] * kx + g[1] * ky) < 1e-14);
    }
  CHECK_THROWS(gamma_vector({1, 1, 0, 2}));  // component 2 forbidden on k_z = 0
  CHECK_THROWS(gamma_vector({0, 0, 0, 1}));
}

TEST_CASE("gamma_w closed form") {
  CHECK(gamma_w({1, 0, 1, 1}) == doctest::Approx(-1.0));
  CHECK(gamma_w({1, 0, 1, 2}) == doctest::Approx(0.0));
  CHECK(gamma_w({2, 3, -1, 2}) == doctest::Approx(3.0));
  CHECK(gamma_w({1, 1, 0, 1}) == doctest::Approx(0.0));
  CHECK(gamma_w({0, 0, 2, 1}) == doctest::Approx(0.0));
  // even in k
  CHECK(gamma_w({2, 3, -1, 2}) == doctest::Approx(gamma_w({-2, -3, 1, 2})));
}

TEST_CASE("canonical index lookup") {
  ModeTable tab(3);
  std::set<std::int64_t> seen;
  for (std::size_t i = 0; i < tab.size(); ++i) {
    const auto idx = tab.find(tab[i].idx);
    CHECK(idx == static_cast<std::int64_t>(i));
    seen.insert(idx);
  }
  CHECK(seen.size() == tab.size());
  CHECK(tab.find({4, 0, 0, 1}) == -1);
  CHECK(tab.find({1, 1, 0, 2}) == -1);
}
