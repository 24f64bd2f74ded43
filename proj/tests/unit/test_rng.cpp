#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "pechaos/rng.hpp"

using namespace pechaos;

TEST_CASE("philox known-answer vectors") {
  // Reference vectors from the Random123 distribution (philox4x32x10).
  const auto zero = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);

  const auto ones = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                         {0xffffffffu, 0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("normal stream is reproducible and addressable") {
  NormalStream a(42, 7);
  NormalStream b(42, 7);
  for (int step : {0, 3, 9}) {
    for (int i = 0; i < 50; ++i) CHECK(a.at(step, i) == b.at(step, i));
  }
  // sequential cursor matches random access
  NormalCursor cur(a, 5);
  for (int i = 0; i < 33; ++i) CHECK(cur.next() == a.at(5, i));
  // different stream ids decorrelate
  NormalStream c(42, 8);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += (a.at(0, i) == c.at(0, i));
  CHECK(same == 0);
}

TEST_CASE("normal stream moments") {
  NormalStream s(2024, 0);
  const int n = 200000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s.at(0, i);
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  CHECK(std::abs(m1) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(m4 - 3.0) < 4.0 * std::sqrt(96.0 / n));
}
