// Copyright 2026 The spikediff Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <set>
#include <vector>

#include "spikediff/noise_stream.hpp"

namespace spikediff {
namespace {

// Known-answer vectors published with the Random123 reference code.
TEST(Philox, KnownAnswerZero) {
  const auto r = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(r, (std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerOnes) {
  const auto r = philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                            {0xffffffff, 0xffffffff});
  EXPECT_EQ(r, (std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  const auto r = philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                            {0xa4093822, 0x299f31d0});
  EXPECT_EQ(r, (std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(NoiseStream, ReplayIsBitIdentical) {
  NoiseStream a = NoiseStream(42).split("trial").split(7);
  NoiseStream b = NoiseStream(42).split("trial").split(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = a.normal();
    const double y = b.normal();
    ASSERT_EQ(std::memcmp(&x, &y, sizeof x), 0);
  }
}

TEST(NoiseStream, SplitIgnoresParentPosition) {
  NoiseStream parent(5);
  const NoiseStream before = parent.split(3);
  parent.next_u64();
  parent.normal();
  NoiseStream after = parent.split(3);
  NoiseStream b = before;
  EXPECT_EQ(after.next_u64(), b.next_u64());
}

TEST(NoiseStream, DistinctLabelsAndSeedsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t label = 0; label < 200; ++label) {
    firsts.insert(NoiseStream(1).split(label).next_u64());
  }
  for (std::uint64_t seed = 2; seed < 200; ++seed) firsts.insert(NoiseStream(seed).next_u64());
  EXPECT_EQ(firsts.size(), 200u + 198u);
  EXPECT_NE(NoiseStream(1).split("a").next_u64(), NoiseStream(1).split("b").next_u64());
  // Paths are not commutative.
  EXPECT_NE(NoiseStream(1).split(1).split(2).next_u64(),
            NoiseStream(1).split(2).split(1).next_u64());
}

TEST(NoiseStream, PositionAndPathAreTracked) {
  NoiseStream s = NoiseStream(9).split(4).split("x");
  EXPECT_EQ(s.master_seed(), 9u);
  EXPECT_EQ(s.path().size(), 2u);
  EXPECT_EQ(s.position(), 0u);
  s.next_block();
  s.next_block();
  EXPECT_EQ(s.position(), 2u);
}

TEST(NoiseStream, UniformIsOpenInterval) {
  NoiseStream s(11);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(NoiseStream, NormalMoments) {
  NoiseStream s(12);
  const int n = 200000;
  double m1 = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  EXPECT_NEAR(m1, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m4, 3.0, 4.0 * std::sqrt(96.0 / n));
}

TEST(NoiseStream, FillNormalMatchesScalarDraws) {
  NoiseStream a(13);
  NoiseStream b(13);
  std::vector<double> v(7);
  a.fill_normal(v);
  for (double x : v) EXPECT_EQ(x, b.normal());
}

}  // namespace
}  // namespace spikediff
