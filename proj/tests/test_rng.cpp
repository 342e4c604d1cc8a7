#include "holab/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace holab;

// Known-answer vectors for Philox4x32-10.
TEST(Philox, KnownAnswers) {
  using B = Philox4x32::Block;
  EXPECT_EQ(Philox4x32::generate(B{0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(KeyedRng, SameAddressSameDraw) {
  const KeyedRng a(7, 3, 1);
  const KeyedRng b(7, 3, 1);
  EXPECT_EQ(a.raw(Stream::kDiffusion, 10, 2), b.raw(Stream::kDiffusion, 10, 2));
  EXPECT_EQ(a.normals(Stream::kDiffusion, 5, 0), b.normals(Stream::kDiffusion, 5, 0));
}

TEST(KeyedRng, AddressesAreDistinct) {
  const KeyedRng r(1, 0, 0);
  std::set<Philox4x32::Block> seen;
  seen.insert(r.raw(Stream::kDiffusion, 0, 0));
  seen.insert(r.raw(Stream::kDiffusion, 1, 0));
  seen.insert(r.raw(Stream::kDiffusion, 0, 1));
  seen.insert(r.raw(Stream::kJumpMarks, 0, 0));
  seen.insert(r.with_segment(1).raw(Stream::kDiffusion, 0, 0));
  seen.insert(KeyedRng(1, 1, 0).raw(Stream::kDiffusion, 0, 0));
  seen.insert(KeyedRng(2, 0, 0).raw(Stream::kDiffusion, 0, 0));
  EXPECT_EQ(seen.size(), 7u);
}

TEST(KeyedRng, UniformsInOpenInterval) {
  const KeyedRng r(3, 0, 0);
  for (std::uint64_t s = 0; s < 10000; ++s) {
    for (double u : r.uniforms(Stream::kJumpMarks, s, 0)) {
      EXPECT_GT(u, 0.0);
      EXPECT_LT(u, 1.0);
    }
  }
}

TEST(KeyedRng, NormalMoments) {
  const KeyedRng r(11, 0, 0);
  const int n = 200000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n / 2; ++i) {
    for (double z : r.normals(Stream::kDiffusion, static_cast<std::uint64_t>(i), 0)) {
      s1 += z;
      s2 += z * z;
      s4 += z * z * z * z;
    }
  }
  EXPECT_NEAR(s1 / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 5.0 * std::sqrt(96.0 / n));
}

TEST(KeyedRng, ExponentialMean) {
  const KeyedRng r(5, 0, 0);
  const int n = 100000;
  double s = 0;
  for (int i = 0; i < n; ++i) s += r.exponential(Stream::kSkewMarks, static_cast<std::uint64_t>(i), 0, 0.5);
  EXPECT_NEAR(s / n, 2.0, 5.0 * 2.0 / std::sqrt(n));
}
