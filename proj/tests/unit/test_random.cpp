#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fverify/random.hpp"

using fverify::random::philox4x32;
using fverify::random::Stream;

// Known-answer vectors of the Philox4x32-10 reference implementation.
TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Stream, Reproducible) {
  Stream a(42, 3), b(42, 3);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a(), b());
}

TEST(Stream, DistinctStreamsDiffer) {
  Stream a(42, 0), b(42, 1), c(43, 0);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 256; ++i) {
    const auto va = a();
    same_ab += va == b();
    same_ac += va == c();
  }
  EXPECT_LT(same_ab, 3);
  EXPECT_LT(same_ac, 3);
}

TEST(Stream, UniformOpenInterval) {
  Stream s(1, 0);
  double total = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    total += u;
  }
  EXPECT_NEAR(total / n, 0.5, 0.005);
}

TEST(Stream, MomentsOfDerivedLaws) {
  Stream s(9, 1);
  const int n = 200000;
  double nm = 0, nv = 0, gm = 0, bm = 0, bv = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    nm += z;
    nv += z * z;
    gm += s.gamma(0.7);
    const double b = s.beta(2.0, 2.0);
    bm += b;
    bv += (b - 0.5) * (b - 0.5);
  }
  EXPECT_NEAR(nm / n, 0.0, 0.01);
  EXPECT_NEAR(nv / n, 1.0, 0.015);
  EXPECT_NEAR(gm / n, 0.7, 0.01);
  EXPECT_NEAR(bm / n, 0.5, 0.005);
  EXPECT_NEAR(bv / n, 0.05, 0.002);  // ab / ((a+b)^2 (a+b+1))
}

TEST(Stream, BernoulliFrequency) {
  Stream s(5, 5);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += s.bernoulli(0.3);
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.3, 0.006);
  EXPECT_FALSE(s.bernoulli(0.0));
  EXPECT_TRUE(s.bernoulli(1.0));
}
