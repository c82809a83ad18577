#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sigmalab/rng.hpp"
#include "sigmalab/simd/kernels.hpp"

using namespace sigmalab;

TEST(Philox, KnownAnswerZero) {
  const auto out = rng::philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (rng::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = rng::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                   {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (rng::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const auto out = rng::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                   {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (rng::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, CompileTimeEvaluable) {
  constexpr auto out = rng::philox4x32({0, 0, 0, 0}, {0, 0});
  static_assert(out[0] == 0x6627e8d5u);
}

TEST(Uniform, RangeAndResolution) {
  EXPECT_EQ(rng::uniform53(0, 0), 0.0);
  EXPECT_LT(rng::uniform53(0xffffffffu, 0xffffffffu), 1.0);
  EXPECT_EQ(rng::uniform53(0xffffffffu, 0xffffffffu), 1.0 - 0x1.0p-53);
}

namespace {

std::vector<double> normals(simd::Isa isa, std::uint64_t first, std::size_t n, std::uint64_t seed = 7) {
  std::vector<double> out(n);
  const auto addr = rng::StreamAddress::from(SeedSpec{seed, 3}, rng::Domain::BrownianIncrements);
  simd::kernels(isa).fill_normals(addr, first, out);
  return out;
}

} // namespace

TEST(Normals, ScalarOffsetsAgree) {
  const auto all = normals(simd::Isa::Scalar, 0, 101);
  for (std::uint64_t first : {1u, 2u, 5u, 17u}) {
    const auto part = normals(simd::Isa::Scalar, first, 40);
    for (std::size_t i = 0; i < part.size(); ++i)
      ASSERT_EQ(part[i], all[first + i]);
  }
}

TEST(Normals, Avx2MatchesScalarBitForBit) {
  if (!simd::isa_available(simd::Isa::Avx2))
    GTEST_SKIP() << "AVX2 not available";
  for (std::uint64_t first : {0u, 1u, 3u, 8u, 1001u}) {
    for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 63u, 4096u}) {
      const auto a = normals(simd::Isa::Scalar, first, n);
      const auto b = normals(simd::Isa::Avx2, first, n);
      for (std::size_t i = 0; i < n; ++i)
        ASSERT_EQ(std::bit_cast<std::uint64_t>(a[i]), std::bit_cast<std::uint64_t>(b[i]))
            << "first=" << first << " i=" << i;
    }
  }
}

TEST(Normals, Avx2MatchesScalarOnManySeeds) {
  if (!simd::isa_available(simd::Isa::Avx2))
    GTEST_SKIP() << "AVX2 not available";
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto a = normals(simd::Isa::Scalar, 0, 1024, seed);
    const auto b = normals(simd::Isa::Avx2, 0, 1024, seed);
    ASSERT_EQ(a, b) << "seed " << seed;
  }
}

TEST(Normals, MomentsAreStandard) {
  const auto z = normals(simd::Isa::Scalar, 0, 400000);
  double m1 = 0, m2 = 0, m4 = 0;
  for (double v : z) {
    m1 += v;
    m2 += v * v;
    m4 += v * v * v * v;
  }
  const double n = static_cast<double>(z.size());
  m1 /= n;
  m2 /= n;
  m4 /= n;
  EXPECT_NEAR(m1, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m4, 3.0, 4.0 * std::sqrt(96.0 / n));
}

TEST(Normals, TailFractionMatchesGaussian) {
  const auto z = normals(simd::Isa::Scalar, 0, 400000, 11);
  std::size_t beyond2 = 0;
  for (double v : z)
    beyond2 += std::fabs(v) > 2.0 ? 1 : 0;
  const double p = std::erfc(2.0 / std::sqrt(2.0));
  const double n = static_cast<double>(z.size());
  EXPECT_NEAR(static_cast<double>(beyond2) / n, p, 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST(Kernels, ReductionsAgreeAcrossIsa) {
  std::vector<double> x = normals(simd::Isa::Scalar, 0, 1037);
  for (simd::Isa isa : {simd::Isa::Scalar, simd::Isa::Avx2}) {
    if (!simd::isa_available(isa))
      continue;
    const auto& k = simd::kernels(isa);
    std::vector<double> a(x.size());
    k.abs_into(x, a);
    double mx = 0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      ASSERT_EQ(a[i], std::fabs(x[i]));
      mx = std::max(mx, a[i]);
      cnt += a[i] <= 0.5 ? 1 : 0;
    }
    EXPECT_EQ(k.max_abs(x), mx);
    EXPECT_EQ(k.count_abs_le(x, 0.5), cnt);
    EXPECT_EQ(k.max_abs(std::span<const double>()), 0.0);
  }
}

TEST(Dispatch, ForceIsaSwitchesActiveTable) {
  const simd::Isa before = simd::kernels().isa;
  simd::force_isa(simd::Isa::Scalar);
  EXPECT_EQ(simd::kernels().isa, simd::Isa::Scalar);
  simd::force_isa(before);
  EXPECT_EQ(simd::isa_name(simd::Isa::Avx2), "avx2");
}
