// Compiled with -mavx2 only (no -mfma): see the note in normal_math.hpp.
#include <immintrin.h>

#include <cmath>

#include "normal_math.hpp"
#include "sigmalab/simd/kernels.hpp"

namespace sigmalab::simd {
namespace {

struct Avx2Backend {
  using V = __m256d;
  using M = __m256d;
  static V set1(double a) { return _mm256_set1_pd(a); }
  static V add(V a, V b) { return _mm256_add_pd(a, b); }
  static V sub(V a, V b) { return _mm256_sub_pd(a, b); }
  static V mul(V a, V b) { return _mm256_mul_pd(a, b); }
  static V div(V a, V b) { return _mm256_div_pd(a, b); }
  static V sqrt(V a) { return _mm256_sqrt_pd(a); }
  static V floor(V a) { return _mm256_floor_pd(a); }
  static M gt(V a, V b) { return _mm256_cmp_pd(a, b, _CMP_GT_OQ); }
  static M eq(V a, V b) { return _mm256_cmp_pd(a, b, _CMP_EQ_OQ); }
  static M mask_or(M a, M b) { return _mm256_or_pd(a, b); }
  static V select(M m, V a, V b) { return _mm256_blendv_pd(b, a, m); }
  static V split_exponent(V x, V& mant) {
    const __m256i bits = _mm256_castpd_si256(x);
    mant = _mm256_castsi256_pd(_mm256_or_si256(
        _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
        _mm256_set1_epi64x(0x3FF0000000000000ll)));
    return _mm256_sub_pd(small_to_double(_mm256_srli_epi64(bits, 52)), _mm256_set1_pd(1023.0));
  }
  // Exact conversion for 64-bit lanes holding values below 2^52.
  static V small_to_double(__m256i v) {
    const __m256d magic = _mm256_set1_pd(0x1.0p52);
    return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(v, _mm256_castpd_si256(magic))), magic);
  }
};

// Philox4x32-10 on four consecutive blocks. Each 64-bit lane carries one
// 32-bit word in its low half.
struct PhiloxX4 {
  __m256i w0, w1, w2, w3;
};

inline PhiloxX4 philox_x4(const rng::StreamAddress& addr, std::uint32_t block) {
  const __m256i mask32 = _mm256_set1_epi64x(0xFFFFFFFFll);
  const __m256i m0 = _mm256_set1_epi64x(rng::kPhiloxM0);
  const __m256i m1 = _mm256_set1_epi64x(rng::kPhiloxM1);
  const auto c = addr.counter(block);
  PhiloxX4 s{_mm256_and_si256(_mm256_setr_epi64x(std::uint32_t(block), std::uint32_t(block + 1),
                                                 std::uint32_t(block + 2), std::uint32_t(block + 3)),
                              mask32),
             _mm256_set1_epi64x(c[1]), _mm256_set1_epi64x(c[2]), _mm256_set1_epi64x(c[3])};
  std::uint32_t k0 = addr.key[0], k1 = addr.key[1];
  for (int round = 0; round < 10; ++round) {
    const __m256i p0 = _mm256_mul_epu32(s.w0, m0);
    const __m256i p1 = _mm256_mul_epu32(s.w2, m1);
    const __m256i hi0 = _mm256_srli_epi64(p0, 32);
    const __m256i lo0 = _mm256_and_si256(p0, mask32);
    const __m256i hi1 = _mm256_srli_epi64(p1, 32);
    const __m256i lo1 = _mm256_and_si256(p1, mask32);
    const __m256i key0 = _mm256_set1_epi64x(k0);
    const __m256i key1 = _mm256_set1_epi64x(k1);
    s = PhiloxX4{_mm256_xor_si256(_mm256_xor_si256(hi1, s.w1), key0), lo1,
                 _mm256_xor_si256(_mm256_xor_si256(hi0, s.w3), key1), lo0};
    k0 += rng::kPhiloxW0;
    k1 += rng::kPhiloxW1;
  }
  return s;
}

void fill_normals_avx2(const rng::StreamAddress& addr, std::uint64_t first, std::span<double> out) {
  const auto& scalar = detail::scalar_table();
  std::size_t i = 0;
  std::uint64_t idx = first;
  if (idx % 2 == 1 && !out.empty()) {
    scalar.fill_normals(addr, idx, out.subspan(0, 1));
    ++i;
    ++idx;
  }
  while (out.size() - i >= 8) {
    const PhiloxX4 w = philox_x4(addr, static_cast<std::uint32_t>(idx / 2));
    __m256d n0, n1;
    math::box_muller<Avx2Backend>(Avx2Backend::small_to_double(_mm256_srli_epi64(w.w0, 5)),
                                  Avx2Backend::small_to_double(_mm256_srli_epi64(w.w1, 6)),
                                  Avx2Backend::small_to_double(_mm256_srli_epi64(w.w2, 5)),
                                  Avx2Backend::small_to_double(_mm256_srli_epi64(w.w3, 6)), n0, n1);
    const __m256d lo = _mm256_unpacklo_pd(n0, n1);
    const __m256d hi = _mm256_unpackhi_pd(n0, n1);
    _mm256_storeu_pd(out.data() + i, _mm256_permute2f128_pd(lo, hi, 0x20));
    _mm256_storeu_pd(out.data() + i + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
    i += 8;
    idx += 8;
  }
  if (i < out.size())
    scalar.fill_normals(addr, idx, out.subspan(i));
}

void abs_into_avx2(std::span<const double> in, std::span<double> out) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t k = 0;
  for (; k + 4 <= in.size(); k += 4)
    _mm256_storeu_pd(out.data() + k, _mm256_andnot_pd(sign, _mm256_loadu_pd(in.data() + k)));
  for (; k < in.size(); ++k)
    out[k] = std::fabs(in[k]);
}

std::size_t count_abs_le_avx2(std::span<const double> x, double eps) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d e = _mm256_set1_pd(eps);
  std::size_t n = 0, k = 0;
  for (; k + 4 <= x.size(); k += 4) {
    const __m256d a = _mm256_andnot_pd(sign, _mm256_loadu_pd(x.data() + k));
    n += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(_mm256_cmp_pd(a, e, _CMP_LE_OQ))));
  }
  for (; k < x.size(); ++k)
    n += std::fabs(x[k]) <= eps ? 1 : 0;
  return n;
}

double max_abs_avx2(std::span<const double> x) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= x.size(); k += 4)
    acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign, _mm256_loadu_pd(x.data() + k)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = lanes[0];
  for (int j = 1; j < 4; ++j)
    m = lanes[j] > m ? lanes[j] : m;
  for (; k < x.size(); ++k)
    m = std::fabs(x[k]) > m ? std::fabs(x[k]) : m;
  return m;
}

constexpr KernelTable kAvx2Table{Isa::Avx2, fill_normals_avx2, abs_into_avx2, count_abs_le_avx2,
                                 max_abs_avx2};

} // namespace

namespace detail {
const KernelTable* avx2_table() noexcept { return &kAvx2Table; }
} // namespace detail

} // namespace sigmalab::simd
