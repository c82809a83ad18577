#include <algorithm>
#include <bit>
#include <cmath>

#include "normal_math.hpp"
#include "sigmalab/simd/kernels.hpp"

namespace sigmalab::simd {
namespace {

struct ScalarBackend {
  using V = double;
  using M = bool;
  static V set1(double a) { return a; }
  static V add(V a, V b) { return a + b; }
  static V sub(V a, V b) { return a - b; }
  static V mul(V a, V b) { return a * b; }
  static V div(V a, V b) { return a / b; }
  static V sqrt(V a) { return std::sqrt(a); }
  static V floor(V a) { return std::floor(a); }
  static M gt(V a, V b) { return a > b; }
  static M eq(V a, V b) { return a == b; }
  static M mask_or(M a, M b) { return a || b; }
  static V select(M m, V a, V b) { return m ? a : b; }
  static V split_exponent(V x, V& mant) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    mant = std::bit_cast<double>((bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull);
    return static_cast<double>(bits >> 52) - 1023.0;
  }
};

void normal_pair(const rng::StreamAddress& addr, std::uint32_t block, double& n0, double& n1) {
  const rng::Counter w = rng::philox4x32(addr.counter(block), addr.key);
  math::box_muller<ScalarBackend>(static_cast<double>(w[0] >> 5), static_cast<double>(w[1] >> 6),
                                  static_cast<double>(w[2] >> 5), static_cast<double>(w[3] >> 6),
                                  n0, n1);
}

void fill_normals_scalar(const rng::StreamAddress& addr, std::uint64_t first, std::span<double> out) {
  std::size_t i = 0;
  std::uint64_t idx = first;
  while (i < out.size()) {
    double n0, n1;
    normal_pair(addr, static_cast<std::uint32_t>(idx / 2), n0, n1);
    if (idx % 2 == 0) {
      out[i++] = n0;
      ++idx;
      if (i == out.size())
        break;
    }
    out[i++] = n1;
    ++idx;
  }
}

void abs_into_scalar(std::span<const double> in, std::span<double> out) {
  for (std::size_t k = 0; k < in.size(); ++k)
    out[k] = std::fabs(in[k]);
}

std::size_t count_abs_le_scalar(std::span<const double> x, double eps) {
  std::size_t n = 0;
  for (double v : x)
    n += std::fabs(v) <= eps ? 1 : 0;
  return n;
}

double max_abs_scalar(std::span<const double> x) {
  double m = 0.0;
  for (double v : x)
    m = std::max(m, std::fabs(v));
  return m;
}

constexpr KernelTable kScalarTable{Isa::Scalar, fill_normals_scalar, abs_into_scalar,
                                   count_abs_le_scalar, max_abs_scalar};

} // namespace

namespace detail {
const KernelTable& scalar_table() noexcept { return kScalarTable; }
} // namespace detail

} // namespace sigmalab::simd
