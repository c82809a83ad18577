#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "sigmalab/simd/kernels.hpp"

namespace sigmalab::simd {

#if !SIGMALAB_HAVE_AVX2
namespace detail {
const KernelTable* avx2_table() noexcept { return nullptr; }
} // namespace detail
#endif

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
  case Isa::Scalar:
    return "scalar";
  case Isa::Avx2:
    return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
  case Isa::Scalar:
    return true;
  case Isa::Avx2:
#if SIGMALAB_HAVE_AVX2
    return detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2");
#else
    return false;
#endif
  }
  return false;
}

const KernelTable& kernels(Isa isa) {
  if (!isa_available(isa))
    throw std::runtime_error("ISA not available: " + std::string(isa_name(isa)));
  return isa == Isa::Avx2 ? *detail::avx2_table() : detail::scalar_table();
}

namespace {

Isa initial_isa() {
  if (const char* env = std::getenv("SIGMALAB_ISA")) {
    const std::string want(env);
    if (want == "scalar")
      return Isa::Scalar;
    if (want == "avx2" && isa_available(Isa::Avx2))
      return Isa::Avx2;
  }
  return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{&kernels(initial_isa())};
  return table;
}

} // namespace

const KernelTable& kernels() { return *active().load(std::memory_order_relaxed); }

void force_isa(Isa isa) { active().store(&kernels(isa), std::memory_order_relaxed); }

} // namespace sigmalab::simd
