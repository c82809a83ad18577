#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation and, where the CPU allows, an AVX2 variant selected once at
// runtime. The variants are bit-identical: the normal generator evaluates the
// same operation sequence in both, and the remaining kernels are exact.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "sigmalab/rng.hpp"

namespace sigmalab::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  // Standard normals number `first`, `first+1`, ... of the stream. Normal 2j
  // and 2j+1 come from Philox block j via Box-Muller.
  void (*fill_normals)(const rng::StreamAddress& addr, std::uint64_t first, std::span<double> out);
  // out[k] = |in[k]|. `out` may alias `in`.
  void (*abs_into)(std::span<const double> in, std::span<double> out);
  // Number of k with |x[k]| <= eps.
  std::size_t (*count_abs_le)(std::span<const double> x, double eps);
  // max_k |x[k]|, 0 for an empty span.
  double (*max_abs)(std::span<const double> x);
};

bool isa_available(Isa isa) noexcept;

/// Kernel table for a specific ISA. Throws std::runtime_error if the CPU
/// cannot run it.
const KernelTable& kernels(Isa isa);

/// Active table: the best available ISA unless overridden by force_isa() or
/// the SIGMALAB_ISA environment variable ("scalar" / "avx2").
const KernelTable& kernels();

void force_isa(Isa isa);

// Convenience wrappers over the active table.
inline void fill_normals(const rng::StreamAddress& addr, std::uint64_t first, std::span<double> out) {
  kernels().fill_normals(addr, first, out);
}

namespace detail {
const KernelTable& scalar_table() noexcept;
const KernelTable* avx2_table() noexcept;  // nullptr when not compiled in
} // namespace detail

} // namespace sigmalab::simd
