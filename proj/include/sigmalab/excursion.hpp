#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sigmalab/types.hpp"

namespace sigmalab::excursion {

/// Indices k with |x_k| <= band, plus one index per sign change
/// x_k * x_{k+1} < 0, attributed to the endpoint with smaller |x| (ties go to
/// k). Sorted, no duplicates.
std::vector<std::size_t> zero_set(const Path& x, double band = 0.0);

/// Zero set of a decomposed path: zero_set(x, band) plus the steps on which
/// V moves by more than rounding, attributed like crossings. For X = |B| this
/// recovers the crossing set of B, which |B| itself cannot see.
std::vector<std::size_t> zero_set(const DecomposedPath& x, double band = 0.0);

/// Boolean view of an index set over a grid of `size` points.
std::vector<std::uint8_t> zero_mask(const std::vector<std::size_t>& zeros, std::size_t size);

struct Interval {
  std::size_t g = 0;      // zero index opening the excursion (0 if none precedes it)
  std::size_t d = 0;      // zero index closing it, or the final index if unfinished
  std::size_t begin = 0;  // first index strictly inside
  std::size_t end = 0;    // one past the last index strictly inside
  int sign = 0;
  bool unfinished = false;

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct ExcursionSet {
  std::vector<Interval> intervals;
  TimeGrid source_grid;
  std::vector<std::size_t> zeros;
};

/// Maximal runs of indices outside the zero set. The sign of a run is the
/// sign of x at its largest |x|.
ExcursionSet excursion_decompose(const Path& x, double band = 0.0);
/// Same, over an explicit zero set (e.g. from the DecomposedPath overload).
ExcursionSet excursion_decompose(const Path& x, std::vector<std::size_t> zeros);

/// g(k): latest zero index <= k. Throws if index 0 is not a zero.
std::vector<std::size_t> last_zero_index(const std::vector<std::size_t>& zeros, std::size_t size);

/// gamma_t = t_{g(k)} as a path.
Path last_zero(const Path& x, double band = 0.0);

struct SignProcess {
  Path path;
  // Value of the predictable surrogate at zero-set indices: the conditional
  // mean of the sign of the excursion about to start.
  double zero_projection = 0.0;
  std::vector<std::uint8_t> on_zero;

  /// Left-point integrand: path off the zero set, zero_projection on it.
  std::vector<double> predictable() const;
};

/// K: the sign of the current excursion, and at zero indices the sign of the
/// next one (0 after the last).
SignProcess sign_K(const Path& x, const ExcursionSet& exc);

/// Z^alpha: iid per-excursion signs, +1 with probability alpha, drawn from
/// the ExcursionSigns stream of `seed`; 0 on the zero set.
SignProcess make_z_alpha(const ExcursionSet& exc, double alpha, const SeedSpec& seed);

} // namespace sigmalab::excursion
