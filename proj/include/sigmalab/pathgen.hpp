#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sigmalab/rng.hpp"
#include "sigmalab/types.hpp"

namespace sigmalab::pathgen {

/// Brownian path with B_0 = 0. Increment k is sqrt(dt) times normal k of the
/// (seed, BrownianIncrements) stream, so a longer grid extends a shorter one.
Path gen_brownian(const TimeGrid& grid, const SeedSpec& seed);

/// X = |B|, M = left-point sum of sgn(B) dB with sgn(0) = 0, V = X - M.
DecomposedPath gen_reflected(const Path& b);

/// X = S - B with S the running maximum, M = -B, V = S.
DecomposedPath gen_drawdown(const Path& b);

/// X = M = B, V = 0.
DecomposedPath as_decomposed(const Path& b);

enum class Family { Brownian, Reflected, Drawdown };

Family family_from_name(std::string_view name);
std::string_view family_name(Family f) noexcept;

/// Path i uses SeedSpec{master_seed, i}. The result does not depend on
/// `workers` (0 = hardware concurrency).
std::vector<DecomposedPath> gen_ensemble(Family family, const TimeGrid& grid,
                                         std::uint64_t master_seed, std::size_t n_paths,
                                         std::size_t workers = 0);

std::vector<Path> gen_brownian_ensemble(const TimeGrid& grid, std::uint64_t master_seed,
                                        std::size_t n_paths, std::size_t workers = 0);

/// Incremental Brownian generator for runs whose length is not known up front
/// (stopping times, continuations). Produces the same values as gen_brownian
/// for the same address, chunk boundaries notwithstanding.
class BrownianStream {
public:
  BrownianStream(double dt, const rng::StreamAddress& addr, double start = 0.0);

  /// Value after the next step.
  double next() {
    if (pos_ == buf_.size())
      refill();
    value_ += sqrt_dt_ * buf_[pos_++];
    ++steps_;
    return value_;
  }

  double value() const noexcept { return value_; }
  std::uint64_t steps() const noexcept { return steps_; }
  double dt() const noexcept { return dt_; }

private:
  void refill();

  double dt_;
  double sqrt_dt_;
  rng::StreamAddress addr_;
  double value_;
  std::uint64_t steps_ = 0;
  std::uint64_t drawn_ = 0;
  std::vector<double> buf_;
  std::size_t pos_ = 0;
};

} // namespace sigmalab::pathgen
