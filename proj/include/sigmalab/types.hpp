#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigmalab {

// Uniform time grid starting at t = 0. Grid times are k * dt, never
// accumulated by repeated addition.
class TimeGrid {
public:
  TimeGrid() = default;
  TimeGrid(double dt, std::size_t n_steps);

  /// Grid covering [0, horizon] with the step closest to `dt` that divides it.
  static TimeGrid covering(double horizon, double dt);

  double dt() const noexcept { return dt_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t size() const noexcept { return n_steps_ + 1; }
  double horizon() const noexcept { return static_cast<double>(n_steps_) * dt_; }
  double time(std::size_t k) const noexcept { return static_cast<double>(k) * dt_; }

  /// Largest index k with time(k) <= t (clamped to the grid).
  std::size_t index_at(double t) const noexcept;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
  double dt_ = 1.0;
  std::size_t n_steps_ = 1;
};

class Path {
public:
  Path() = default;
  /// Throws std::invalid_argument on length mismatch or non-finite samples.
  Path(TimeGrid grid, std::vector<double> values);
  /// Zero-filled path on `grid`.
  explicit Path(TimeGrid grid);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const noexcept { return values_[k]; }
  double& operator[](std::size_t k) noexcept { return values_[k]; }
  double back() const noexcept { return values_.back(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::vector<double>&& release() && noexcept { return std::move(values_); }

  friend bool operator==(const Path&, const Path&) = default;

private:
  TimeGrid grid_;
  std::vector<double> values_;
};

/// Address of one reproducible random stream.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint32_t stream_index = 0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// X = M + V with M the martingale part and V continuous, V_0 = 0.
struct DecomposedPath {
  Path x;
  Path m;
  Path v;

  const TimeGrid& grid() const noexcept { return x.grid(); }

  /// Throws std::invalid_argument if the three parts do not share a grid or
  /// if V_0 != 0.
  void validate() const;
};

void require_same_grid(const Path& a, const Path& b, const char* what);

} // namespace sigmalab
