#include "sigmalab/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sigmalab {

TimeGrid::TimeGrid(double dt, std::size_t n_steps) : dt_(dt), n_steps_(n_steps) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("TimeGrid: dt must be finite and > 0");
  if (n_steps == 0)
    throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
}

TimeGrid TimeGrid::covering(double horizon, double dt) {
  if (!(horizon > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("TimeGrid::covering: horizon and dt must be > 0");
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(horizon / dt)));
  return TimeGrid(horizon / static_cast<double>(n), n);
}

std::size_t TimeGrid::index_at(double t) const noexcept {
  if (t <= 0.0)
    return 0;
  auto k = static_cast<std::size_t>(std::floor(t / dt_));
  // floor(t/dt) can land one off when t is an exact grid time.
  if (k + 1 <= n_steps_ && time(k + 1) <= t)
    ++k;
  while (k > 0 && time(k) > t)
    --k;
  return k > n_steps_ ? n_steps_ : k;
}

Path::Path(TimeGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("Path: expected " + std::to_string(grid_.size()) +
                                " samples, got " + std::to_string(values_.size()));
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (!std::isfinite(values_[k]))
      throw std::invalid_argument("Path: non-finite sample at index " + std::to_string(k));
}

Path::Path(TimeGrid grid) : grid_(grid), values_(grid.size(), 0.0) {}

void DecomposedPath::validate() const {
  require_same_grid(x, m, "DecomposedPath m");
  require_same_grid(x, v, "DecomposedPath v");
  if (v[0] != 0.0)
    throw std::invalid_argument("DecomposedPath: v must start at 0");
}

void require_same_grid(const Path& a, const Path& b, const char* what) {
  if (!(a.grid() == b.grid()) || a.size() != b.size())
    throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

} // namespace sigmalab
