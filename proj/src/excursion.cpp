#include "sigmalab/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sigmalab/rng.hpp"

namespace sigmalab::excursion {

namespace {

std::size_t smaller_abs(const Path& x, std::size_t k) {
  return std::fabs(x[k + 1]) < std::fabs(x[k]) ? k + 1 : k;
}

void sort_unique(std::vector<std::size_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

} // namespace

std::vector<std::size_t> zero_set(const Path& x, double band) {
  if (!(band >= 0.0))
    throw std::invalid_argument("zero_set: band must be >= 0");
  std::vector<std::size_t> out;
  const std::size_t n = x.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (std::fabs(x[k]) <= band)
      out.push_back(k);
    if (k + 1 < n && x[k] * x[k + 1] < 0.0)
      out.push_back(smaller_abs(x, k));
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> zero_set(const DecomposedPath& p, double band) {
  p.validate();
  std::vector<std::size_t> out = zero_set(p.x, band);
  const std::size_t n = p.x.size();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const auto mag = [&](std::size_t k) {
    return std::fabs(p.x[k]) + std::fabs(p.m[k]) + std::fabs(p.v[k]);
  };
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double dv = std::fabs(p.v[k + 1] - p.v[k]);
    if (dv > 8.0 * eps * (mag(k) + mag(k + 1)))
      out.push_back(smaller_abs(p.x, k));
  }
  sort_unique(out);
  return out;
}

std::vector<std::uint8_t> zero_mask(const std::vector<std::size_t>& zeros, std::size_t size) {
  std::vector<std::uint8_t> mask(size, 0);
  for (std::size_t k : zeros)
    if (k < size)
      mask[k] = 1;
  return mask;
}

ExcursionSet excursion_decompose(const Path& x, double band) {
  return excursion_decompose(x, zero_set(x, band));
}

ExcursionSet excursion_decompose(const Path& x, std::vector<std::size_t> zeros) {
  ExcursionSet exc;
  exc.source_grid = x.grid();
  const std::size_t n = x.size();
  const auto mask = zero_mask(zeros, n);
  std::size_t k = 0;
  while (k < n) {
    if (mask[k]) {
      ++k;
      continue;
    }
    Interval iv;
    iv.begin = k;
    iv.g = k == 0 ? 0 : k - 1;
    std::size_t peak = k;
    while (k < n && !mask[k]) {
      if (std::fabs(x[k]) > std::fabs(x[peak]))
        peak = k;
      ++k;
    }
    iv.end = k;
    iv.unfinished = k == n;
    iv.d = iv.unfinished ? n - 1 : k;
    iv.sign = x[peak] > 0.0 ? 1 : -1;
    exc.intervals.push_back(iv);
  }
  exc.zeros = std::move(zeros);
  return exc;
}

std::vector<std::size_t> last_zero_index(const std::vector<std::size_t>& zeros, std::size_t size) {
  if (zeros.empty() || zeros.front() != 0)
    throw std::invalid_argument("last_zero: index 0 is not in the zero set");
  std::vector<std::size_t> g(size);
  std::size_t z = 0, last = 0;
  for (std::size_t k = 0; k < size; ++k) {
    while (z < zeros.size() && zeros[z] <= k)
      last = zeros[z++];
    g[k] = last;
  }
  return g;
}

Path last_zero(const Path& x, double band) {
  const auto g = last_zero_index(zero_set(x, band), x.size());
  Path out(x.grid());
  for (std::size_t k = 0; k < g.size(); ++k)
    out[k] = x.grid().time(g[k]);
  return out;
}

std::vector<double> SignProcess::predictable() const {
  std::vector<double> h(path.values().begin(), path.values().end());
  for (std::size_t k = 0; k < h.size(); ++k)
    if (on_zero[k])
      h[k] = zero_projection;
  return h;
}

SignProcess sign_K(const Path& x, const ExcursionSet& exc) {
  SignProcess s{Path(x.grid()), 0.0, zero_mask(exc.zeros, x.size())};
  bool all_pos = !exc.intervals.empty(), all_neg = !exc.intervals.empty();
  std::size_t next = 0;
  for (const Interval& iv : exc.intervals) {
    all_pos &= iv.sign > 0;
    all_neg &= iv.sign < 0;
    for (std::size_t k = next; k < iv.begin; ++k)
      s.path[k] = iv.sign;
    for (std::size_t k = iv.begin; k < iv.end; ++k)
      s.path[k] = iv.sign;
    next = iv.end;
  }
  s.zero_projection = all_pos ? 1.0 : (all_neg ? -1.0 : 0.0);
  return s;
}

SignProcess make_z_alpha(const ExcursionSet& exc, double alpha, const SeedSpec& seed) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("make_z_alpha: alpha must lie in [0, 1]");
  const TimeGrid& grid = exc.source_grid;
  SignProcess s{Path(grid), 2.0 * alpha - 1.0, zero_mask(exc.zeros, grid.size())};
  const auto addr = rng::StreamAddress::from(seed, rng::Domain::ExcursionSigns);
  for (std::size_t n = 0; n < exc.intervals.size(); ++n) {
    const Interval& iv = exc.intervals[n];
    const double zeta = rng::uniform_at(addr, n) < alpha ? 1.0 : -1.0;
    for (std::size_t k = iv.begin; k < iv.end; ++k)
      s.path[k] = zeta;
  }
  return s;
}

} // namespace sigmalab::excursion
