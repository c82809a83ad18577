#include "sigmalab/pathgen.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sigmalab/parallel.hpp"
#include "sigmalab/simd/kernels.hpp"

namespace sigmalab::pathgen {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

constexpr std::size_t kStreamChunk = 4096;

} // namespace

Path gen_brownian(const TimeGrid& grid, const SeedSpec& seed) {
  const auto addr = rng::StreamAddress::from(seed, rng::Domain::BrownianIncrements);
  std::vector<double> values(grid.size());
  simd::fill_normals(addr, 0, std::span<double>(values).subspan(1));
  const double s = std::sqrt(grid.dt());
  double acc = 0.0;
  values[0] = 0.0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    acc += s * values[k];
    values[k] = acc;
  }
  return Path(grid, std::move(values));
}

DecomposedPath gen_reflected(const Path& b) {
  const std::size_t n = b.size();
  Path x(b.grid()), m(b.grid()), v(b.grid());
  simd::kernels().abs_into(b.values(), x.values());
  for (std::size_t k = 0; k + 1 < n; ++k)
    m[k + 1] = m[k] + sgn(b[k]) * (b[k + 1] - b[k]);
  m[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    v[k] = x[k] - m[k];
  // M_0 = 0 while |B_0| may not be; the offset belongs to M so that V_0 = 0.
  if (x[0] != 0.0) {
    for (std::size_t k = 0; k < n; ++k) {
      m[k] += x[0];
      v[k] = x[k] - m[k];
    }
  }
  return {std::move(x), std::move(m), std::move(v)};
}

DecomposedPath gen_drawdown(const Path& b) {
  const std::size_t n = b.size();
  Path x(b.grid()), m(b.grid()), v(b.grid());
  double s = b[0];
  for (std::size_t k = 0; k < n; ++k) {
    s = std::max(s, b[k]);
    x[k] = s - b[k];
    m[k] = -b[k];
    v[k] = s;
  }
  // Shift so V_0 = 0: S_0 = B_0, so X_0 = 0 and M absorbs the constant.
  const double s0 = v[0];
  for (std::size_t k = 0; k < n; ++k) {
    v[k] -= s0;
    m[k] += s0;
  }
  return {std::move(x), std::move(m), std::move(v)};
}

DecomposedPath as_decomposed(const Path& b) { return {b, b, Path(b.grid())}; }

Family family_from_name(std::string_view name) {
  if (name == "brownian")
    return Family::Brownian;
  if (name == "reflected")
    return Family::Reflected;
  if (name == "drawdown")
    return Family::Drawdown;
  throw std::invalid_argument("unknown process family: " + std::string(name));
}

std::string_view family_name(Family f) noexcept {
  switch (f) {
  case Family::Brownian:
    return "brownian";
  case Family::Reflected:
    return "reflected";
  case Family::Drawdown:
    return "drawdown";
  }
  return "unknown";
}

std::vector<DecomposedPath> gen_ensemble(Family family, const TimeGrid& grid,
                                         std::uint64_t master_seed, std::size_t n_paths,
                                         std::size_t workers) {
  if (n_paths == 0)
    throw std::invalid_argument("gen_ensemble: n_paths must be >= 1");
  return parallel_map<DecomposedPath>(n_paths, workers, [&](std::size_t i) {
    const Path b = gen_brownian(grid, SeedSpec{master_seed, static_cast<std::uint32_t>(i)});
    switch (family) {
    case Family::Reflected:
      return gen_reflected(b);
    case Family::Drawdown:
      return gen_drawdown(b);
    case Family::Brownian:
      break;
    }
    return as_decomposed(b);
  });
}

std::vector<Path> gen_brownian_ensemble(const TimeGrid& grid, std::uint64_t master_seed,
                                        std::size_t n_paths, std::size_t workers) {
  if (n_paths == 0)
    throw std::invalid_argument("gen_brownian_ensemble: n_paths must be >= 1");
  return parallel_map<Path>(n_paths, workers, [&](std::size_t i) {
    return gen_brownian(grid, SeedSpec{master_seed, static_cast<std::uint32_t>(i)});
  });
}

BrownianStream::BrownianStream(double dt, const rng::StreamAddress& addr, double start)
    : dt_(dt), sqrt_dt_(std::sqrt(dt)), addr_(addr), value_(start), buf_() {
  if (!(dt > 0.0))
    throw std::invalid_argument("BrownianStream: dt must be > 0");
}

void BrownianStream::refill() {
  buf_.resize(kStreamChunk);
  simd::fill_normals(addr_, drawn_, buf_);
  drawn_ += buf_.size();
  pos_ = 0;
}

} // namespace sigmalab::pathgen
