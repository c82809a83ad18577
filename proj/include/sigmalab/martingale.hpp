#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigmalab/types.hpp"

namespace sigmalab::sigma {

/// One path's contribution: N_t - N_s and the probe values at s.
struct MartingaleSample {
  double increment = 0.0;
  std::vector<double> probes;
};

struct MartingaleReport {
  double score = 0.0;  // max |t| over the intercept and retained probes
  std::vector<std::string> names;
  std::vector<double> t_stats;
  std::vector<std::string> dropped;  // probes removed as constant or collinear
  std::size_t n_paths = 0;
  double s = 0.0;
  double t = 0.0;
  bool degenerate = false;  // increments have zero variance
  bool pass = false;
  static constexpr double kThreshold = 4.0;
};

/// OLS of increments on [1, probes...] with heteroskedasticity-robust (HC1)
/// standard errors. pass iff score < 4.
MartingaleReport martingale_regression(std::span<const MartingaleSample> samples,
                                       const std::vector<std::string>& probe_names);

/// A past-measurable probe: value for path `i` at grid index `k`.
struct Probe {
  std::string name;
  std::function<double(std::size_t i, std::size_t k)> eval;
};

/// Regresses N_t - N_s on N_s and the extra probes at s. Defaults: s = T/2,
/// t = T.
MartingaleReport martingale_test(std::span<const Path> ensemble, const std::vector<Probe>& probes = {},
                                 std::optional<double> s = std::nullopt,
                                 std::optional<double> t = std::nullopt);

} // namespace sigmalab::sigma
