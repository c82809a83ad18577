#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigmalab/stochcalc.hpp"
#include "sigmalab/types.hpp"

namespace sigmalab::estimates {

struct PhiSpec {
  std::string label;
  std::function<double(double)> phi;
  // Exact int_0^u dx/phi(x) if known; otherwise adaptive Gauss-Kronrod.
  std::function<double(double)> integral_exact;
  bool diverges = false;  // int_0^inf dx/phi = inf

  double integral_to(double u) const;
  /// 1 - exp(-int_0^u dx/phi).
  double closed_form(double u) const;

  static PhiSpec constant(double c);
  static PhiSpec exponential();  // phi(x) = e^x
};

/// First grid time with l > u.
std::optional<double> inverse_local_time(const stochcalc::LocalTimePath& l, double u);

struct EnsembleConfig {
  double dt = 1e-5;
  std::size_t n_paths = 10000;
  std::uint64_t master_seed = 1;
  double max_horizon = 50.0;  // cap on simulated time per path
  std::size_t workers = 0;
};

struct EstimateReport {
  std::string theorem;
  std::string phi_spec;
  double u = 0.0;
  std::size_t n_paths = 0;
  std::size_t n_decided = 0;
  double dt = 0.0;
  double empirical = 0.0;
  double closed_form = 0.0;
  double stderr_ = 0.0;
  double allowance = 0.02;
  bool horizon_flag = false;  // fewer than 99% of paths decided
  bool pass = false;
};

/// Per-path outcome of a run stopped at min(first exceedance, tau_{u_max}).
struct ExceedanceSample {
  bool exceeded = false;
  double level = 0.0;       // max L before the exceedance step; L_end otherwise
  double time = 0.0;        // exceedance time or stopping time
  double boundary = 0.0;    // |B_T| phi(L_T) at the exceedance
  bool horizon_hit = false;
};

/// Simulates |B| from 0 with Tanaka local time until |B_t| > phi(L_t) or
/// L_t > u_max.
ExceedanceSample simulate_exceedance(const PhiSpec& phi, double u_max, double dt,
                                     const SeedSpec& seed, double max_horizon);

/// Same event for |X| / z with X the tapered construction driven by B:
/// X = z |B| exp(int u (dB - ds/B) - 1/2 int u^2 ds) restarted at every zero,
/// u = u_c min(1, |B| / delta).
ExceedanceSample simulate_exceedance_tapered(const PhiSpec& phi, double u_max, double dt,
                                             const SeedSpec& seed, double max_horizon, double u_c,
                                             double delta);

/// Empirical P(exists t <= tau_u : |B_t| > phi(L_t)) for every u on the same
/// ensemble, so estimates are monotone in u. Undecided paths count as
/// misses and raise horizon_flag. Pass iff
/// |empirical - closed_form| <= 3 stderr + allowance.
std::vector<EstimateReport> exceedance_probability(const PhiSpec& phi, std::span<const double> us,
                                                   const EnsembleConfig& cfg,
                                                   std::vector<ExceedanceSample>* samples = nullptr);

using ExceedanceSimulator = std::function<ExceedanceSample(double u_max, const SeedSpec& seed)>;

/// Same aggregation over an arbitrary per-path simulator.
std::vector<EstimateReport> exceedance_probability(const PhiSpec& phi, std::span<const double> us,
                                                   const EnsembleConfig& cfg,
                                                   const ExceedanceSimulator& simulate,
                                                   std::vector<ExceedanceSample>* samples = nullptr);

struct TPhiResult {
  std::optional<double> time;
  std::optional<std::size_t> index;
  double level = 0.0;     // L at T_phi
  double boundary = 0.0;  // |B_T| phi(L_T); the identity says 1
  bool flagged = false;   // not reached on the available horizon
};

/// T_phi = inf{t : phi(L_t) |B_t| > 1} on a given path.
TPhiResult t_phi_stopping(const PhiSpec& phi, const Path& b);
/// Same, simulating until T_phi or max_horizon.
TPhiResult t_phi_stopping(const PhiSpec& phi, double dt, const SeedSpec& seed, double max_horizon);

/// R_t = 2 Phi(|B_t| / sqrt(T - t)) - 1 on grid times t < T, 0 on the zero
/// set of b.
Path azema_submartingale(const Path& b, double horizon = 1.0);

/// Closed form for one point.
double azema_value(double t, double b_t, double horizon);

struct NestedEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n_inner = 0;
};

/// Fraction of continuations of B from (t, b_t) with no zero in ]t, T].
NestedEstimate azema_nested(double t, double b_t, double horizon, double dt, std::size_t n_inner,
                            const SeedSpec& seed);

/// A process adapted to B with a terminal value on [0, T].
struct RepresentationSpec {
  std::string name;
  // X_t from the path prefix b[0..k].
  std::function<double(std::span<const double> prefix, double dt)> x_at;
  // X_T from the prefix up to t* and the continuation after it.
  std::function<double(std::span<const double> prefix, std::span<const double> continuation, double dt)>
      x_terminal;
  bool needs_continuation = false;

  static RepresentationSpec abs_b();
  static RepresentationSpec azema(double horizon = 1.0);
  static RepresentationSpec zero();
};

struct RepresentationConfig {
  double dt = 1e-4;
  double horizon = 1.0;
  double t_star = 0.5;
  std::size_t n_outer = 200;
  std::size_t n_inner = 1000;
  std::uint64_t master_seed = 1;
  std::size_t workers = 0;
};

struct RepresentationReport {
  std::string spec;
  std::vector<double> x_star;      // X_{t*} per outer path
  std::vector<double> inner_mean;  // E[X_T 1_{gamma < t*} | F_{t*}] estimates
  std::vector<double> inner_stderr;
  std::vector<double> deviation;   // |x_star - inner_mean| / inner_stderr
  double median_deviation = 0.0;
  double mean_abs_deviation = 0.0;
  std::size_t starved = 0;         // outer paths whose inner stderr is 0 with a nonzero gap
  std::size_t total_inner_steps = 0;
  bool pass = false;               // median deviation < 1.5
};

RepresentationReport representation_check(const RepresentationSpec& spec, const RepresentationConfig& cfg);

struct RxReport {
  double cross_variation = 0.0;  // sum d|X| dR over the probe window
  double normalized = 0.0;       // cross / sqrt(qv|X| qv R), 0/0 = 0
  bool precondition_met = false;
  std::optional<double> score;
};

/// <|X|, R> over [0, 0.9 T] averaged over the ensemble; if it is negligible
/// (normalized below 0.1) runs martingale_test on R |X|.
RxReport rx_product_martingale(std::span<const Path> x, std::span<const Path> b, double horizon = 1.0);

struct HonestTimeReport {
  double ks_g_vs_gamma = 0.0;
  double ks_flipped_vs_gamma = 0.0;
  double ks_gamma_vs_arcsine = 0.0;
  std::size_t n_paths = 0;
};

/// Last zeros on [0, T] of each path.
std::vector<double> last_zero_times(std::span<const Path> b);

double arcsine_cdf(double t);

/// sup |F_n - F|, F given as a CDF.
double ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

HonestTimeReport honest_time_law(std::span<const Path> b, std::uint64_t master_seed);
/// Streaming form: paths are generated one at a time from (grid, master_seed).
HonestTimeReport honest_time_law(const TimeGrid& grid, std::uint64_t master_seed, std::size_t n_paths,
                                 std::size_t workers = 0);

} // namespace sigmalab::estimates
