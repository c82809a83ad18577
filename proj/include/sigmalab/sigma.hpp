#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigmalab/excursion.hpp"
#include "sigmalab/martingale.hpp"
#include "sigmalab/stochcalc.hpp"
#include "sigmalab/types.hpp"

namespace sigmalab::sigma {

/// Predictable functional of a driving path: eval(k, b[0..k]).
struct PredictableFunctional {
  std::string name;
  std::function<double(std::size_t k, std::span<const double> b_prefix)> eval;
  double bound = 0.0;  // declared sup |value|
  double z_min = 0.0;  // declared lower bound, used to guard divisions

  static PredictableFunctional constant(double c);
  /// c * min(1, |b_k| / delta).
  static PredictableFunctional tapered(double c, double delta);
};

struct SigmaVerdict {
  double carried_ratio = 0.0;
  double off_band_mass = 0.0;
  double total_mass = 0.0;
  std::optional<MartingaleReport> martingale;  // ensemble form only
  bool pass = false;
};

/// carried_ratio = sum over steps with min(|x_k|, |x_{k+1}|) > band of |dV|,
/// divided by sum |dV| (0/0 = 0). The single-path form cannot test M.
SigmaVerdict check_sigma(const DecomposedPath& x, double band, double tol);
SigmaVerdict check_sigma(std::span<const DecomposedPath> ensemble, double band, double tol);

struct ZTransform {
  DecomposedPath y;            // y = Z x, m' = int H dm, v' = (2 alpha - 1) L(x)
  excursion::SignProcess z;
  stochcalc::IdentityReport residual;  // y - m' - v'
};

/// y = Z^alpha x with its decomposition. The excursions are those of x (zero set of the
/// decomposed path); L(x) is the Tanaka part of x itself, i.e. its v.
ZTransform z_transform(const DecomposedPath& x, double alpha, const SeedSpec& seed);

struct AbsMartingale {
  Path m;                           // Z^{1/2} x
  double abs_mismatch_off_zero = 0.0;  // max | |x| - |m| | off the zero set (exactly 0)
  double abs_mismatch_on_zero = 0.0;   // max |x| on the zero set, where m = 0
  double reconstruction_error = 0.0;   // max |x - K_g |m|| off the zero set
};

AbsMartingale abs_equals_abs_martingale(const DecomposedPath& x, const SeedSpec& seed);

struct AbsMartingaleReport {
  double abs_mismatch_off_zero = 0.0;
  double abs_mismatch_on_zero = 0.0;
  double reconstruction_error = 0.0;
  MartingaleReport martingale;
  bool pass = false;
};

/// Path i uses SeedSpec{master_seed, i} for its excursion signs.
AbsMartingaleReport abs_equals_abs_martingale(std::span<const DecomposedPath> ensemble,
                                              std::uint64_t master_seed, std::size_t workers = 0);

struct Theorem31Options {
  double delta = 0.0;  // taper scale; 0 means 10 sqrt(dt)
};

struct Theorem31Path {
  DecomposedPath x;
  Path z;            // z_k
  Path z_gamma;      // z at the last zero of b
  Path local_time;   // Tanaka local time of b
  std::vector<std::size_t> zeros;  // zero set of b
  double delta = 0.0;
};

/// X_t = K z_{gamma_t} |B_t| exp(int_{gamma_t}^t u (dB - ds/B) - 1/2 int u^2 ds),
/// restarted on every excursion of b, skipping the first step of each.
/// Declared V = int H z dL(B) with H the predictable sign surrogate.
/// Throws if |u_k / b_k| exceeds u.bound / delta.
Theorem31Path construct_theorem31(const PredictableFunctional& z, const PredictableFunctional& u,
                                  const Path& b, const excursion::SignProcess* k_signs = nullptr,
                                  Theorem31Options opts = {});

struct CompensatorReport {
  MartingaleReport n;        // |X| - int z dL(B)
  MartingaleReport n_gamma;  // |X| - z_gamma |B|
  bool pass = false;
};

/// One path's increments of both compensated processes over [k_s, k_t], with
/// probes N_s, |B_s| and L_s.
struct CompensatorSample {
  MartingaleSample n;
  MartingaleSample n_gamma;
};

CompensatorSample compensator_sample(const Path& x, const PredictableFunctional& z, const Path& b,
                                     std::size_t k_s, std::size_t k_t);

inline const std::vector<std::string> kCompensatorProbes{"N_s", "|B_s|", "L_s"};

/// x[i] must vanish on the zero set of b[i].
CompensatorReport check_compensator(std::span<const Path> x, const PredictableFunctional& z,
                                    std::span<const Path> b);

/// |x| / z_gamma, guarded by z.z_min.
Path rescale_by_z_gamma(const Path& x, const PredictableFunctional& z, const Path& b);

struct BoundedFunction {
  std::string name;
  std::function<double(double)> eval;
  double bound = 1.0;
  std::optional<double> support;             // f = 0 beyond this level
  std::function<double(double)> antiderivative;  // optional exact primitive
};

struct FTransformPath {
  Path transformed;  // f(L_t) |x_t|
  Path F;            // int z f(L) dL
  Path n;            // transformed - F
};

FTransformPath f_transform(const Path& x, const PredictableFunctional& z, const Path& b,
                           const BoundedFunction& f);

struct FTransformReport {
  MartingaleReport martingale;
  bool bound_checked = false;
  double max_bound_excess = 0.0;  // max_t (|N_t| - (lambda K C + C |X_t|)), <= 0 when it holds
  bool pass = false;
};

/// Martingale test of the N paths; when f has compact support [0, lambda]
/// also checks |N_t| <= lambda K C + C |X_t| pathwise with K = z.bound and
/// C = f.bound.
FTransformReport f_transform(std::span<const Path> x, const PredictableFunctional& z,
                             std::span<const Path> b, const BoundedFunction& f);

struct ZeroSetVerdict {
  double symmetric_difference_ratio = 0.0;
  double increasing_part_error = 0.0;  // sup |V_declared - int z dL(B)|, when provided
  bool pass = false;
};

ZeroSetVerdict check_zero_set_coincidence(const DecomposedPath& x, const Path& b, double tol = 0.01,
                                          const PredictableFunctional* z = nullptr);

} // namespace sigmalab::sigma
