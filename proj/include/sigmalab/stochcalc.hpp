#pragma once

#include <span>
#include <string>
#include <vector>

#include "sigmalab/types.hpp"

namespace sigmalab::stochcalc {

/// Nondecreasing path starting at 0.
using LocalTimePath = Path;

struct Component {
  std::string name;
  Path path;
};

struct IdentityReport {
  std::string identity_name;
  TimeGrid grid;
  double sup_residual = 0.0;
  double l2_residual = 0.0;  // sqrt(sum_k r_k^2 dt)
  double tolerance = 0.0;
  bool pass = false;
  std::vector<Component> components;
};

/// I_0 = 0, I_{k+1} = I_k + h_k (x_{k+1} - x_k).
Path ito_integral(const Path& h, const Path& x);
Path ito_integral(std::span<const double> h, const Path& x);

Path quadratic_variation(const Path& x);

/// (1/2eps) * dt * #{j < k : |x_j| <= eps}.
LocalTimePath local_time_occupation(const Path& x, double eps);

/// Mean overshoot of a Gaussian random walk over a level, in units of the
/// step standard deviation: -zeta(1/2) / sqrt(2 pi).
inline constexpr double kGaussianOvershoot = 0.5825971579390106;

/// Width times the number of completed passages of |x| from >= eps down to
/// the zero set of x. The width is eps, or with grid_correction
/// eps + 2 kGaussianOvershoot sqrt(dt): on a grid both ends of the passage are
/// detected one overshoot late.
LocalTimePath local_time_downcrossing(const Path& x, double eps, bool grid_correction = true);

/// The v-part of a Tanaka decomposition of |B|.
LocalTimePath local_time_tanaka(const DecomposedPath& reflected);
/// Sum over steps of d|b| - sgn(b_k) db_k; exactly flat on steps without a
/// sign change.
LocalTimePath local_time_tanaka(const Path& b);

/// residual = |B| - int sgn(B) dB - L_occ(eps).
IdentityReport check_tanaka(const Path& b, double eps);

struct BalayageReport {
  IdentityReport identity;
  double max_excursion_oscillation = 0.0;
  double total_variation = 0.0;
};

/// R_t = k_{gamma_t} y_t - sum k_{gamma(t_j)} dy_j, with gamma the last zero
/// of y. R should only move on steps that enter the zero set of y.
BalayageReport check_balayage(const Path& k, const Path& y, double osc_tol = 1e-10);

double sup_abs(std::span<const double> r);
double l2_norm(std::span<const double> r, double dt);

} // namespace sigmalab::stochcalc
