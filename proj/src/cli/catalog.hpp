#pragma once

#include <string_view>

namespace sigmalab::cli {

struct CatalogEntry {
  std::string_view suite;
  std::string_view name;
  std::string_view statement;
  std::string_view tolerance;
};

inline constexpr CatalogEntry kCatalog[] = {
    {"sigma-verify", "class_sigma",
     "X = M + V with dV carried by {X = 0}: carried_ratio = sum_{|x| > band} |dV| / sum |dV|, band = 2 sqrt(dt); "
     "M passes the martingale test",
     "carried_ratio <= tolerances.carried_ratio; score < tolerances.martingale_score"},
    {"sigma-verify", "abs_equals_abs_martingale",
     "M = Z^{1/2} X is a martingale with |M| = |X| off the zero set and X = K_g |M|; for X = |B| or B the law of "
     "M_T is N(0, T)",
     "exact equality; score < tolerances.martingale_score; KS < max(tolerances.ks, 1.63 / sqrt(n))"},
    {"sigma-verify", "martingale_drift_control",
     "control: B_t + t must be rejected by the martingale test", "score > 10"},
    {"sigma-verify", "zero_set_coincidence",
     "zero sets of X and B coincide; with z constant the increasing part of |X| is int z dL(B)",
     "symmetric difference < 1% of indices; |V - int z dL| <= 1e-9"},
    {"sigma-verify", "compensator",
     "|X| - int z dL(B) and |X| - z_gamma |B| are martingales", "both scores < tolerances.martingale_score"},
    {"sigma-verify", "f_transform",
     "f(L) |X| - int z f(L) dL(B) is a martingale for f = 1{l <= 1}, with |N| <= lambda K C + C |X|",
     "score < tolerances.martingale_score; bound excess <= 1e-12"},
    {"identities", "tanaka_refinement",
     "Tanaka: |B_t| = int sgn(B) dB + L_t, L from occupation density with eps = dt^0.4",
     "median sup residual strictly decreasing along refinement.dt"},
    {"identities", "z_alpha_decomposition_alpha0",
     "Z^a X = int Z^a dM + (2a - 1) L for X = |B|, a = 0",
     "median sup residual strictly decreasing; finest < tolerances.eq3_finest"},
    {"identities", "z_alpha_decomposition_alpha0.5",
     "Z^a X = int Z^a dM + (2a - 1) L for X = |B|, a = 1/2",
     "median sup residual strictly decreasing; finest < tolerances.eq3_finest"},
    {"identities", "z_alpha_decomposition_alpha1",
     "Z^a X = int Z^a dM + (2a - 1) L for X = |B|, a = 1",
     "median sup residual strictly decreasing; finest < tolerances.eq3_finest"},
    {"identities", "balayage_constant_k",
     "balayage: k_gamma Y = k_0 Y_0 + int k_gamma dY + R, R constant on each excursion; k constant, Y = B",
     "oscillation of R per excursion <= tolerances.balayage_oscillation"},
    {"identities", "balayage_local_time_k",
     "balayage with k = L(B), Y = B; TV(R) and int dL reported",
     "oscillation of R per excursion <= tolerances.balayage_oscillation"},
    {"identities", "local_time_consistency",
     "occupation, downcrossing and Tanaka estimators of L_T agree (eps = dt^0.4); E L_T = sqrt(2T / pi); "
     "Tanaka L only moves on sign changes",
     "pairwise relative gap < tolerances.local_time_relative; |E L_T - sqrt(2T/pi)| <= tolerances.local_time_mean"},
    {"estimates", "exceedance",
     "P(exists t <= tau_u : |B_t| > phi(L_t)) = 1 - exp(-int_0^u dx / phi(x))",
     "|empirical - closed form| <= 3 stderr + tolerances.exceedance_allowance, >= 99% of paths decided"},
    {"estimates", "exceedance_tapered",
     "P(exists t <= tau_u : |X_t| > z phi(L_t(B))) = 1 - exp(-int_0^u dx / phi(x)) for the tapered "
     "construction X",
     "|empirical - closed form| <= 3 stderr + tolerances.exceedance_allowance"},
    {"estimates", "t_phi_boundary",
     "T_phi = inf{t : phi(L_t) |B_t| > 1} satisfies |B_T| phi(L_T) = 1",
     "value in [1, 1 + 3 sqrt(dt) phi(L_T)] on >= tolerances.boundary_fraction of paths"},
    {"estimates", "closed_form_quadrature",
     "1 - exp(-int_0^u dx / phi) by Gauss-Kronrod quadrature equals the analytic value", "relative error <= 1e-9"},
    {"estimates", "t_phi_unreachable",
     "phi = 1e6 below level 10: no exceedance |B| > phi(L) at desk scale; paths are flagged, not failed",
     "no exceedance"},
    {"estimates", "arcsine_law", "last zero gamma on [0, 1]: P(gamma <= t) = (2 / pi) arcsin sqrt(t)",
     "KS < max(tolerances.ks, 1.63 / sqrt(n))"},
    {"estimates", "honest_time_law",
     "g = gamma and g = last zero of Z^{1/2} B have the law of gamma", "two-sample KS = 0"},
    {"representation", "azema_point",
     "R_t = P(gamma < t | F_t) = 2 Phi(|B_t| / sqrt(T - t)) - 1 at t = 0.5, B_t = 0.5 against nested Monte Carlo",
     "|nested - closed form| <= 3 stderr"},
    {"representation", "representation_abs_b",
     "X_t = E[X_T 1{gamma < t} | F_t] for X = |B|, X_T = |B_1|",
     "median |gap| / inner stderr < tolerances.representation_median"},
    {"representation", "representation_azema",
     "X_t = E[X_T 1{gamma < t} | F_t] for X = R, X_T = 1",
     "median |gap| / inner stderr < tolerances.representation_median"},
    {"representation", "representation_zero", "X = 0: both sides vanish",
     "median |gap| / inner stderr < tolerances.representation_median"},
    {"representation", "rx_product_zero", "<X, R> = 0 makes |X| R a martingale; X = 0",
     "precondition met; score < tolerances.martingale_score"},
    {"representation", "rx_product_abs_b",
     "X = |B| violates <X, R> = 0; the precondition must be flagged and the test skipped",
     "|normalized <|X|, R>| >= 0.1"},
    {"representation", "rx_product_signed",
     "X = K |B| with excursion signs independent of B beyond |B|; score reported", "informational"},
};

} // namespace sigmalab::cli
