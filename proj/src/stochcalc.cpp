#include "sigmalab/stochcalc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sigmalab/excursion.hpp"
#include "sigmalab/simd/kernels.hpp"

namespace sigmalab::stochcalc {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

} // namespace

Path ito_integral(const Path& h, const Path& x) {
  require_same_grid(h, x, "ito_integral");
  return ito_integral(h.values(), x);
}

Path ito_integral(std::span<const double> h, const Path& x) {
  if (h.size() != x.size())
    throw std::invalid_argument("ito_integral: integrand length mismatch");
  Path out(x.grid());
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    acc += h[k] * (x[k + 1] - x[k]);
    out[k + 1] = acc;
  }
  return out;
}

Path quadratic_variation(const Path& x) {
  Path out(x.grid());
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double d = x[k + 1] - x[k];
    acc += d * d;
    out[k + 1] = acc;
  }
  return out;
}

LocalTimePath local_time_occupation(const Path& x, double eps) {
  if (!(eps > 0.0))
    throw std::invalid_argument("local_time_occupation: eps must be > 0");
  const double w = x.grid().dt() / (2.0 * eps);
  Path out(x.grid());
  std::size_t hits = 0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    hits += std::fabs(x[k]) <= eps ? 1 : 0;
    out[k + 1] = static_cast<double>(hits) * w;
  }
  return out;
}

LocalTimePath local_time_downcrossing(const Path& x, double eps, bool grid_correction) {
  if (!(eps > 0.0))
    throw std::invalid_argument("local_time_downcrossing: eps must be > 0");
  const double width = eps + (grid_correction ? 2.0 * kGaussianOvershoot * std::sqrt(x.grid().dt()) : 0.0);
  const auto mask = excursion::zero_mask(excursion::zero_set(x), x.size());
  Path out(x.grid());
  bool armed = false;
  std::size_t count = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (armed && mask[k]) {
      ++count;
      armed = false;
    }
    if (std::fabs(x[k]) >= eps)
      armed = true;
    out[k] = static_cast<double>(count) * width;
  }
  return out;
}

LocalTimePath local_time_tanaka(const DecomposedPath& reflected) {
  reflected.validate();
  return reflected.v;
}

LocalTimePath local_time_tanaka(const Path& b) {
  Path out(b.grid());
  double l = 0.0;
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    l += (std::fabs(b[k + 1]) - std::fabs(b[k])) - sgn(b[k]) * (b[k + 1] - b[k]);
    out[k + 1] = l;
  }
  return out;
}

IdentityReport check_tanaka(const Path& b, double eps) {
  const std::size_t n = b.size();
  Path absb(b.grid()), sgnb(b.grid());
  simd::kernels().abs_into(b.values(), absb.values());
  for (std::size_t k = 0; k < n; ++k)
    sgnb[k] = sgn(b[k]);
  Path integral = ito_integral(sgnb, b);
  Path occ = local_time_occupation(b, eps);
  Path r(b.grid());
  for (std::size_t k = 0; k < n; ++k)
    r[k] = (absb[k] - absb[0]) - integral[k] - occ[k];
  IdentityReport rep;
  rep.identity_name = "tanaka";
  rep.grid = b.grid();
  rep.sup_residual = sup_abs(r.values());
  rep.l2_residual = l2_norm(r.values(), b.grid().dt());
  rep.components = {{"abs_b", std::move(absb)},
                    {"ito_sgn_db", std::move(integral)},
                    {"local_time_occupation", std::move(occ)},
                    {"residual", std::move(r)}};
  return rep;
}

BalayageReport check_balayage(const Path& k, const Path& y, double osc_tol) {
  require_same_grid(k, y, "check_balayage");
  const std::size_t n = y.size();
  const auto exc = excursion::excursion_decompose(y);
  const auto g = excursion::last_zero_index(exc.zeros, n);
  Path kg(y.grid());
  for (std::size_t j = 0; j < n; ++j)
    kg[j] = k[g[j]];
  Path integral = ito_integral(kg, y);
  Path r(y.grid());
  for (std::size_t j = 0; j < n; ++j)
    r[j] = kg[j] * y[j] - k[0] * y[0] - integral[j];

  BalayageReport rep;
  for (const auto& iv : exc.intervals) {
    const std::size_t lo = iv.begin == 0 ? 0 : iv.g;
    double mn = r[lo], mx = r[lo];
    for (std::size_t j = lo; j < iv.end; ++j) {
      mn = std::min(mn, r[j]);
      mx = std::max(mx, r[j]);
    }
    rep.max_excursion_oscillation = std::max(rep.max_excursion_oscillation, mx - mn);
  }
  for (std::size_t j = 0; j + 1 < n; ++j)
    rep.total_variation += std::fabs(r[j + 1] - r[j]);

  rep.identity.identity_name = "balayage";
  rep.identity.grid = y.grid();
  rep.identity.sup_residual = rep.max_excursion_oscillation;
  rep.identity.l2_residual = l2_norm(r.values(), y.grid().dt());
  rep.identity.tolerance = osc_tol;
  rep.identity.pass = rep.max_excursion_oscillation <= osc_tol;
  rep.identity.components = {{"k_gamma", std::move(kg)},
                             {"integral", std::move(integral)},
                             {"R", std::move(r)}};
  return rep;
}

double sup_abs(std::span<const double> r) { return simd::kernels().max_abs(r); }

double l2_norm(std::span<const double> r, double dt) {
  double acc = 0.0;
  for (double v : r)
    acc += v * v;
  return std::sqrt(acc * dt);
}

} // namespace sigmalab::stochcalc
