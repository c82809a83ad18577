#include "sigmalab/sigma.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sigmalab/parallel.hpp"

namespace sigmalab::sigma {

using excursion::SignProcess;

namespace {

std::vector<double> evaluate(const PredictableFunctional& f, const Path& b) {
  const auto vals = b.values();
  std::vector<double> out(b.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = f.eval(k, vals.subspan(0, k + 1));
  return out;
}

Probe abs_probe(std::span<const Path> paths, std::string name) {
  return {std::move(name), [paths](std::size_t i, std::size_t k) { return std::fabs(paths[i][k]); }};
}

} // namespace

PredictableFunctional PredictableFunctional::constant(double c) {
  return {"constant(" + std::to_string(c) + ")",
          [c](std::size_t, std::span<const double>) { return c; }, std::fabs(c), c};
}

PredictableFunctional PredictableFunctional::tapered(double c, double delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("tapered: delta must be > 0");
  return {"tapered(" + std::to_string(c) + ")",
          [c, delta](std::size_t, std::span<const double> b) {
            return c * std::min(1.0, std::fabs(b.back()) / delta);
          },
          std::fabs(c), 0.0};
}

SigmaVerdict check_sigma(const DecomposedPath& x, double band, double tol) {
  x.validate();
  SigmaVerdict out;
  for (std::size_t k = 0; k + 1 < x.x.size(); ++k) {
    const double dv = std::fabs(x.v[k + 1] - x.v[k]);
    out.total_mass += dv;
    if (std::min(std::fabs(x.x[k]), std::fabs(x.x[k + 1])) > band)
      out.off_band_mass += dv;
  }
  out.carried_ratio = out.total_mass > 0.0 ? out.off_band_mass / out.total_mass : 0.0;
  out.pass = out.carried_ratio <= tol;
  return out;
}

SigmaVerdict check_sigma(std::span<const DecomposedPath> ensemble, double band, double tol) {
  SigmaVerdict out;
  std::vector<Path> m;
  std::vector<Path> x;
  m.reserve(ensemble.size());
  x.reserve(ensemble.size());
  for (const auto& p : ensemble) {
    const SigmaVerdict one = check_sigma(p, band, tol);
    out.off_band_mass += one.off_band_mass;
    out.total_mass += one.total_mass;
    m.push_back(p.m);
    x.push_back(p.x);
  }
  out.carried_ratio = out.total_mass > 0.0 ? out.off_band_mass / out.total_mass : 0.0;
  out.martingale = martingale_test(m, {abs_probe(x, "|X_s|")});
  out.pass = out.carried_ratio <= tol && out.martingale->pass;
  return out;
}

ZTransform z_transform(const DecomposedPath& x, double alpha, const SeedSpec& seed) {
  x.validate();
  const auto exc = excursion::excursion_decompose(x.x, excursion::zero_set(x));
  SignProcess z = excursion::make_z_alpha(exc, alpha, seed);
  const std::vector<double> h = z.predictable();
  const std::size_t n = x.x.size();
  Path y(x.grid()), v(x.grid()), r(x.grid());
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = z.path[k] * x.x[k];
    v[k] = (2.0 * alpha - 1.0) * x.v[k];
  }
  Path m = stochcalc::ito_integral(h, x.m);
  for (std::size_t k = 0; k < n; ++k)
    r[k] = y[k] - m[k] - v[k];

  ZTransform out{{std::move(y), std::move(m), std::move(v)}, std::move(z), {}};
  auto& rep = out.residual;
  rep.identity_name = "z_alpha_decomposition";
  rep.grid = x.grid();
  rep.sup_residual = stochcalc::sup_abs(r.values());
  rep.l2_residual = stochcalc::l2_norm(r.values(), x.grid().dt());
  rep.components = {{"z_x", out.y.x}, {"ito_z_dm", out.y.m}, {"drift", out.y.v}, {"residual", std::move(r)}};
  return out;
}

AbsMartingale abs_equals_abs_martingale(const DecomposedPath& x, const SeedSpec& seed) {
  x.validate();
  const auto exc = excursion::excursion_decompose(x.x, excursion::zero_set(x));
  const SignProcess z = excursion::make_z_alpha(exc, 0.5, seed);
  const SignProcess kp = excursion::sign_K(x.x, exc);
  const auto g = excursion::last_zero_index(exc.zeros, x.x.size());
  AbsMartingale out{Path(x.grid())};
  for (std::size_t k = 0; k < x.x.size(); ++k) {
    out.m[k] = z.path[k] * x.x[k];
    if (z.on_zero[k]) {
      out.abs_mismatch_on_zero = std::max(out.abs_mismatch_on_zero, std::fabs(x.x[k]));
      continue;
    }
    out.abs_mismatch_off_zero =
        std::max(out.abs_mismatch_off_zero, std::fabs(std::fabs(x.x[k]) - std::fabs(out.m[k])));
    out.reconstruction_error =
        std::max(out.reconstruction_error, std::fabs(x.x[k] - kp.path[g[k]] * std::fabs(out.m[k])));
  }
  return out;
}

AbsMartingaleReport abs_equals_abs_martingale(std::span<const DecomposedPath> ensemble,
                                              std::uint64_t master_seed, std::size_t workers) {
  auto per = parallel_map<AbsMartingale>(ensemble.size(), workers, [&](std::size_t i) {
    return abs_equals_abs_martingale(ensemble[i], SeedSpec{master_seed, static_cast<std::uint32_t>(i)});
  });
  AbsMartingaleReport rep;
  std::vector<Path> m;
  std::vector<Path> x;
  for (std::size_t i = 0; i < per.size(); ++i) {
    rep.abs_mismatch_off_zero = std::max(rep.abs_mismatch_off_zero, per[i].abs_mismatch_off_zero);
    rep.abs_mismatch_on_zero = std::max(rep.abs_mismatch_on_zero, per[i].abs_mismatch_on_zero);
    rep.reconstruction_error = std::max(rep.reconstruction_error, per[i].reconstruction_error);
    m.push_back(std::move(per[i].m));
    x.push_back(ensemble[i].x);
  }
  rep.martingale = martingale_test(m, {abs_probe(x, "|X_s|")});
  rep.pass = rep.abs_mismatch_off_zero == 0.0 && rep.reconstruction_error == 0.0 && rep.martingale.pass;
  return rep;
}

Theorem31Path construct_theorem31(const PredictableFunctional& z, const PredictableFunctional& u,
                                  const Path& b, const SignProcess* k_signs, Theorem31Options opts) {
  const TimeGrid& grid = b.grid();
  const std::size_t n = b.size();
  const double dt = grid.dt();
  Theorem31Path out;
  out.delta = opts.delta > 0.0 ? opts.delta : 10.0 * std::sqrt(dt);
  if (k_signs)
    require_same_grid(k_signs->path, b, "construct_theorem31 signs");

  out.zeros = excursion::zero_set(b);
  const auto mask = excursion::zero_mask(out.zeros, n);
  const auto g = excursion::last_zero_index(out.zeros, n);
  out.local_time = stochcalc::local_time_tanaka(b);
  const std::vector<double> zv = evaluate(z, b);
  const std::vector<double> uv = evaluate(u, b);
  const double ratio_cap = u.bound / out.delta;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(zv[k] >= 0.0) || zv[k] > z.bound * (1.0 + 1e-12))
      throw std::invalid_argument("construct_theorem31: z outside [0, bound] at index " + std::to_string(k));
    if (std::fabs(uv[k]) > u.bound * (1.0 + 1e-12))
      throw std::invalid_argument("construct_theorem31: |u| exceeds its bound at index " + std::to_string(k));
    if (!mask[k] && std::fabs(uv[k]) > ratio_cap * std::fabs(b[k]) * (1.0 + 1e-12))
      throw std::invalid_argument("construct_theorem31: |u/B| exceeds the taper threshold at index " +
                                  std::to_string(k));
  }

  out.z = Path(grid, zv);
  out.z_gamma = Path(grid);
  Path x(grid), v(grid), m(grid);
  double expo = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    out.z_gamma[k] = zv[g[k]];
    if (mask[k]) {
      x[k] = 0.0;
      expo = 0.0;
      continue;
    }
    const double sign = k_signs ? k_signs->path[k] : 1.0;
    x[k] = sign * zv[g[k]] * std::fabs(b[k]) * std::exp(expo);
    if (k + 1 < n)
      expo += uv[k] * ((b[k + 1] - b[k]) - dt / b[k]) - 0.5 * uv[k] * uv[k] * dt;
  }
  const std::vector<double> h = k_signs ? k_signs->predictable() : std::vector<double>(n, 1.0);
  for (std::size_t k = 0; k + 1 < n; ++k)
    v[k + 1] = v[k] + h[k] * zv[k] * (out.local_time[k + 1] - out.local_time[k]);
  for (std::size_t k = 0; k < n; ++k)
    m[k] = x[k] - v[k];
  out.x = {std::move(x), std::move(m), std::move(v)};
  return out;
}

CompensatorSample compensator_sample(const Path& x, const PredictableFunctional& z, const Path& b,
                                     std::size_t k_s, std::size_t k_t) {
  require_same_grid(x, b, "compensator_sample");
  if (!(k_s < k_t && k_t < x.size()))
    throw std::invalid_argument("compensator_sample: need k_s < k_t < size");
  const auto g = excursion::last_zero_index(excursion::zero_set(b), b.size());
  const Path lt = stochcalc::local_time_tanaka(b);
  const std::vector<double> zv = evaluate(z, b);
  double comp = 0.0, comp_s = 0.0;
  for (std::size_t k = 1; k <= k_t; ++k) {
    comp += zv[k - 1] * (lt[k] - lt[k - 1]);
    if (k == k_s)
      comp_s = comp;
  }
  const double n1_s = std::fabs(x[k_s]) - comp_s, n1_t = std::fabs(x[k_t]) - comp;
  const double n2_s = std::fabs(x[k_s]) - zv[g[k_s]] * std::fabs(b[k_s]);
  const double n2_t = std::fabs(x[k_t]) - zv[g[k_t]] * std::fabs(b[k_t]);
  const double abs_b = std::fabs(b[k_s]);
  return {{n1_t - n1_s, {n1_s, abs_b, lt[k_s]}}, {n2_t - n2_s, {n2_s, abs_b, lt[k_s]}}};
}

CompensatorReport check_compensator(std::span<const Path> x, const PredictableFunctional& z,
                                    std::span<const Path> b) {
  if (x.size() != b.size() || x.empty())
    throw std::invalid_argument("check_compensator: need matching non-empty ensembles");
  const TimeGrid& grid = x.front().grid();
  const std::size_t k_s = grid.index_at(0.5 * grid.horizon()), k_t = grid.n_steps();
  std::vector<MartingaleSample> n1, n2;
  for (std::size_t i = 0; i < x.size(); ++i) {
    CompensatorSample one = compensator_sample(x[i], z, b[i], k_s, k_t);
    n1.push_back(std::move(one.n));
    n2.push_back(std::move(one.n_gamma));
  }
  CompensatorReport rep;
  rep.n = martingale_regression(n1, kCompensatorProbes);
  rep.n_gamma = martingale_regression(n2, kCompensatorProbes);
  for (auto* r : {&rep.n, &rep.n_gamma}) {
    r->s = grid.time(k_s);
    r->t = grid.time(k_t);
  }
  rep.pass = rep.n.pass && rep.n_gamma.pass;
  return rep;
}

Path rescale_by_z_gamma(const Path& x, const PredictableFunctional& z, const Path& b) {
  require_same_grid(x, b, "rescale_by_z_gamma");
  const auto g = excursion::last_zero_index(excursion::zero_set(b), b.size());
  const std::vector<double> zv = evaluate(z, b);
  Path out(x.grid());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double zg = zv[g[k]];
    if (x[k] == 0.0)
      continue;
    if (!(zg >= z.z_min) || zg <= 0.0)
      throw std::invalid_argument("rescale_by_z_gamma: z_gamma below z_min at index " + std::to_string(k));
    out[k] = std::fabs(x[k]) / zg;
  }
  return out;
}

FTransformPath f_transform(const Path& x, const PredictableFunctional& z, const Path& b,
                           const BoundedFunction& f) {
  require_same_grid(x, b, "f_transform");
  const std::size_t n = x.size();
  const Path lt = stochcalc::local_time_tanaka(b);
  const std::vector<double> zv = evaluate(z, b);
  FTransformPath out{Path(x.grid()), Path(x.grid()), Path(x.grid())};
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      const double l0 = lt[k - 1], l1 = lt[k];
      const double inc = f.antiderivative ? f.antiderivative(l1) - f.antiderivative(l0)
                                          : f.eval(0.5 * (l0 + l1)) * (l1 - l0);
      acc += zv[k - 1] * inc;
    }
    out.transformed[k] = f.eval(lt[k]) * std::fabs(x[k]);
    out.F[k] = acc;
    out.n[k] = out.transformed[k] - acc;
  }
  return out;
}

FTransformReport f_transform(std::span<const Path> x, const PredictableFunctional& z,
                             std::span<const Path> b, const BoundedFunction& f) {
  if (x.size() != b.size() || x.empty())
    throw std::invalid_argument("f_transform: need matching non-empty ensembles");
  FTransformReport rep;
  rep.bound_checked = f.support.has_value();
  rep.max_bound_excess = rep.bound_checked ? -INFINITY : 0.0;
  std::vector<Path> np(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    FTransformPath one = f_transform(x[i], z, b[i], f);
    if (rep.bound_checked) {
      const double lkc = *f.support * z.bound * f.bound;
      for (std::size_t k = 0; k < x[i].size(); ++k)
        rep.max_bound_excess =
            std::max(rep.max_bound_excess, std::fabs(one.n[k]) - (lkc + f.bound * std::fabs(x[i][k])));
    }
    np[i] = std::move(one.n);
  }
  rep.martingale = martingale_test(np, {abs_probe(b, "|B_s|")});
  rep.pass = rep.martingale.pass && (!rep.bound_checked || rep.max_bound_excess <= 1e-12);
  return rep;
}

ZeroSetVerdict check_zero_set_coincidence(const DecomposedPath& x, const Path& b, double tol,
                                          const PredictableFunctional* z) {
  require_same_grid(x.x, b, "check_zero_set_coincidence");
  const std::size_t n = b.size();
  const auto mx = excursion::zero_mask(excursion::zero_set(x), n);
  const auto mb = excursion::zero_mask(excursion::zero_set(b), n);
  std::size_t diff = 0;
  for (std::size_t k = 0; k < n; ++k)
    diff += mx[k] != mb[k] ? 1 : 0;
  ZeroSetVerdict out;
  out.symmetric_difference_ratio = static_cast<double>(diff) / static_cast<double>(n);
  bool ok = out.symmetric_difference_ratio < tol;
  if (z) {
    const Path lt = stochcalc::local_time_tanaka(b);
    const std::vector<double> zv = evaluate(*z, b);
    double acc = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0)
        acc += zv[k - 1] * (lt[k] - lt[k - 1]);
      out.increasing_part_error = std::max(out.increasing_part_error, std::fabs(x.v[k] - acc));
      scale = std::max(scale, std::fabs(acc));
    }
    ok = ok && out.increasing_part_error <= 1e-9 * std::max(1.0, scale);
  }
  out.pass = ok;
  return out;
}

} // namespace sigmalab::sigma
