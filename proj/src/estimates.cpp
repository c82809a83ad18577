#include "sigmalab/estimates.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sigmalab/excursion.hpp"
#include "sigmalab/martingale.hpp"
#include "sigmalab/parallel.hpp"
#include "sigmalab/pathgen.hpp"

namespace sigmalab::estimates {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double median(std::vector<double> v) {
  if (v.empty())
    return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Running |B| and its Tanaka local time.
struct TanakaState {
  double b = 0.0;
  double l = 0.0;
  void step(double next) {
    l += (std::fabs(next) - std::fabs(b)) - sgn(b) * (next - b);
    b = next;
  }
};

} // namespace

double PhiSpec::integral_to(double u) const {
  if (!(u >= 0.0))
    throw std::invalid_argument("PhiSpec::integral_to: u must be >= 0");
  if (integral_exact)
    return integral_exact(u);
  if (u == 0.0)
    return 0.0;
  auto inv = [this](double x) { return 1.0 / phi(x); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(inv, 0.0, u, 15, 1e-13);
}

double PhiSpec::closed_form(double u) const { return -std::expm1(-integral_to(u)); }

PhiSpec PhiSpec::constant(double c) {
  if (!(c > 0.0))
    throw std::invalid_argument("PhiSpec::constant: c must be > 0");
  return {"constant(" + std::to_string(c) + ")", [c](double) { return c; },
          [c](double u) { return u / c; }, true};
}

PhiSpec PhiSpec::exponential() {
  return {"exp", [](double x) { return std::exp(x); },
          [](double u) { return std::isinf(u) ? 1.0 : -std::expm1(-u); }, false};
}

std::optional<double> inverse_local_time(const stochcalc::LocalTimePath& l, double u) {
  for (std::size_t k = 0; k < l.size(); ++k)
    if (l[k] > u)
      return l.grid().time(k);
  return std::nullopt;
}

ExceedanceSample simulate_exceedance(const PhiSpec& phi, double u_max, double dt, const SeedSpec& seed,
                                     double max_horizon) {
  pathgen::BrownianStream stream(dt, rng::StreamAddress::from(seed, rng::Domain::BrownianIncrements));
  const auto max_steps = static_cast<std::uint64_t>(std::ceil(max_horizon / dt));
  TanakaState st;
  double lmax = 0.0;
  ExceedanceSample out;
  for (std::uint64_t k = 1; k <= max_steps; ++k) {
    st.step(stream.next());
    const double f = phi.phi(st.l);
    if (std::fabs(st.b) > f) {
      out.exceeded = true;
      out.level = lmax;
      out.time = static_cast<double>(k) * dt;
      out.boundary = std::fabs(st.b) * f;
      return out;
    }
    lmax = std::max(lmax, st.l);
    if (lmax > u_max) {
      out.level = lmax;
      out.time = static_cast<double>(k) * dt;
      return out;
    }
  }
  out.level = lmax;
  out.time = static_cast<double>(max_steps) * dt;
  out.horizon_hit = true;
  return out;
}

ExceedanceSample simulate_exceedance_tapered(const PhiSpec& phi, double u_max, double dt,
                                             const SeedSpec& seed, double max_horizon, double u_c,
                                             double delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("simulate_exceedance_tapered: delta must be > 0");
  pathgen::BrownianStream stream(dt, rng::StreamAddress::from(seed, rng::Domain::BrownianIncrements));
  const auto max_steps = static_cast<std::uint64_t>(std::ceil(max_horizon / dt));
  // Index k is settled once b_{k+1} is known: crossings go to the endpoint
  // with smaller |b|, ties to the earlier one.
  double prev = 0.0, cur = 0.0, next = stream.next();
  double l = 0.0, lmax = 0.0, expo = 0.0;
  bool prev_zero_claim = false;  // the step (k-1, k) attributes its crossing to k
  ExceedanceSample out;
  for (std::uint64_t k = 0; k < max_steps; ++k) {
    if (k > 0) {
      prev = cur;
      cur = next;
      next = stream.next();
      l += (std::fabs(cur) - std::fabs(prev)) - sgn(prev) * (cur - prev);
    }
    const bool cross_next = cur * next < 0.0 && std::fabs(cur) <= std::fabs(next);
    const bool zero = cur == 0.0 || cross_next || prev_zero_claim;
    prev_zero_claim = cur * next < 0.0 && std::fabs(next) < std::fabs(cur);
    double x = 0.0;
    if (zero) {
      expo = 0.0;
    } else {
      x = std::fabs(cur) * std::exp(expo);
      const double u = u_c * std::min(1.0, std::fabs(cur) / delta);
      expo += u * ((next - cur) - dt / cur) - 0.5 * u * u * dt;
    }
    const double f = phi.phi(l);
    if (x > f) {
      out.exceeded = true;
      out.level = lmax;
      out.time = static_cast<double>(k) * dt;
      out.boundary = x * f;
      return out;
    }
    lmax = std::max(lmax, l);
    if (lmax > u_max) {
      out.level = lmax;
      out.time = static_cast<double>(k) * dt;
      return out;
    }
  }
  out.level = lmax;
  out.time = static_cast<double>(max_steps) * dt;
  out.horizon_hit = true;
  return out;
}

std::vector<EstimateReport> exceedance_probability(const PhiSpec& phi, std::span<const double> us,
                                                   const EnsembleConfig& cfg,
                                                   std::vector<ExceedanceSample>* samples_out) {
  return exceedance_probability(
      phi, us, cfg,
      [&](double u_max, const SeedSpec& seed) {
        return simulate_exceedance(phi, u_max, cfg.dt, seed, cfg.max_horizon);
      },
      samples_out);
}

std::vector<EstimateReport> exceedance_probability(const PhiSpec& phi, std::span<const double> us,
                                                   const EnsembleConfig& cfg,
                                                   const ExceedanceSimulator& simulate,
                                                   std::vector<ExceedanceSample>* samples_out) {
  if (us.empty())
    throw std::invalid_argument("exceedance_probability: no u values");
  for (double u : us)
    if (!(u > 0.0))
      throw std::invalid_argument("exceedance_probability: u must be > 0");
  const double u_max = *std::max_element(us.begin(), us.end());
  auto samples = parallel_map<ExceedanceSample>(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    return simulate(u_max, SeedSpec{cfg.master_seed, static_cast<std::uint32_t>(i)});
  });
  std::vector<EstimateReport> out;
  for (double u : us) {
    EstimateReport r;
    r.theorem = "exceedance_before_inverse_local_time";
    r.phi_spec = phi.label;
    r.u = u;
    r.n_paths = cfg.n_paths;
    r.dt = cfg.dt;
    std::size_t hits = 0;
    for (const auto& s : samples) {
      const bool decided = s.exceeded || s.level > u;
      if (!decided)
        continue;
      ++r.n_decided;
      hits += (s.exceeded && s.level <= u) ? 1 : 0;
    }
    const double n = static_cast<double>(cfg.n_paths);
    r.empirical = static_cast<double>(hits) / n;
    r.closed_form = phi.closed_form(u);
    r.stderr_ = std::sqrt(r.empirical * (1.0 - r.empirical) / n);
    r.horizon_flag = static_cast<double>(r.n_decided) < 0.99 * static_cast<double>(cfg.n_paths);
    r.pass = !r.horizon_flag && std::fabs(r.empirical - r.closed_form) <= 3.0 * r.stderr_ + r.allowance;
    out.push_back(r);
  }
  if (samples_out)
    *samples_out = std::move(samples);
  return out;
}

TPhiResult t_phi_stopping(const PhiSpec& phi, const Path& b) {
  TPhiResult out;
  TanakaState st{b[0], 0.0};
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (k > 0)
      st.step(b[k]);
    const double f = phi.phi(st.l);
    if (f * std::fabs(st.b) > 1.0) {
      out.time = b.grid().time(k);
      out.index = k;
      out.level = st.l;
      out.boundary = f * std::fabs(st.b);
      return out;
    }
  }
  out.flagged = true;
  out.level = st.l;
  return out;
}

TPhiResult t_phi_stopping(const PhiSpec& phi, double dt, const SeedSpec& seed, double max_horizon) {
  pathgen::BrownianStream stream(dt, rng::StreamAddress::from(seed, rng::Domain::BrownianIncrements));
  const auto max_steps = static_cast<std::uint64_t>(std::ceil(max_horizon / dt));
  TanakaState st;
  TPhiResult out;
  for (std::uint64_t k = 1; k <= max_steps; ++k) {
    st.step(stream.next());
    const double f = phi.phi(st.l);
    if (f * std::fabs(st.b) > 1.0) {
      out.time = static_cast<double>(k) * dt;
      out.index = static_cast<std::size_t>(k);
      out.level = st.l;
      out.boundary = f * std::fabs(st.b);
      return out;
    }
  }
  out.flagged = true;
  out.level = st.l;
  return out;
}

double azema_value(double t, double b_t, double horizon) {
  if (!(t < horizon))
    throw std::invalid_argument("azema_value: t must be < horizon");
  return std::erf(std::fabs(b_t) / std::sqrt(2.0 * (horizon - t)));
}

Path azema_submartingale(const Path& b, double horizon) {
  const TimeGrid& grid = b.grid();
  std::size_t last = 0;
  while (last + 1 < b.size() && grid.time(last + 1) < horizon)
    ++last;
  if (last == 0)
    throw std::invalid_argument("azema_submartingale: grid has no step before the horizon");
  Path out(TimeGrid(grid.dt(), last));
  const auto mask = excursion::zero_mask(excursion::zero_set(b), b.size());
  for (std::size_t k = 0; k <= last; ++k)
    out[k] = mask[k] ? 0.0 : azema_value(grid.time(k), b[k], horizon);
  return out;
}

namespace {

// Continues B from b0 for n_steps; returns false at the first zero or sign change.
bool continue_without_zero(pathgen::BrownianStream& s, double b0, std::size_t n_steps,
                           std::vector<double>* keep, std::size_t& steps_used) {
  double prev = b0;
  if (keep)
    keep->clear();
  for (std::size_t j = 0; j < n_steps; ++j) {
    const double next = s.next();
    ++steps_used;
    if (next == 0.0 || (prev > 0.0) != (next > 0.0) || prev == 0.0)
      return false;
    if (keep)
      keep->push_back(next);
    prev = next;
  }
  return true;
}

rng::StreamAddress inner_address(const SeedSpec& seed, std::size_t j) {
  return rng::StreamAddress::from(seed, rng::Domain::NestedContinuation, static_cast<std::uint32_t>(j));
}

} // namespace

NestedEstimate azema_nested(double t, double b_t, double horizon, double dt, std::size_t n_inner,
                            const SeedSpec& seed) {
  if (!(t < horizon))
    throw std::invalid_argument("azema_nested: t must be < horizon");
  const auto n_steps = static_cast<std::size_t>(std::llround((horizon - t) / dt));
  std::size_t survive = 0, used = 0;
  for (std::size_t j = 0; j < n_inner; ++j) {
    pathgen::BrownianStream s(dt, inner_address(seed, j), b_t);
    survive += continue_without_zero(s, b_t, n_steps, nullptr, used) ? 1 : 0;
  }
  NestedEstimate out;
  out.n_inner = n_inner;
  out.mean = static_cast<double>(survive) / static_cast<double>(n_inner);
  out.stderr_ = std::sqrt(out.mean * (1.0 - out.mean) / static_cast<double>(n_inner));
  return out;
}

RepresentationSpec RepresentationSpec::abs_b() {
  return {"abs_b", [](std::span<const double> p, double) { return std::fabs(p.back()); },
          [](std::span<const double>, std::span<const double> c, double) { return std::fabs(c.back()); },
          false};
}

RepresentationSpec RepresentationSpec::azema(double horizon) {
  return {"azema",
          [horizon](std::span<const double> p, double dt) {
            const double t = static_cast<double>(p.size() - 1) * dt;
            const std::size_t n = p.size();
            if (p.back() == 0.0 || (n >= 2 && p[n - 2] * p[n - 1] < 0.0 &&
                                    std::fabs(p[n - 1]) < std::fabs(p[n - 2])))
              return 0.0;
            return azema_value(t, p.back(), horizon);
          },
          [](std::span<const double>, std::span<const double>, double) { return 1.0; }, false};
}

RepresentationSpec RepresentationSpec::zero() {
  return {"zero", [](std::span<const double>, double) { return 0.0; },
          [](std::span<const double>, std::span<const double>, double) { return 0.0; }, false};
}

RepresentationReport representation_check(const RepresentationSpec& spec, const RepresentationConfig& cfg) {
  if (!(cfg.t_star > 0.0 && cfg.t_star < cfg.horizon))
    throw std::invalid_argument("representation_check: need 0 < t* < T");
  if (cfg.n_inner < 2 || cfg.n_outer < 1)
    throw std::invalid_argument("representation_check: need n_outer >= 1 and n_inner >= 2");
  const TimeGrid prefix_grid = TimeGrid::covering(cfg.t_star, cfg.dt);
  const auto n_cont = static_cast<std::size_t>(std::llround((cfg.horizon - cfg.t_star) / cfg.dt));

  struct Outer {
    double x = 0.0, mean = 0.0, se = 0.0;
    std::size_t steps = 0;
  };
  auto outer = parallel_map<Outer>(cfg.n_outer, cfg.workers, [&](std::size_t i) {
    const SeedSpec seed{cfg.master_seed, static_cast<std::uint32_t>(i)};
    const Path b = pathgen::gen_brownian(prefix_grid, seed);
    Outer o;
    o.x = spec.x_at(b.values(), cfg.dt);
    double sum = 0.0, sum2 = 0.0;
    std::vector<double> cont;
    for (std::size_t j = 0; j < cfg.n_inner; ++j) {
      pathgen::BrownianStream s(cfg.dt, inner_address(seed, j), b.back());
      double value = 0.0;
      if (continue_without_zero(s, b.back(), n_cont, spec.needs_continuation ? &cont : nullptr, o.steps)) {
        const double last = s.value();
        value = spec.x_terminal(b.values(),
                                spec.needs_continuation ? std::span<const double>(cont)
                                                        : std::span<const double>(&last, 1),
                                cfg.dt);
      }
      sum += value;
      sum2 += value * value;
    }
    const double n = static_cast<double>(cfg.n_inner);
    o.mean = sum / n;
    const double var = std::max(0.0, (sum2 - n * o.mean * o.mean) / (n - 1.0));
    o.se = std::sqrt(var / n);
    return o;
  });

  RepresentationReport rep;
  rep.spec = spec.name;
  double abs_sum = 0.0;
  for (const Outer& o : outer) {
    rep.x_star.push_back(o.x);
    rep.inner_mean.push_back(o.mean);
    rep.inner_stderr.push_back(o.se);
    rep.total_inner_steps += o.steps;
    const double gap = std::fabs(o.x - o.mean);
    abs_sum += gap;
    double dev = 0.0;
    if (o.se > 0.0)
      dev = gap / o.se;
    else if (gap > 0.0) {
      dev = std::numeric_limits<double>::infinity();
      ++rep.starved;
    }
    rep.deviation.push_back(dev);
  }
  rep.median_deviation = median(rep.deviation);
  rep.mean_abs_deviation = abs_sum / static_cast<double>(outer.size());
  rep.pass = rep.median_deviation < 1.5;
  return rep;
}

RxReport rx_product_martingale(std::span<const Path> x, std::span<const Path> b, double horizon) {
  if (x.size() != b.size() || x.empty())
    throw std::invalid_argument("rx_product_martingale: need matching non-empty ensembles");
  const TimeGrid& grid = b.front().grid();
  const std::size_t k_end = grid.index_at(0.9 * horizon);
  if (k_end < 2)
    throw std::invalid_argument("rx_product_martingale: grid too coarse");
  std::vector<Path> product(x.size());
  double cross = 0.0, qx = 0.0, qr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require_same_grid(x[i], b[i], "rx_product_martingale");
    const Path r = azema_submartingale(b[i], horizon);
    product[i] = Path(TimeGrid(grid.dt(), k_end));
    for (std::size_t k = 0; k <= k_end; ++k) {
      product[i][k] = r[k] * std::fabs(x[i][k]);
      if (k < k_end) {
        const double dx = std::fabs(x[i][k + 1]) - std::fabs(x[i][k]);
        const double dr = r[k + 1] - r[k];
        cross += dx * dr;
        qx += dx * dx;
        qr += dr * dr;
      }
    }
  }
  RxReport rep;
  const double n = static_cast<double>(x.size());
  rep.cross_variation = cross / n;
  rep.normalized = (qx > 0.0 && qr > 0.0) ? cross / std::sqrt(qx * qr) : 0.0;
  rep.precondition_met = std::fabs(rep.normalized) < 0.1;
  if (rep.precondition_met)
    rep.score = sigma::martingale_test(product).score;
  return rep;
}

std::vector<double> last_zero_times(std::span<const Path> b) {
  std::vector<double> out;
  out.reserve(b.size());
  for (const Path& p : b) {
    const auto z = excursion::zero_set(p);
    out.push_back(z.empty() ? 0.0 : p.grid().time(z.back()));
  }
  return out;
}

double arcsine_cdf(double t) {
  if (t <= 0.0)
    return 0.0;
  if (t >= 1.0)
    return 1.0;
  return 2.0 / std::numbers::pi * std::asin(std::sqrt(t));
}

double ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty())
    throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v)
      ++i;
    while (j < b.size() && b[j] == v)
      ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

namespace {

double last_zero_time(const Path& p) {
  const auto z = excursion::zero_set(p);
  return z.empty() ? 0.0 : p.grid().time(z.back());
}

double flipped_last_zero_time(const Path& b, const SeedSpec& seed) {
  const auto exc = excursion::excursion_decompose(b);
  const auto z = excursion::make_z_alpha(exc, 0.5, seed);
  Path y(b.grid());
  for (std::size_t k = 0; k < y.size(); ++k)
    y[k] = z.path[k] * b[k];
  return last_zero_time(y);
}

HonestTimeReport summarize(const std::vector<double>& gamma, const std::vector<double>& flipped) {
  HonestTimeReport rep;
  rep.n_paths = gamma.size();
  rep.ks_g_vs_gamma = ks_two_sample(gamma, gamma);
  rep.ks_flipped_vs_gamma = ks_two_sample(flipped, gamma);
  rep.ks_gamma_vs_arcsine = ks_one_sample(gamma, arcsine_cdf);
  return rep;
}

} // namespace

HonestTimeReport honest_time_law(std::span<const Path> b, std::uint64_t master_seed) {
  std::vector<double> gamma, flipped;
  for (std::size_t i = 0; i < b.size(); ++i) {
    gamma.push_back(last_zero_time(b[i]));
    flipped.push_back(flipped_last_zero_time(b[i], SeedSpec{master_seed, static_cast<std::uint32_t>(i)}));
  }
  return summarize(gamma, flipped);
}

HonestTimeReport honest_time_law(const TimeGrid& grid, std::uint64_t master_seed, std::size_t n_paths,
                                 std::size_t workers) {
  std::vector<double> gamma(n_paths), flipped(n_paths);
  parallel_for(n_paths, workers, [&](std::size_t i) {
    const SeedSpec seed{master_seed, static_cast<std::uint32_t>(i)};
    const Path b = pathgen::gen_brownian(grid, seed);
    gamma[i] = last_zero_time(b);
    flipped[i] = flipped_last_zero_time(b, seed);
  });
  return summarize(gamma, flipped);
}

} // namespace sigmalab::estimates
