#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "catalog.hpp"
#include "sigmalab/cli.hpp"
#include "sigmalab/estimates.hpp"
#include "sigmalab/excursion.hpp"
#include "sigmalab/martingale.hpp"
#include "sigmalab/parallel.hpp"
#include "sigmalab/path_io.hpp"
#include "sigmalab/pathgen.hpp"
#include "sigmalab/sigma.hpp"
#include "sigmalab/stochcalc.hpp"

namespace sigmalab::cli {

namespace {

using sigma::MartingaleReport;
using sigma::MartingaleSample;

struct Ctx {
  const json& cfg;
  std::size_t workers;
  TimeGrid grid;
  std::size_t n_paths;
  std::uint64_t seed;
  std::string family;
  std::vector<std::string> only;

  Ctx(const json& c, std::size_t w)
      : cfg(c),
        workers(w),
        grid(c["grid"]["dt"].get<double>(), c["grid"]["n_steps"].get<std::size_t>()),
        n_paths(c["ensemble"]["n_paths"].get<std::size_t>()),
        seed(c["ensemble"]["master_seed"].get<std::uint64_t>()),
        family(c["process"]["family"].get<std::string>()),
        only(c["checks"].get<std::vector<std::string>>()) {}

  bool wants(std::string_view name) const {
    return only.empty() || std::find(only.begin(), only.end(), name) != only.end();
  }

  double dt() const { return grid.dt(); }
  double tol(const char* key) const { return cfg["tolerances"][key].get<double>(); }
  double param(const char* key) const { return cfg["process"]["params"][key].get<double>(); }
  SeedSpec seed_of(std::size_t i) const { return {seed, static_cast<std::uint32_t>(i)}; }
  std::size_t ks() const { return grid.index_at(0.5 * grid.horizon()); }
  std::size_t kt() const { return grid.n_steps(); }
  bool mpass(const MartingaleReport& r) const { return r.score < tol("martingale_score"); }
  double delta() const { return param("delta") > 0.0 ? param("delta") : 10.0 * std::sqrt(dt()); }
  // Families whose |X| vanishes on the zero set of the driving B.
  bool b_driven() const { return family != "drawdown"; }
};

CheckResult make_check(std::string_view suite, std::string_view name) {
  CheckResult r;
  r.suite = std::string(suite);
  r.name = std::string(name);
  for (const auto& e : kCatalog)
    if (e.suite == suite && e.name == name)
      r.statement = std::string(e.statement);
  return r;
}

double median(std::vector<double> v) {
  if (v.empty())
    return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

json mjson(const MartingaleReport& r) {
  return {{"score", r.score},     {"probes", r.names},         {"t_stats", r.t_stats},
          {"dropped", r.dropped}, {"n_paths", r.n_paths},      {"s", r.s},
          {"t", r.t},             {"degenerate", r.degenerate}};
}

MartingaleReport regress(const Ctx& c, std::span<const MartingaleSample> samples,
                         const std::vector<std::string>& names, const TimeGrid* grid = nullptr) {
  MartingaleReport r = sigma::martingale_regression(samples, names);
  const TimeGrid& g = grid ? *grid : c.grid;
  r.s = g.time(g.index_at(0.5 * g.horizon()));
  r.t = g.horizon();
  return r;
}

// Thinned multi-column trace of one path.
std::string trace_csv(const std::vector<std::pair<std::string, const Path*>>& cols, std::size_t max_rows = 2001) {
  std::ostringstream os;
  os << 't';
  for (const auto& [name, _] : cols)
    os << ',' << name;
  os << '\n';
  const Path& first = *cols.front().second;
  const std::size_t n = first.size();
  const std::size_t stride = std::max<std::size_t>(1, (n - 1 + max_rows - 2) / (max_rows - 1));
  for (std::size_t k = 0;; k = std::min(k + stride, n - 1)) {
    os << io::format_double(first.grid().time(k));
    for (const auto& [_, p] : cols)
      os << ',' << io::format_double((*p)[k]);
    os << '\n';
    if (k == n - 1)
      break;
  }
  return os.str();
}

std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t j = 0; j < header.size(); ++j)
    os << (j ? "," : "") << header[j];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j)
      os << (j ? "," : "") << io::format_double(row[j]);
    os << '\n';
  }
  return os.str();
}

struct FamilyPath {
  Path b;
  DecomposedPath x;
};

sigma::PredictableFunctional family_z(const Ctx& c) {
  return sigma::PredictableFunctional::constant(c.family == "theorem31" ? c.param("z") : 1.0);
}

FamilyPath family_path(const Ctx& c, std::size_t i) {
  Path b = pathgen::gen_brownian(c.grid, c.seed_of(i));
  if (c.family == "brownian")
    return {b, pathgen::as_decomposed(b)};
  if (c.family == "reflected")
    return {b, pathgen::gen_reflected(b)};
  if (c.family == "drawdown")
    return {b, pathgen::gen_drawdown(b)};
  const auto z = sigma::PredictableFunctional::constant(c.param("z"));
  const auto u = sigma::PredictableFunctional::tapered(c.param("u_c"), c.delta());
  auto t31 = sigma::construct_theorem31(z, u, b, nullptr, {c.delta()});
  return {std::move(b), std::move(t31.x)};
}

std::string family_trace(const FamilyPath& fp) {
  return trace_csv({{"b", &fp.b}, {"x", &fp.x.x}, {"m", &fp.x.m}, {"v", &fp.x.v}});
}

// ---------------------------------------------------------------- sigma-verify

CheckResult class_sigma(const Ctx& c) {
  CheckResult r = make_check("sigma-verify", "class_sigma");
  const double band = 2.0 * std::sqrt(c.dt());
  struct One {
    double off = 0.0, total = 0.0;
    MartingaleSample s;
  };
  const std::size_t ks = c.ks(), kt = c.kt();
  auto per = parallel_map<One>(c.n_paths, c.workers, [&](std::size_t i) {
    const FamilyPath fp = family_path(c, i);
    const auto v = sigma::check_sigma(fp.x, band, 1.0);
    return One{v.off_band_mass, v.total_mass, {fp.x.m[kt] - fp.x.m[ks], {fp.x.m[ks], std::fabs(fp.x.x[ks])}}};
  });
  double off = 0.0, total = 0.0;
  std::vector<MartingaleSample> samples;
  for (auto& o : per) {
    off += o.off;
    total += o.total;
    samples.push_back(std::move(o.s));
  }
  const double ratio = total > 0.0 ? off / total : 0.0;
  const MartingaleReport m = regress(c, samples, {"M_s", "|X_s|"});
  r.pass = ratio <= c.tol("carried_ratio") && c.mpass(m);
  r.metrics = {{"family", c.family},      {"band", band},           {"carried_ratio", ratio},
               {"off_band_mass", off},    {"total_mass", total},    {"martingale", mjson(m)}};
  r.csv.emplace_back("class_sigma_path0", family_trace(family_path(c, 0)));
  return r;
}

CheckResult abs_martingale(const Ctx& c) {
  CheckResult r = make_check("sigma-verify", "abs_equals_abs_martingale");
  struct One {
    double off = 0.0, on = 0.0, recon = 0.0, terminal = 0.0;
    MartingaleSample s;
  };
  const std::size_t ks = c.ks(), kt = c.kt();
  auto per = parallel_map<One>(c.n_paths, c.workers, [&](std::size_t i) {
    const FamilyPath fp = family_path(c, i);
    const auto a = sigma::abs_equals_abs_martingale(fp.x, c.seed_of(i));
    return One{a.abs_mismatch_off_zero, a.abs_mismatch_on_zero, a.reconstruction_error, a.m[kt],
               {a.m[kt] - a.m[ks], {a.m[ks], std::fabs(fp.x.x[ks])}}};
  });
  double off = 0.0, on = 0.0, recon = 0.0;
  std::vector<MartingaleSample> samples;
  std::vector<double> terminal;
  for (auto& o : per) {
    off = std::max(off, o.off);
    on = std::max(on, o.on);
    recon = std::max(recon, o.recon);
    terminal.push_back(o.terminal);
    samples.push_back(std::move(o.s));
  }
  const MartingaleReport m = regress(c, samples, {"M_s", "|X_s|"});
  r.pass = off == 0.0 && recon == 0.0 && c.mpass(m);
  r.metrics = {{"family", c.family},
               {"abs_mismatch_off_zero", off},
               {"abs_on_zero_max", on},
               {"reconstruction_error", recon},
               {"martingale", mjson(m)}};
  if (c.family == "brownian" || c.family == "reflected") {
    const double sd = std::sqrt(c.grid.horizon());
    const double ks = estimates::ks_one_sample(terminal, [sd](double v) { return normal_cdf(v / sd); });
    const double ks_tol = std::max(c.tol("ks"), 1.63 / std::sqrt(static_cast<double>(c.n_paths)));
    r.metrics["terminal_ks_normal"] = ks;
    r.metrics["terminal_ks_tolerance"] = ks_tol;
    r.pass = r.pass && ks < ks_tol;
  }
  const FamilyPath fp = family_path(c, 0);
  const auto a = sigma::abs_equals_abs_martingale(fp.x, c.seed_of(0));
  r.csv.emplace_back("abs_martingale_path0", trace_csv({{"x", &fp.x.x}, {"m", &a.m}}));
  return r;
}

CheckResult drift_control(const Ctx& c) {
  CheckResult r = make_check("sigma-verify", "martingale_drift_control");
  const std::size_t ks = c.ks(), kt = c.kt();
  const double s = c.grid.time(ks), t = c.grid.time(kt);
  auto samples = parallel_map<MartingaleSample>(c.n_paths, c.workers, [&](std::size_t i) {
    const Path b = pathgen::gen_brownian(c.grid, c.seed_of(i));
    return MartingaleSample{(b[kt] + t) - (b[ks] + s), {b[ks] + s}};
  });
  const MartingaleReport m = regress(c, samples, {"N_s"});
  r.pass = m.score > 10.0;
  r.metrics = {{"martingale", mjson(m)}};
  return r;
}

CheckResult zero_set_coincidence(const Ctx& c) {
  CheckResult r = make_check("sigma-verify", "zero_set_coincidence");
  const auto z = family_z(c);
  const bool with_z = c.family == "reflected" || c.family == "theorem31";
  struct One {
    double ratio = 0.0, inc = 0.0;
    bool pass = false;
  };
  auto per = parallel_map<One>(c.n_paths, c.workers, [&](std::size_t i) {
    const FamilyPath fp = family_path(c, i);
    const auto v = sigma::check_zero_set_coincidence(fp.x, fp.b, 0.01, with_z ? &z : nullptr);
    return One{v.symmetric_difference_ratio, v.increasing_part_error, v.pass};
  });
  double max_ratio = 0.0, mean_ratio = 0.0, inc = 0.0;
  std::size_t failed = 0;
  for (const auto& o : per) {
    max_ratio = std::max(max_ratio, o.ratio);
    mean_ratio += o.ratio / static_cast<double>(per.size());
    inc = std::max(inc, o.inc);
    failed += o.pass ? 0 : 1;
  }
  r.informational = !c.b_driven();
  r.pass = failed == 0;
  r.metrics = {{"family", c.family},
               {"max_symmetric_difference_ratio", max_ratio},
               {"mean_symmetric_difference_ratio", mean_ratio},
               {"increasing_part_checked", with_z},
               {"max_increasing_part_error", inc},
               {"paths_failed", failed}};
  return r;
}

CheckResult compensator(const Ctx& c) {
  CheckResult r = make_check("sigma-verify", "compensator");
  const auto z = family_z(c);
  const std::size_t ks = c.ks(), kt = c.kt();
  auto per = parallel_map<sigma::CompensatorSample>(c.n_paths, c.workers, [&](std::size_t i) {
    const FamilyPath fp = family_path(c, i);
    return sigma::compensator_sample(fp.x.x, z, fp.b, ks, kt);
  });
  std::vector<MartingaleSample> n1, n2;
  for (auto& o : per) {
    n1.push_back(std::move(o.n));
    n2.push_back(std::move(o.n_gamma));
  }
  const MartingaleReport m1 = regress(c, n1, sigma::kCompensatorProbes);
  const MartingaleReport m2 = regress(c, n2, sigma::kCompensatorProbes);
  r.informational = !c.b_driven();
  r.pass = c.mpass(m1) && c.mpass(m2);
  r.metrics = {{"family", c.family}, {"z", z.name}, {"n", mjson(m1)}, {"n_gamma", mjson(m2)}};
  if (c.family == "theorem31")
    r.metrics["taper"] = {{"u_c", c.param("u_c")}, {"delta", c.delta()}};
  return r;
}

CheckResult f_transform(const Ctx& c) {
  CheckResult r = make_check("sigma-verify", "f_transform");
  const auto z = family_z(c);
  const double lambda = 1.0;
  const sigma::BoundedFunction f{"indicator_l_le_1", [lambda](double l) { return l <= lambda ? 1.0 : 0.0; }, 1.0,
                                 lambda, [lambda](double l) { return std::min(l, lambda); }};
  const std::size_t ks = c.ks(), kt = c.kt();
  struct One {
    double excess = 0.0;
    MartingaleSample s;
  };
  auto per = parallel_map<One>(c.n_paths, c.workers, [&](std::size_t i) {
    const FamilyPath fp = family_path(c, i);
    const auto t = sigma::f_transform(fp.x.x, z, fp.b, f);
    double excess = -INFINITY;
    const double lkc = lambda * z.bound * f.bound;
    for (std::size_t k = 0; k < t.n.size(); ++k)
      excess = std::max(excess, std::fabs(t.n[k]) - (lkc + f.bound * std::fabs(fp.x.x[k])));
    return One{excess, {t.n[kt] - t.n[ks], {t.n[ks], std::fabs(fp.b[ks])}}};
  });
  double excess = -INFINITY;
  std::vector<MartingaleSample> samples;
  for (auto& o : per) {
    excess = std::max(excess, o.excess);
    samples.push_back(std::move(o.s));
  }
  const MartingaleReport m = regress(c, samples, {"N_s", "|B_s|"});
  r.informational = !c.b_driven();
  r.pass = c.mpass(m) && excess <= 1e-12;
  r.metrics = {{"family", c.family}, {"f", f.name}, {"max_bound_excess", excess}, {"martingale", mjson(m)}};
  return r;
}

// ---------------------------------------------------------------- identities

struct Refinement {
  std::vector<double> dts;
  std::vector<double> medians;
  std::vector<std::vector<double>> rows;
  bool decreasing = true;
};

Refinement refine(const Ctx& c, const std::function<double(const Path& b, std::size_t i)>& residual,
                  const std::function<std::vector<double>(double dt, const std::vector<double>& sups)>& extra = {}) {
  Refinement out;
  const auto n = c.cfg["refinement"]["n_paths"].get<std::size_t>();
  for (const auto& d : c.cfg["refinement"]["dt"]) {
    const TimeGrid grid = TimeGrid::covering(c.grid.horizon(), d.get<double>());
    auto sups = parallel_map<double>(n, c.workers, [&](std::size_t i) {
      return residual(pathgen::gen_brownian(grid, c.seed_of(i)), i);
    });
    const double med = median(sups);
    if (!out.medians.empty() && !(med < out.medians.back()))
      out.decreasing = false;
    out.dts.push_back(grid.dt());
    out.medians.push_back(med);
    std::vector<double> row{grid.dt(), med};
    if (extra)
      for (double v : extra(grid.dt(), sups))
        row.push_back(v);
    out.rows.push_back(std::move(row));
  }
  return out;
}

CheckResult tanaka_refinement(const Ctx& c) {
  CheckResult r = make_check("identities", "tanaka_refinement");
  const Refinement ref = refine(
      c, [](const Path& b, std::size_t) { return stochcalc::check_tanaka(b, std::pow(b.grid().dt(), 0.4)).sup_residual; },
      [](double dt, const std::vector<double>& sups) {
        const double below = static_cast<double>(std::count_if(sups.begin(), sups.end(),
                                                               [](double s) { return s < 0.1; }));
        return std::vector<double>{std::pow(dt, 0.4), below / static_cast<double>(sups.size())};
      });
  r.pass = ref.decreasing;
  json rows = json::array();
  for (const auto& row : ref.rows)
    rows.push_back({{"dt", row[0]}, {"median_sup_residual", row[1]}, {"eps", row[2]}, {"fraction_below_0.1", row[3]}});
  r.metrics = {{"grids", rows}, {"strictly_decreasing", ref.decreasing}};
  r.csv.emplace_back("tanaka_refinement", table_csv({"dt", "median_sup_residual", "eps", "fraction_below_0.1"}, ref.rows));
  return r;
}

CheckResult z_alpha_refinement(const Ctx& c, double alpha, std::string_view name) {
  CheckResult r = make_check("identities", name);
  const Refinement ref = refine(c, [&](const Path& b, std::size_t i) {
    return sigma::z_transform(pathgen::gen_reflected(b), alpha, c.seed_of(i)).residual.sup_residual;
  });
  const double finest = ref.medians.back();
  r.pass = ref.decreasing && finest < c.tol("eq3_finest");
  json rows = json::array();
  for (const auto& row : ref.rows)
    rows.push_back({{"dt", row[0]}, {"median_sup_residual", row[1]}});
  r.metrics = {{"alpha", alpha}, {"grids", rows}, {"strictly_decreasing", ref.decreasing}, {"finest_median", finest}};
  r.csv.emplace_back(std::string(name), table_csv({"dt", "median_sup_residual"}, ref.rows));
  return r;
}

CheckResult balayage(const Ctx& c, bool local_time_k) {
  CheckResult r = make_check("identities", local_time_k ? "balayage_local_time_k" : "balayage_constant_k");
  const double tol = c.tol("balayage_oscillation");
  struct One {
    double osc = 0.0, tv = 0.0, l_end = 0.0;
  };
  auto per = parallel_map<One>(c.n_paths, c.workers, [&](std::size_t i) {
    const Path b = pathgen::gen_brownian(c.grid, c.seed_of(i));
    Path k(c.grid);
    if (local_time_k)
      k = stochcalc::local_time_tanaka(b);
    else
      std::fill(k.values().begin(), k.values().end(), 1.0);
    const auto rep = stochcalc::check_balayage(k, b, tol);
    return One{rep.max_excursion_oscillation, rep.total_variation, k.back()};
  });
  double osc = 0.0, tv = 0.0, l_end = 0.0;
  for (const auto& o : per) {
    osc = std::max(osc, o.osc);
    tv += o.tv / static_cast<double>(per.size());
    l_end += o.l_end / static_cast<double>(per.size());
  }
  r.pass = osc <= tol;
  r.metrics = {{"max_excursion_oscillation", osc}, {"mean_total_variation_R", tv}};
  if (local_time_k)
    r.metrics["mean_int_dL"] = l_end;
  const Path b = pathgen::gen_brownian(c.grid, c.seed_of(0));
  Path k(c.grid);
  if (local_time_k)
    k = stochcalc::local_time_tanaka(b);
  else
    std::fill(k.values().begin(), k.values().end(), 1.0);
  const auto rep = stochcalc::check_balayage(k, b, tol);
  r.csv.emplace_back(r.name + "_path0",
                     trace_csv({{"y", &b}, {"k", &k}, {"R", &rep.identity.components.back().path}}));
  return r;
}

CheckResult local_time_consistency(const Ctx& c) {
  CheckResult r = make_check("identities", "local_time_consistency");
  const double eps = std::pow(c.dt(), 0.4);
  struct One {
    double occ = 0.0, down = 0.0, tan = 0.0;
    std::size_t off_zero_moves = 0, decreases = 0;
  };
  auto per = parallel_map<One>(c.n_paths, c.workers, [&](std::size_t i) {
    const Path b = pathgen::gen_brownian(c.grid, c.seed_of(i));
    const Path occ = stochcalc::local_time_occupation(b, eps);
    const Path down = stochcalc::local_time_downcrossing(b, eps);
    const Path tan = stochcalc::local_time_tanaka(b);
    One o{occ.back(), down.back(), tan.back()};
    for (std::size_t k = 0; k + 1 < b.size(); ++k) {
      const bool moves_ok = b[k] == 0.0 || b[k] * b[k + 1] < 0.0;
      if (tan[k + 1] != tan[k] && !moves_ok)
        ++o.off_zero_moves;
      if (occ[k + 1] < occ[k] || down[k + 1] < down[k] || tan[k + 1] < tan[k] - 1e-12)
        ++o.decreases;
    }
    return o;
  });
  double occ = 0.0, down = 0.0, tan = 0.0;
  std::size_t off_zero = 0, decreases = 0;
  const double n = static_cast<double>(per.size());
  for (const auto& o : per) {
    occ += o.occ / n;
    down += o.down / n;
    tan += o.tan / n;
    off_zero += o.off_zero_moves;
    decreases += o.decreases;
  }
  auto rel = [](double a, double b) { return std::fabs(a - b) / (0.5 * (a + b)); };
  const double expected = std::sqrt(2.0 * c.grid.horizon() / std::numbers::pi);
  const double gaps[3] = {rel(occ, down), rel(occ, tan), rel(down, tan)};
  const double max_gap = *std::max_element(std::begin(gaps), std::end(gaps));
  r.pass = max_gap < c.tol("local_time_relative") && std::fabs(tan - expected) <= c.tol("local_time_mean") &&
           off_zero == 0 && decreases == 0;
  r.metrics = {{"eps", eps},
               {"mean_occupation", occ},
               {"mean_downcrossing", down},
               {"mean_tanaka", tan},
               {"expected_mean", expected},
               {"relative_gap_occupation_downcrossing", gaps[0]},
               {"relative_gap_occupation_tanaka", gaps[1]},
               {"relative_gap_downcrossing_tanaka", gaps[2]},
               {"tanaka_moves_off_zero_set", off_zero},
               {"non_monotone_steps", decreases}};
  const Path b = pathgen::gen_brownian(c.grid, c.seed_of(0));
  const Path occ0 = stochcalc::local_time_occupation(b, eps);
  const Path down0 = stochcalc::local_time_downcrossing(b, eps);
  const Path tan0 = stochcalc::local_time_tanaka(b);
  r.csv.emplace_back("local_time_path0",
                     trace_csv({{"b", &b}, {"occupation", &occ0}, {"downcrossing", &down0}, {"tanaka", &tan0}}));
  return r;
}

// ---------------------------------------------------------------- estimates

estimates::PhiSpec phi_of(const Ctx& c) {
  const json& p = c.cfg["phi"];
  if (p["kind"].get<std::string>() == "exp")
    return estimates::PhiSpec::exponential();
  return estimates::PhiSpec::constant(p["c"].get<double>());
}

std::vector<double> us_of(const Ctx& c) { return c.cfg["phi"]["u"].get<std::vector<double>>(); }

estimates::EnsembleConfig ensemble_of(const Ctx& c) {
  return {c.dt(), c.n_paths, c.seed, c.cfg["phi"]["max_horizon"].get<double>(), c.workers};
}

void fill_exceedance(const Ctx& c, CheckResult& r, const std::vector<estimates::EstimateReport>& reps) {
  const double allowance = c.tol("exceedance_allowance");
  json rows = json::array();
  std::vector<std::vector<double>> table;
  r.pass = true;
  for (const auto& e : reps) {
    const bool ok = !e.horizon_flag && std::fabs(e.empirical - e.closed_form) <= 3.0 * e.stderr_ + allowance;
    r.pass = r.pass && ok;
    rows.push_back({{"theorem", e.theorem},
                    {"phi_spec", e.phi_spec},
                    {"u", e.u},
                    {"n_paths", e.n_paths},
                    {"n_decided", e.n_decided},
                    {"dt", e.dt},
                    {"empirical", e.empirical},
                    {"closed_form", e.closed_form},
                    {"stderr", e.stderr_},
                    {"allowance", allowance},
                    {"horizon_flag", e.horizon_flag},
                    {"pass", ok}});
    table.push_back({e.u, e.empirical, e.closed_form, e.stderr_, static_cast<double>(e.n_decided)});
  }
  r.metrics["estimates"] = rows;
  r.csv.emplace_back(r.name, table_csv({"u", "empirical", "closed_form", "stderr", "n_decided"}, table));
}

CheckResult exceedance(const Ctx& c) {
  CheckResult r = make_check("estimates", "exceedance");
  const auto phi = phi_of(c);
  const auto us = us_of(c);
  fill_exceedance(c, r, estimates::exceedance_probability(phi, us, ensemble_of(c)));
  return r;
}

CheckResult exceedance_tapered(const Ctx& c) {
  CheckResult r = make_check("estimates", "exceedance_tapered");
  const auto phi = phi_of(c);
  const auto us = us_of(c);
  const auto cfg = ensemble_of(c);
  const double u_c = c.param("u_c"), delta = c.delta();
  auto reps = estimates::exceedance_probability(phi, us, cfg, [&](double u_max, const SeedSpec& seed) {
    return estimates::simulate_exceedance_tapered(phi, u_max, cfg.dt, seed, cfg.max_horizon, u_c, delta);
  });
  r.metrics["taper"] = {{"u_c", u_c}, {"delta", delta}};
  fill_exceedance(c, r, reps);
  return r;
}

CheckResult t_phi_boundary(const Ctx& c) {
  CheckResult r = make_check("estimates", "t_phi_boundary");
  const auto phi = phi_of(c);
  const double horizon = c.cfg["phi"]["max_horizon"].get<double>();
  auto per = parallel_map<estimates::TPhiResult>(c.n_paths, c.workers, [&](std::size_t i) {
    return estimates::t_phi_stopping(phi, c.dt(), c.seed_of(i), horizon);
  });
  std::size_t reached = 0, in_band = 0;
  double worst = 0.0;
  std::vector<double> overshoot;
  for (const auto& t : per) {
    if (!t.time)
      continue;
    ++reached;
    const double upper = 1.0 + 3.0 * std::sqrt(c.dt()) * phi.phi(t.level);
    in_band += (t.boundary >= 1.0 && t.boundary <= upper) ? 1 : 0;
    worst = std::max(worst, t.boundary - 1.0);
    overshoot.push_back(t.boundary - 1.0);
  }
  const double frac = reached ? static_cast<double>(in_band) / static_cast<double>(reached) : 0.0;
  const std::size_t unreached = per.size() - reached;
  r.pass = reached > 0 && frac >= c.tol("boundary_fraction") && (!phi.diverges || unreached == 0);
  r.metrics = {{"phi_spec", phi.label},           {"reached", reached},       {"unreached", unreached},
               {"fraction_in_band", frac},        {"max_overshoot", worst},   {"median_overshoot", median(overshoot)},
               {"sqrt_dt", std::sqrt(c.dt())}};
  return r;
}

CheckResult closed_form_quadrature(const Ctx& c) {
  CheckResult r = make_check("estimates", "closed_form_quadrature");
  std::vector<estimates::PhiSpec> specs{estimates::PhiSpec::constant(c.cfg["phi"]["c"].get<double>()),
                                        estimates::PhiSpec::exponential()};
  auto us = us_of(c);
  us.push_back(50.0);
  json rows = json::array();
  double worst = 0.0;
  for (const auto& spec : specs) {
    estimates::PhiSpec numeric = spec;
    numeric.integral_exact = nullptr;
    for (double u : us) {
      const double exact = spec.closed_form(u), quad = numeric.closed_form(u);
      const double relerr = std::fabs(quad - exact) / std::max(std::fabs(exact), 1e-300);
      worst = std::max(worst, relerr);
      rows.push_back({{"phi_spec", spec.label}, {"u", u}, {"analytic", exact}, {"quadrature", quad}, {"relative_error", relerr}});
    }
  }
  r.pass = worst <= 1e-9;
  r.metrics = {{"values", rows}, {"max_relative_error", worst}};
  return r;
}

CheckResult t_phi_unreachable(const Ctx& c) {
  CheckResult r = make_check("estimates", "t_phi_unreachable");
  const estimates::PhiSpec phi{"1e6 below 10", [](double x) { return x < 10.0 ? 1e6 : 1.0; }, {}, true};
  const double dt = std::max(c.dt(), 1e-3);
  const double horizon = c.cfg["phi"]["max_horizon"].get<double>();
  const std::size_t n = std::min<std::size_t>(c.n_paths, 20);
  auto per = parallel_map<estimates::ExceedanceSample>(n, c.workers, [&](std::size_t i) {
    return estimates::simulate_exceedance(phi, 10.0, dt, c.seed_of(i), horizon);
  });
  std::size_t exceeded = 0, flagged = 0;
  double max_level = 0.0;
  for (const auto& s : per) {
    exceeded += s.exceeded ? 1 : 0;
    flagged += s.horizon_hit ? 1 : 0;
    max_level = std::max(max_level, s.level);
  }
  r.pass = exceeded == 0;
  r.metrics = {{"n_paths", n},          {"dt", dt},        {"exceeded", exceeded}, {"horizon_flagged", flagged},
               {"level_10_reached", n - exceeded - flagged}, {"max_level", max_level}};
  return r;
}

void honest_time(const Ctx& c, std::vector<CheckResult>& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const TimeGrid grid = TimeGrid::covering(1.0, c.dt());
  const auto rep = estimates::honest_time_law(grid, c.seed, c.n_paths, c.workers);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CheckResult a = make_check("estimates", "arcsine_law");
  const double tol = std::max(c.tol("ks"), 1.63 / std::sqrt(static_cast<double>(c.n_paths)));
  a.pass = rep.ks_gamma_vs_arcsine < tol;
  a.metrics = {{"ks", rep.ks_gamma_vs_arcsine}, {"tolerance", tol}, {"n_paths", rep.n_paths}, {"dt", grid.dt()}};
  a.seconds = secs;
  CheckResult h = make_check("estimates", "honest_time_law");
  h.pass = rep.ks_g_vs_gamma == 0.0 && rep.ks_flipped_vs_gamma == 0.0;
  h.metrics = {{"ks_g_vs_gamma", rep.ks_g_vs_gamma}, {"ks_flipped_vs_gamma", rep.ks_flipped_vs_gamma}};
  out.push_back(std::move(a));
  out.push_back(std::move(h));
}

// ---------------------------------------------------------------- representation

estimates::RepresentationConfig representation_of(const Ctx& c) {
  const json& n = c.cfg["nested"];
  estimates::RepresentationConfig rc;
  rc.dt = n["dt"].get<double>();
  rc.horizon = 1.0;
  rc.t_star = n["t_star"].get<double>();
  rc.n_outer = n["n_outer"].get<std::size_t>();
  rc.n_inner = n["n_inner"].get<std::size_t>();
  rc.master_seed = c.seed;
  rc.workers = c.workers;
  return rc;
}

CheckResult azema_point(const Ctx& c) {
  CheckResult r = make_check("representation", "azema_point");
  const auto rc = representation_of(c);
  const std::size_t n_inner = 10 * rc.n_inner;
  const double closed = estimates::azema_value(0.5, 0.5, 1.0);
  const auto est = estimates::azema_nested(0.5, 0.5, 1.0, rc.dt, n_inner, SeedSpec{c.seed, 0});
  r.pass = std::fabs(est.mean - closed) <= 3.0 * est.stderr_;
  r.metrics = {{"closed_form", closed}, {"nested_mean", est.mean}, {"nested_stderr", est.stderr_},
               {"n_inner", n_inner},    {"dt", rc.dt}};
  return r;
}

CheckResult representation(const Ctx& c, const estimates::RepresentationSpec& spec) {
  CheckResult r = make_check("representation", "representation_" + spec.name);
  const auto rc = representation_of(c);
  const auto rep = estimates::representation_check(spec, rc);
  r.pass = rep.median_deviation < c.tol("representation_median");
  r.metrics = {{"median_deviation", rep.median_deviation},
               {"mean_abs_deviation", rep.mean_abs_deviation},
               {"starved", rep.starved},
               {"n_outer", rc.n_outer},
               {"n_inner", rc.n_inner},
               {"t_star", rc.t_star},
               {"dt", rc.dt},
               {"inner_budget_steps", rep.total_inner_steps}};
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < rep.x_star.size(); ++i)
    rows.push_back({static_cast<double>(i), rep.x_star[i], rep.inner_mean[i], rep.inner_stderr[i], rep.deviation[i]});
  r.csv.emplace_back(r.name, table_csv({"outer", "x_star", "inner_mean", "inner_stderr", "deviation"}, rows));
  return r;
}

void rx_product(const Ctx& c, std::vector<CheckResult>& out) {
  const TimeGrid grid = TimeGrid::covering(1.0, std::max(c.dt(), 1e-3));
  const std::size_t n = std::min<std::size_t>(c.n_paths, 2000);
  const auto b = pathgen::gen_brownian_ensemble(grid, c.seed, n, c.workers);
  auto run = [&](std::string_view name, const std::function<Path(std::size_t)>& x_of) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r = make_check("representation", name);
    std::vector<Path> x(n);
    parallel_for(n, c.workers, [&](std::size_t i) { x[i] = x_of(i); });
    const auto rep = estimates::rx_product_martingale(x, b, 1.0);
    r.metrics = {{"cross_variation", rep.cross_variation},
                 {"normalized_cross_variation", rep.normalized},
                 {"precondition_met", rep.precondition_met},
                 {"score", rep.score ? json(*rep.score) : json(nullptr)},
                 {"n_paths", n},
                 {"dt", grid.dt()}};
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::make_pair(std::move(r), rep);
  };
  {
    auto [r, rep] = run("rx_product_zero", [&](std::size_t) { return Path(grid); });
    r.pass = rep.precondition_met && rep.score && *rep.score < c.tol("martingale_score");
    out.push_back(std::move(r));
  }
  {
    auto [r, rep] = run("rx_product_abs_b", [&](std::size_t i) {
      Path x(grid);
      for (std::size_t k = 0; k < x.size(); ++k)
        x[k] = std::fabs(b[i][k]);
      return x;
    });
    r.pass = !rep.precondition_met;
    out.push_back(std::move(r));
  }
  {
    const auto z = sigma::PredictableFunctional::constant(1.0);
    const auto u = sigma::PredictableFunctional::constant(0.0);
    auto [r, rep] = run("rx_product_signed", [&](std::size_t i) {
      const auto signs = excursion::make_z_alpha(excursion::excursion_decompose(b[i]), 0.5, c.seed_of(i));
      return sigma::construct_theorem31(z, u, b[i], &signs).x.x;
    });
    r.informational = true;
    r.pass = true;
    out.push_back(std::move(r));
  }
}

template <class Fn>
void timed(std::vector<CheckResult>& out, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r = fn();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.push_back(std::move(r));
}

void run_named(const Ctx& c, std::string_view suite, std::vector<CheckResult>& out) {
  if (suite == "sigma-verify") {
    if (c.wants("class_sigma"))
      timed(out, [&] { return class_sigma(c); });
    if (c.wants("abs_equals_abs_martingale"))
      timed(out, [&] { return abs_martingale(c); });
    if (c.wants("martingale_drift_control"))
      timed(out, [&] { return drift_control(c); });
    if (c.wants("zero_set_coincidence"))
      timed(out, [&] { return zero_set_coincidence(c); });
    if (c.wants("compensator"))
      timed(out, [&] { return compensator(c); });
    if (c.wants("f_transform"))
      timed(out, [&] { return f_transform(c); });
  } else if (suite == "identities") {
    if (c.wants("tanaka_refinement"))
      timed(out, [&] { return tanaka_refinement(c); });
    if (c.wants("z_alpha_decomposition_alpha0"))
      timed(out, [&] { return z_alpha_refinement(c, 0.0, "z_alpha_decomposition_alpha0"); });
    if (c.wants("z_alpha_decomposition_alpha0.5"))
      timed(out, [&] { return z_alpha_refinement(c, 0.5, "z_alpha_decomposition_alpha0.5"); });
    if (c.wants("z_alpha_decomposition_alpha1"))
      timed(out, [&] { return z_alpha_refinement(c, 1.0, "z_alpha_decomposition_alpha1"); });
    if (c.wants("balayage_constant_k"))
      timed(out, [&] { return balayage(c, false); });
    if (c.wants("balayage_local_time_k"))
      timed(out, [&] { return balayage(c, true); });
    if (c.wants("local_time_consistency"))
      timed(out, [&] { return local_time_consistency(c); });
  } else if (suite == "estimates") {
    if (c.wants("exceedance"))
      timed(out, [&] { return exceedance(c); });
    if (c.wants("exceedance_tapered"))
      timed(out, [&] { return exceedance_tapered(c); });
    if (c.wants("t_phi_boundary"))
      timed(out, [&] { return t_phi_boundary(c); });
    if (c.wants("closed_form_quadrature"))
      timed(out, [&] { return closed_form_quadrature(c); });
    if (c.wants("t_phi_unreachable"))
      timed(out, [&] { return t_phi_unreachable(c); });
    if (c.wants("arcsine_law") || c.wants("honest_time_law"))
      honest_time(c, out);
  } else if (suite == "representation") {
    if (c.wants("azema_point"))
      timed(out, [&] { return azema_point(c); });
    if (c.wants("representation_abs_b"))
      timed(out, [&] { return representation(c, estimates::RepresentationSpec::abs_b()); });
    if (c.wants("representation_azema"))
      timed(out, [&] { return representation(c, estimates::RepresentationSpec::azema()); });
    if (c.wants("representation_zero"))
      timed(out, [&] { return representation(c, estimates::RepresentationSpec::zero()); });
    if (c.wants("rx_product_zero") || c.wants("rx_product_abs_b") || c.wants("rx_product_signed"))
      rx_product(c, out);
  } else {
    throw ConfigError("suite", "unknown suite '" + std::string(suite) + "'");
  }
}

} // namespace

SuiteReport run_suite(const json& cfg, std::size_t workers) {
  validate_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport rep;
  rep.config = cfg;
  rep.config.erase("output_dir");
  const Ctx c(cfg, workers);
  const std::string suite = cfg["suite"].get<std::string>();
  if (suite == "all") {
    for (const auto& s : kSuites)
      if (s != "all")
        run_named(c, s, rep.checks);
  } else {
    run_named(c, suite, rep.checks);
  }
  std::erase_if(rep.checks, [&](const CheckResult& r) { return !c.wants(r.name); });
  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                         [](const CheckResult& r) { return r.informational || r.pass; });
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.hash = content_hash(rep);
  return rep;
}

std::string describe(std::string_view suite) {
  if (std::find(std::begin(kSuites), std::end(kSuites), suite) == std::end(kSuites))
    throw ConfigError("suite", "unknown suite '" + std::string(suite) + "'");
  std::ostringstream os;
  for (const auto& s : kSuites) {
    if (s == "all" || (suite != "all" && s != suite))
      continue;
    os << s << '\n';
    for (const auto& e : kCatalog) {
      if (e.suite != s)
        continue;
      os << "  " << e.name << "\n    checks:    " << e.statement << "\n    tolerance: " << e.tolerance << '\n';
    }
  }
  return os.str();
}

} // namespace sigmalab::cli
