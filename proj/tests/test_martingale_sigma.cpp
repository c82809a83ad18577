#include <gtest/gtest.h>

#include <cmath>

#include "sigmalab/martingale.hpp"
#include "sigmalab/pathgen.hpp"
#include "sigmalab/sigma.hpp"

using namespace sigmalab;
using sigma::MartingaleSample;

namespace {

std::vector<DecomposedPath> reflected(std::size_t n, std::uint64_t seed, double dt = 1e-3, std::size_t steps = 1000) {
  return pathgen::gen_ensemble(pathgen::Family::Reflected, TimeGrid(dt, steps), seed, n, 1);
}

} // namespace

TEST(MartingaleRegression, MatchesClosedFormHc1) {
  std::vector<MartingaleSample> s;
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    const double xi = std::sin(0.7 * i) + 0.1 * i;
    const double yi = 0.3 + 0.5 * xi + std::cos(1.3 * i);
    s.push_back({yi, {xi}});
    x.push_back(xi);
    y.push_back(yi);
  }
  const auto rep = sigma::martingale_regression(s, {"p"});

  const double n = 50.0;
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < 50; ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < 50; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * y[i];
  }
  const double b1 = sxy / sxx;
  double e2 = 0.0, e2x2 = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double e = y[i] - my - b1 * (x[i] - mx);
    e2 += e * e;
    e2x2 += e * e * (x[i] - mx) * (x[i] - mx);
  }
  const double k = n / (n - 2.0);
  const double t0 = my / std::sqrt(k * e2 / (n * n));
  const double t1 = b1 / std::sqrt(k * e2x2 / (sxx * sxx));
  ASSERT_EQ(rep.t_stats.size(), 2u);
  EXPECT_NEAR(rep.t_stats[0], t0, 1e-9 * std::fabs(t0));
  EXPECT_NEAR(rep.t_stats[1], t1, 1e-9 * std::fabs(t1));
  EXPECT_DOUBLE_EQ(rep.score, std::max(std::fabs(t0), std::fabs(t1)));
}

TEST(MartingaleRegression, DropsConstantAndCollinearProbes) {
  std::vector<MartingaleSample> s;
  for (int i = 0; i < 100; ++i) {
    const double a = std::sin(i);
    s.push_back({std::cos(3.0 * i), {a, 2.0, 3.0 * a - 1.0}});
  }
  const auto rep = sigma::martingale_regression(s, {"a", "const", "affine"});
  EXPECT_EQ(rep.dropped, (std::vector<std::string>{"const", "affine"}));
  EXPECT_EQ(rep.names, (std::vector<std::string>{"intercept", "a"}));
}

TEST(MartingaleRegression, DegenerateIncrements) {
  std::vector<MartingaleSample> zero(10, MartingaleSample{0.0, {1.0}});
  const auto z = sigma::martingale_regression(zero, {"p"});
  EXPECT_TRUE(z.degenerate);
  EXPECT_TRUE(z.pass);
  EXPECT_EQ(z.score, 0.0);
  std::vector<MartingaleSample> constant(10, MartingaleSample{1.0, {1.0}});
  const auto c = sigma::martingale_regression(constant, {"p"});
  EXPECT_TRUE(c.degenerate);
  EXPECT_FALSE(c.pass);
}

TEST(MartingaleTest, BrownianPassesDriftFails) {
  const TimeGrid g(1e-3, 1000);
  auto b = pathgen::gen_brownian_ensemble(g, 21, 4000, 1);
  EXPECT_TRUE(sigma::martingale_test(b).pass);
  for (auto& p : b)
    for (std::size_t k = 0; k < p.size(); ++k)
      p[k] += g.time(k);
  const auto drift = sigma::martingale_test(b);
  EXPECT_FALSE(drift.pass);
  EXPECT_GT(drift.score, 10.0);
}

TEST(CheckSigma, Examples) {
  const TimeGrid g(1e-4, 10000);
  const Path b = pathgen::gen_brownian(g, SeedSpec{22, 0});
  const double band = 2.0 * std::sqrt(g.dt());
  const auto bm = sigma::check_sigma(pathgen::as_decomposed(b), band, 0.05);
  EXPECT_EQ(bm.carried_ratio, 0.0);
  EXPECT_TRUE(bm.pass);

  Path drift(g), t(g);
  for (std::size_t k = 0; k < b.size(); ++k) {
    t[k] = g.time(k);
    drift[k] = b[k] + t[k];
  }
  const auto dr = sigma::check_sigma(DecomposedPath{drift, b, t}, band, 0.05);
  EXPECT_GT(dr.carried_ratio, 0.9);
  EXPECT_FALSE(dr.pass);

  const auto refl = reflected(500, 23, 1e-4, 10000);
  const auto v = sigma::check_sigma(refl, band, 0.05);
  EXPECT_LE(v.carried_ratio, 0.05);
  ASSERT_TRUE(v.martingale.has_value());
  EXPECT_TRUE(v.pass);
}

TEST(ZTransform, ExtremeAlphasHaveSmallResidual) {
  const auto x = pathgen::gen_reflected(pathgen::gen_brownian(TimeGrid(1e-4, 10000), SeedSpec{24, 0}));
  for (double alpha : {0.0, 1.0}) {
    const auto zt = sigma::z_transform(x, alpha, SeedSpec{24, 0});
    EXPECT_LT(zt.residual.sup_residual, 10.0 * std::sqrt(1e-4)) << alpha;
    for (std::size_t k = 0; k < x.x.size(); ++k)
      if (!zt.z.on_zero[k]) {
        ASSERT_EQ(std::fabs(zt.y.x[k]), x.x[k]);
      }
  }
}

TEST(AbsMartingale, ExactOffZeroAndReconstructs) {
  for (auto fam : {pathgen::Family::Brownian, pathgen::Family::Reflected, pathgen::Family::Drawdown}) {
    const auto ens = pathgen::gen_ensemble(fam, TimeGrid(1e-3, 1000), 25, 2000, 1);
    const auto rep = sigma::abs_equals_abs_martingale(ens, 25, 1);
    EXPECT_EQ(rep.abs_mismatch_off_zero, 0.0);
    EXPECT_EQ(rep.reconstruction_error, 0.0);
    EXPECT_TRUE(rep.martingale.pass) << pathgen::family_name(fam) << " " << rep.martingale.score;
  }
}

TEST(TaperedConstruction, VanishesOnZerosAndDeclaresV) {
  const TimeGrid g(1e-4, 10000);
  const Path b = pathgen::gen_brownian(g, SeedSpec{26, 0});
  const auto z = sigma::PredictableFunctional::constant(1.0);
  const double delta = 10.0 * std::sqrt(g.dt());
  const auto u = sigma::PredictableFunctional::tapered(0.5, delta);
  const auto t = sigma::construct_theorem31(z, u, b, nullptr, {delta});
  for (std::size_t k : t.zeros)
    EXPECT_EQ(t.x.x[k], 0.0);
  for (std::size_t k = 0; k < b.size(); ++k) {
    ASSERT_NEAR(t.x.x[k], t.x.m[k] + t.x.v[k], 1e-12);
    ASSERT_NEAR(t.x.v[k], t.local_time[k], 1e-9);
  }
  const auto zs = sigma::check_zero_set_coincidence(t.x, b, 0.01, &z);
  EXPECT_EQ(zs.symmetric_difference_ratio, 0.0);
  EXPECT_TRUE(zs.pass);
}

TEST(TaperedConstruction, RejectsUntaperedU) {
  const Path b = pathgen::gen_brownian(TimeGrid(1e-3, 1000), SeedSpec{27, 0});
  const auto z = sigma::PredictableFunctional::constant(1.0);
  EXPECT_THROW(sigma::construct_theorem31(z, sigma::PredictableFunctional::constant(0.5), b),
               std::invalid_argument);
  const auto big_z = sigma::PredictableFunctional{"z", [](std::size_t, std::span<const double>) { return 2.0; }, 1.0, 0.0};
  EXPECT_THROW(sigma::construct_theorem31(big_z, sigma::PredictableFunctional::constant(0.0), b),
               std::invalid_argument);
}

TEST(TaperedConstruction, RescaleByZGamma) {
  const Path b = pathgen::gen_brownian(TimeGrid(1e-3, 1000), SeedSpec{28, 0});
  const auto z = sigma::PredictableFunctional::constant(2.0);
  const auto t = sigma::construct_theorem31(z, sigma::PredictableFunctional::constant(0.0), b);
  const Path r = sigma::rescale_by_z_gamma(t.x.x, z, b);
  const auto mask = excursion::zero_mask(t.zeros, b.size());
  for (std::size_t k = 0; k < b.size(); ++k)
    ASSERT_NEAR(r[k], mask[k] ? 0.0 : std::fabs(b[k]), 1e-12);
}

TEST(Compensator, ReflectedPasses) {
  const TimeGrid g(1e-3, 1000);
  const auto b = pathgen::gen_brownian_ensemble(g, 29, 3000, 1);
  std::vector<Path> x;
  for (const auto& p : b)
    x.push_back(pathgen::gen_reflected(p).x);
  const auto rep = sigma::check_compensator(x, sigma::PredictableFunctional::constant(1.0), b);
  EXPECT_TRUE(rep.pass) << rep.n.score << " " << rep.n_gamma.score;
}

TEST(FTransform, BoundAndMartingale) {
  const TimeGrid g(1e-3, 1000);
  const auto b = pathgen::gen_brownian_ensemble(g, 30, 3000, 1);
  std::vector<Path> x;
  for (const auto& p : b)
    x.push_back(pathgen::gen_reflected(p).x);
  const sigma::BoundedFunction f{"ind", [](double l) { return l <= 0.5 ? 1.0 : 0.0; }, 1.0, 0.5,
                                 [](double l) { return std::min(l, 0.5); }};
  const auto rep = sigma::f_transform(x, sigma::PredictableFunctional::constant(1.0), b, f);
  EXPECT_TRUE(rep.bound_checked);
  EXPECT_LE(rep.max_bound_excess, 1e-12);
  EXPECT_TRUE(rep.pass) << rep.martingale.score;
}
