#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sigmalab/estimates.hpp"
#include "sigmalab/excursion.hpp"
#include "sigmalab/pathgen.hpp"

using namespace sigmalab;

TEST(PhiSpec, ClosedForms) {
  const auto c = estimates::PhiSpec::constant(2.0);
  EXPECT_DOUBLE_EQ(c.closed_form(1.0), 1.0 - std::exp(-0.5));
  EXPECT_NEAR(c.closed_form(1e-9), 0.0, 1e-9);
  const auto e = estimates::PhiSpec::exponential();
  EXPECT_NEAR(e.closed_form(50.0), 1.0 - std::exp(-(1.0 - std::exp(-50.0))), 1e-15);
  EXPECT_THROW(estimates::PhiSpec::constant(0.0), std::invalid_argument);
}

TEST(PhiSpec, QuadratureMatchesAnalytic) {
  for (auto spec : {estimates::PhiSpec::constant(1.0), estimates::PhiSpec::constant(0.3),
                    estimates::PhiSpec::exponential()}) {
    auto numeric = spec;
    numeric.integral_exact = nullptr;
    for (double u : {0.1, 0.5, 1.0, 2.0, 7.0}) {
      const double a = spec.closed_form(u), q = numeric.closed_form(u);
      EXPECT_LE(std::fabs(a - q), 1e-9 * a) << spec.label << " " << u;
    }
  }
}

TEST(InverseLocalTime, Examples) {
  const Path l(TimeGrid(0.1, 5), {0, 0, 0, 0.2, 0.5, 0.5});
  EXPECT_EQ(*estimates::inverse_local_time(l, 0.0), 0.30000000000000004);
  EXPECT_FALSE(estimates::inverse_local_time(l, 0.5).has_value());
  const auto t = estimates::inverse_local_time(l, 0.3);
  ASSERT_TRUE(t);
  EXPECT_GE(l[l.grid().index_at(*t + 1e-12)], 0.3);
}

TEST(Exceedance, MonotoneInUAndCloseToClosedForm) {
  const std::vector<double> us{0.25, 0.5, 1.0, 2.0};
  estimates::EnsembleConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_paths = 4000;
  cfg.master_seed = 31;
  cfg.workers = 1;
  const auto reps = estimates::exceedance_probability(estimates::PhiSpec::constant(1.0), us, cfg);
  for (std::size_t j = 1; j < reps.size(); ++j)
    EXPECT_LE(reps[j - 1].empirical, reps[j].empirical);
  for (const auto& r : reps) {
    EXPECT_FALSE(r.horizon_flag);
    EXPECT_NEAR(r.empirical, r.closed_form, 3.0 * r.stderr_ + 0.05) << r.u;
  }
  EXPECT_THROW(estimates::exceedance_probability(estimates::PhiSpec::constant(1.0), std::vector<double>{0.0}, cfg),
               std::invalid_argument);
}

TEST(Exceedance, TaperedWithZeroDriftMatchesPlain) {
  const auto phi = estimates::PhiSpec::constant(1.0);
  for (std::uint32_t i = 0; i < 50; ++i) {
    const auto a = estimates::simulate_exceedance(phi, 1.0, 1e-3, SeedSpec{32, i}, 50.0);
    const auto b = estimates::simulate_exceedance_tapered(phi, 1.0, 1e-3, SeedSpec{32, i}, 50.0, 0.0, 0.1);
    EXPECT_EQ(a.exceeded, b.exceeded);
    EXPECT_EQ(a.level, b.level);
    EXPECT_EQ(a.time, b.time);
  }
}

TEST(TPhi, BoundaryOnPathAndStream) {
  const auto phi = estimates::PhiSpec::constant(1.0);
  const double dt = 1e-4;
  const Path b = pathgen::gen_brownian(TimeGrid(dt, 200000), SeedSpec{33, 0});
  const auto on_path = estimates::t_phi_stopping(phi, b);
  const auto streamed = estimates::t_phi_stopping(phi, dt, SeedSpec{33, 0}, 20.0);
  ASSERT_TRUE(on_path.time && streamed.time);
  EXPECT_EQ(*on_path.index, *streamed.index);
  EXPECT_EQ(on_path.boundary, streamed.boundary);
  EXPECT_GE(on_path.boundary, 1.0);
  EXPECT_LE(on_path.boundary, 1.0 + 5.0 * std::sqrt(dt));
}

TEST(Azema, ClosedFormValues) {
  EXPECT_EQ(estimates::azema_value(0.3, 0.0, 1.0), 0.0);
  EXPECT_NEAR(estimates::azema_value(0.5, 50.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(estimates::azema_value(0.5, 0.5, 1.0), 0.5205, 1e-4);
  EXPECT_THROW(estimates::azema_value(1.0, 0.5, 1.0), std::invalid_argument);
}

TEST(Azema, SubmartingaleRangeAndZeros) {
  const Path b = pathgen::gen_brownian(TimeGrid(1e-3, 1000), SeedSpec{34, 0});
  const Path r = estimates::azema_submartingale(b);
  EXPECT_LT(r.grid().horizon(), 1.0);
  const auto mask = excursion::zero_mask(excursion::zero_set(b), b.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    EXPECT_GE(r[k], 0.0);
    EXPECT_LE(r[k], 1.0);
    if (mask[k]) {
      EXPECT_EQ(r[k], 0.0);
    }
  }
}

TEST(Azema, NestedOracleAgrees) {
  const auto est = estimates::azema_nested(0.5, 0.5, 1.0, 1e-4, 10000, SeedSpec{35, 0});
  EXPECT_NEAR(est.mean, estimates::azema_value(0.5, 0.5, 1.0), 3.0 * est.stderr_);
}

TEST(Representation, ZeroSpecIsExact) {
  estimates::RepresentationConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_outer = 10;
  cfg.n_inner = 20;
  cfg.workers = 1;
  const auto rep = estimates::representation_check(estimates::RepresentationSpec::zero(), cfg);
  EXPECT_EQ(rep.median_deviation, 0.0);
  EXPECT_TRUE(rep.pass);
}

TEST(Representation, AbsBAndAzema) {
  estimates::RepresentationConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_outer = 60;
  cfg.n_inner = 400;
  cfg.master_seed = 36;
  cfg.workers = 1;
  for (auto spec : {estimates::RepresentationSpec::abs_b(), estimates::RepresentationSpec::azema()}) {
    const auto rep = estimates::representation_check(spec, cfg);
    EXPECT_LT(rep.median_deviation, 1.5) << spec.name;
    EXPECT_EQ(rep.starved, 0u);
  }
}

TEST(RxProduct, ZeroPassesAbsBIsFlagged) {
  const TimeGrid g(1e-3, 1000);
  const auto b = pathgen::gen_brownian_ensemble(g, 37, 500, 1);
  std::vector<Path> zero(b.size(), Path(g)), abs_b;
  for (const auto& p : b) {
    Path a(g);
    for (std::size_t k = 0; k < a.size(); ++k)
      a[k] = std::fabs(p[k]);
    abs_b.push_back(a);
  }
  const auto z = estimates::rx_product_martingale(zero, b);
  EXPECT_TRUE(z.precondition_met);
  ASSERT_TRUE(z.score);
  EXPECT_EQ(*z.score, 0.0);
  const auto a = estimates::rx_product_martingale(abs_b, b);
  EXPECT_FALSE(a.precondition_met);
  EXPECT_FALSE(a.score.has_value());
}

TEST(Ks, OneAndTwoSample) {
  EXPECT_EQ(estimates::ks_two_sample({0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}), 0.0);
  EXPECT_DOUBLE_EQ(estimates::ks_two_sample({0.0, 1.0}, {2.0, 3.0}), 1.0);
  EXPECT_DOUBLE_EQ(estimates::ks_one_sample({0.5}, [](double t) { return t; }), 0.5);
  EXPECT_NEAR(estimates::arcsine_cdf(0.5), 0.5, 1e-15);
  EXPECT_NEAR(estimates::arcsine_cdf(0.25), 2.0 / std::numbers::pi * std::asin(0.5), 1e-15);
}

TEST(HonestTime, FlippedZeroSetGivesSameLaw) {
  const auto rep = estimates::honest_time_law(TimeGrid(1e-4, 10000), 38, 3000, 1);
  EXPECT_EQ(rep.ks_g_vs_gamma, 0.0);
  EXPECT_EQ(rep.ks_flipped_vs_gamma, 0.0);
  EXPECT_LT(rep.ks_gamma_vs_arcsine, 1.63 / std::sqrt(3000.0));
}
