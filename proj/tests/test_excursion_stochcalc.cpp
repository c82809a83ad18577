#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sigmalab/excursion.hpp"
#include "sigmalab/pathgen.hpp"
#include "sigmalab/stochcalc.hpp"

using namespace sigmalab;

namespace {

Path make(std::vector<double> v, double dt = 0.1) {
  const std::size_t n = v.size() - 1;
  return Path(TimeGrid(dt, n), std::move(v));
}

using Idx = std::vector<std::size_t>;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

} // namespace

TEST(ZeroSet, ExactZeros) { EXPECT_EQ(excursion::zero_set(make({0, 1, 2, 1, 0})), (Idx{0, 4})); }

TEST(ZeroSet, CrossingAttribution) {
  EXPECT_EQ(excursion::zero_set(make({1, -1})), (Idx{0}));
  EXPECT_EQ(excursion::zero_set(make({2, -1})), (Idx{1}));
  EXPECT_EQ(excursion::zero_set(make({1, -2})), (Idx{0}));
  EXPECT_EQ(excursion::zero_set(make({0, 1, -0.5, -1, 3})), (Idx{0, 2, 3}));
}

TEST(ZeroSet, Band) {
  EXPECT_EQ(excursion::zero_set(make({0.05, 1, 0.1, 2}), 0.1), (Idx{0, 2}));
  EXPECT_TRUE(excursion::zero_set(make({1, 2, 3})).empty());
}

TEST(ZeroSet, DecomposedSeesReflectedCrossings) {
  const Path b = pathgen::gen_brownian(TimeGrid(1e-3, 2000), SeedSpec{4, 0});
  const auto r = pathgen::gen_reflected(b);
  EXPECT_EQ(excursion::zero_set(r), excursion::zero_set(b));
  EXPECT_LT(excursion::zero_set(r.x).size(), excursion::zero_set(b).size());
}

TEST(Excursions, PositivePathIsOneUnfinishedExcursion) {
  const auto exc = excursion::excursion_decompose(make({1, 2, 3, 1}));
  ASSERT_EQ(exc.intervals.size(), 1u);
  EXPECT_EQ(exc.intervals[0].sign, 1);
  EXPECT_TRUE(exc.intervals[0].unfinished);
  EXPECT_EQ(exc.intervals[0].begin, 0u);
  EXPECT_EQ(exc.intervals[0].end, 4u);
}

TEST(Excursions, IntervalsBetweenZeros) {
  const auto exc = excursion::excursion_decompose(make({0, 1, 2, 0, -1, -3, 0, 2}));
  ASSERT_EQ(exc.intervals.size(), 3u);
  EXPECT_EQ(exc.intervals[0], (excursion::Interval{0, 3, 1, 3, 1, false}));
  EXPECT_EQ(exc.intervals[1], (excursion::Interval{3, 6, 4, 6, -1, false}));
  EXPECT_EQ(exc.intervals[2], (excursion::Interval{6, 7, 7, 8, 1, true}));
}

TEST(Excursions, InvariantsOnBrownianPath) {
  const Path b = pathgen::gen_brownian(TimeGrid(1e-4, 10000), SeedSpec{5, 0});
  const auto exc = excursion::excursion_decompose(b);
  const auto mask = excursion::zero_mask(exc.zeros, b.size());
  std::size_t prev_end = 0;
  for (const auto& iv : exc.intervals) {
    EXPECT_GE(iv.begin, prev_end);
    prev_end = iv.end;
    for (std::size_t k = iv.begin; k < iv.end; ++k) {
      ASSERT_FALSE(mask[k]);
      ASSERT_EQ(b[k] > 0 ? 1 : -1, iv.sign);
    }
  }
}

TEST(LastZero, Values) {
  const Path g = excursion::last_zero(make({0, 1, 0, 2, 3}));
  EXPECT_EQ(g[1], 0.0);
  EXPECT_EQ(g[2], 0.2);
  EXPECT_EQ(g[4], 0.2);
  EXPECT_THROW(excursion::last_zero(make({1, 2})), std::invalid_argument);
}

TEST(SignProcesses, ZAlphaConstantPerExcursion) {
  const Path b = pathgen::gen_brownian(TimeGrid(1e-4, 10000), SeedSpec{6, 0});
  const auto exc = excursion::excursion_decompose(b);
  const auto z = excursion::make_z_alpha(exc, 0.5, SeedSpec{6, 0});
  EXPECT_EQ(z.zero_projection, 0.0);
  std::size_t plus = 0;
  for (const auto& iv : exc.intervals) {
    const double s = z.path[iv.begin];
    EXPECT_TRUE(s == 1.0 || s == -1.0);
    plus += s > 0 ? 1 : 0;
    for (std::size_t k = iv.begin; k < iv.end; ++k) {
      ASSERT_EQ(z.path[k], s);
      ASSERT_EQ(std::fabs(z.path[k] * b[k]), std::fabs(b[k]));
    }
  }
  for (std::size_t k : exc.zeros)
    EXPECT_EQ(z.path[k], 0.0);
  const double n = static_cast<double>(exc.intervals.size());
  EXPECT_NEAR(plus / n, 0.5, 4.0 * 0.5 / std::sqrt(n));
}

TEST(SignProcesses, ZAlphaExtremes) {
  const auto exc = excursion::excursion_decompose(make({0, 1, 0, -1, 0, 2}));
  const auto up = excursion::make_z_alpha(exc, 1.0, SeedSpec{1, 1});
  const auto down = excursion::make_z_alpha(exc, 0.0, SeedSpec{1, 1});
  EXPECT_EQ(up.path.values()[1], 1.0);
  EXPECT_EQ(up.path.values()[3], 1.0);
  EXPECT_EQ(down.path.values()[5], -1.0);
  EXPECT_EQ(up.predictable()[0], 1.0);
  EXPECT_EQ(down.predictable()[2], -1.0);
  EXPECT_THROW(excursion::make_z_alpha(exc, 1.5, SeedSpec{}), std::invalid_argument);
}

TEST(SignProcesses, KTakesRightLimitOnZeros) {
  const Path x = make({0, 1, 0, -1, -2, 0});
  const auto k = excursion::sign_K(x, excursion::excursion_decompose(x));
  EXPECT_EQ(k.path.values()[0], 1.0);
  EXPECT_EQ(k.path.values()[1], 1.0);
  EXPECT_EQ(k.path.values()[2], -1.0);
  EXPECT_EQ(k.path.values()[4], -1.0);
  EXPECT_EQ(k.path.values()[5], 0.0);
  EXPECT_EQ(k.zero_projection, 0.0);
}

TEST(Ito, TelescopesAndVanishes) {
  const Path x = make({0, 0.5, -0.25, 1.0});
  const Path one = make({1, 1, 1, 1});
  const Path zero = make({0, 0, 0, 0});
  const Path i1 = stochcalc::ito_integral(one, x);
  for (std::size_t k = 0; k < x.size(); ++k)
    EXPECT_DOUBLE_EQ(i1[k], x[k] - x[0]);
  EXPECT_EQ(stochcalc::ito_integral(zero, x), zero);
  EXPECT_THROW(stochcalc::ito_integral(one, make({0, 1})), std::invalid_argument);
}

TEST(Ito, LinearInIntegrand) {
  const Path b = pathgen::gen_brownian(TimeGrid(1e-3, 1000), SeedSpec{7, 0});
  const Path h1 = pathgen::gen_brownian(TimeGrid(1e-3, 1000), SeedSpec{7, 1});
  const Path h2 = pathgen::gen_brownian(TimeGrid(1e-3, 1000), SeedSpec{7, 2});
  Path mix(b.grid());
  for (std::size_t k = 0; k < b.size(); ++k)
    mix[k] = 2.0 * h1[k] + h2[k];
  const Path a = stochcalc::ito_integral(mix, b);
  const Path p = stochcalc::ito_integral(h1, b), q = stochcalc::ito_integral(h2, b);
  for (std::size_t k = 0; k < b.size(); ++k)
    EXPECT_NEAR(a[k], 2.0 * p[k] + q[k], 1e-12);
}

TEST(Ito, ItoFormulaForSquareConvergesAtSqrtDt) {
  std::vector<double> med;
  for (double dt : {1e-2, 2.5e-3, 6.25e-4}) {
    const TimeGrid g = TimeGrid::covering(1.0, dt);
    std::vector<double> res;
    for (std::uint32_t i = 0; i < 400; ++i) {
      const Path b = pathgen::gen_brownian(g, SeedSpec{8, i});
      const Path ib = stochcalc::ito_integral(b, b);
      res.push_back(std::fabs(ib.back() + 0.5 * g.horizon() - 0.5 * b.back() * b.back()));
    }
    med.push_back(median(res));
  }
  for (std::size_t j = 1; j < med.size(); ++j)
    EXPECT_NEAR(med[j] / med[j - 1], 0.5, 0.15);
}

TEST(QuadraticVariation, Examples) {
  const std::size_t n = 100;
  Path lin(TimeGrid(1.0 / n, n));
  for (std::size_t k = 0; k <= n; ++k)
    lin[k] = 3.0 * lin.grid().time(k);
  EXPECT_NEAR(stochcalc::quadratic_variation(lin).back(), 9.0 / n, 1e-12);
  EXPECT_EQ(stochcalc::quadratic_variation(make({2, 2, 2})).back(), 0.0);
  double mean = 0.0;
  for (std::uint32_t i = 0; i < 200; ++i)
    mean += stochcalc::quadratic_variation(pathgen::gen_brownian(TimeGrid(1e-4, 10000), SeedSpec{9, i})).back();
  EXPECT_NEAR(mean / 200.0, 1.0, 0.05);
}

TEST(LocalTime, OccupationExamples) {
  const Path zero = make({0, 0, 0, 0, 0}, 0.25);
  const Path occ = stochcalc::local_time_occupation(zero, 0.1);
  for (std::size_t k = 0; k < zero.size(); ++k)
    EXPECT_DOUBLE_EQ(occ[k], zero.grid().time(k) / 0.2);
  const Path far = make({1, 2, 1, 3});
  EXPECT_EQ(stochcalc::local_time_occupation(far, 0.5).back(), 0.0);
  EXPECT_THROW(stochcalc::local_time_occupation(far, 0.0), std::invalid_argument);
}

TEST(LocalTime, DowncrossingExamples) {
  EXPECT_LE(stochcalc::local_time_downcrossing(make({0, 1, 2, 3, 4}), 0.5, false).back(), 0.5);
  EXPECT_EQ(stochcalc::local_time_downcrossing(make({0, 0, 0}), 0.5).back(), 0.0);
  EXPECT_EQ(stochcalc::local_time_downcrossing(make({0, 1, 0, 1, 0}), 0.5, false).back(), 1.0);
  EXPECT_THROW(stochcalc::local_time_downcrossing(make({0, 1}), -1.0), std::invalid_argument);
}

TEST(LocalTime, TanakaExamples) {
  EXPECT_EQ(stochcalc::local_time_tanaka(make({0, 0, 0})).back(), 0.0);
  const Path p = make({0, 1, -1, 2, 3, 2.5, 4});
  const Path l = stochcalc::local_time_tanaka(p);
  for (std::size_t k = 3; k + 1 < p.size(); ++k)
    EXPECT_EQ(l[k + 1], l[k]);
  const Path b = pathgen::gen_brownian(TimeGrid(1e-4, 10000), SeedSpec{10, 0});
  const auto r = pathgen::gen_reflected(b);
  const Path direct = stochcalc::local_time_tanaka(b);
  const Path from_v = stochcalc::local_time_tanaka(r);
  for (std::size_t k = 0; k < b.size(); ++k)
    ASSERT_NEAR(direct[k], from_v[k], 1e-9);
}

TEST(LocalTime, EstimatorsAgreeOnAverage) {
  const double dt = 1e-4, eps = std::pow(dt, 0.4);
  double occ = 0.0, down = 0.0, tan = 0.0;
  const int n = 400;
  for (int i = 0; i < n; ++i) {
    const Path b = pathgen::gen_brownian(TimeGrid(dt, 10000), SeedSpec{11, static_cast<std::uint32_t>(i)});
    occ += stochcalc::local_time_occupation(b, eps).back() / n;
    down += stochcalc::local_time_downcrossing(b, eps).back() / n;
    tan += stochcalc::local_time_tanaka(b).back() / n;
  }
  const double expected = std::sqrt(2.0 / std::numbers::pi);
  EXPECT_NEAR(occ / tan, 1.0, 0.1);
  EXPECT_NEAR(down / tan, 1.0, 0.1);
  EXPECT_NEAR(tan, expected, 0.06);
}

TEST(Tanaka, ResidualStartsAtZeroAndShrinksUnderRefinement) {
  std::vector<double> med;
  for (double dt : {1e-3, 2.5e-4, 6.25e-5}) {
    std::vector<double> sup;
    for (std::uint32_t i = 0; i < 300; ++i) {
      const auto rep =
          stochcalc::check_tanaka(pathgen::gen_brownian(TimeGrid::covering(1.0, dt), SeedSpec{12, i}), std::pow(dt, 0.4));
      ASSERT_EQ(rep.components.back().path[0], 0.0);
      sup.push_back(rep.sup_residual);
    }
    med.push_back(median(sup));
  }
  EXPECT_LT(med[1], med[0]);
  EXPECT_LT(med[2], med[1]);
}

TEST(Balayage, ConstantKGivesZeroR) {
  const Path b = pathgen::gen_brownian(TimeGrid(1e-4, 10000), SeedSpec{13, 0});
  Path k(b.grid());
  std::fill(k.values().begin(), k.values().end(), 2.5);
  const auto rep = stochcalc::check_balayage(k, b);
  EXPECT_TRUE(rep.identity.pass);
  EXPECT_LE(stochcalc::sup_abs(rep.identity.components.back().path.values()), 1e-12);
}

TEST(Balayage, NoZerosAfterStart) {
  const Path y = make({0, 1, 2, 1.5, 3});
  const Path k = make({1, 4, -2, 7, 0});
  const auto rep = stochcalc::check_balayage(k, y);
  for (double r : rep.identity.components.back().path.values())
    EXPECT_EQ(r, 0.0);
}

TEST(Balayage, LocalTimeKIsConstantPerExcursion) {
  const Path b = pathgen::gen_brownian(TimeGrid(1e-4, 10000), SeedSpec{13, 1});
  const auto rep = stochcalc::check_balayage(stochcalc::local_time_tanaka(b), b);
  EXPECT_LE(rep.max_excursion_oscillation, 1e-10);
  EXPECT_GE(rep.total_variation, 0.0);
}
