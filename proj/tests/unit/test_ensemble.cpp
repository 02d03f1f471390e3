#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "rcm/ensemble.hpp"
#include "rcm/random.hpp"

using namespace rcm;

TEST(Random, ForkSeedsAreDistinct) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(1u << 20);
  for (std::uint64_t i = 0; i < (1u << 20); ++i) seeds.push_back(random::derive_seed(12345, i));
  std::sort(seeds.begin(), seeds.end());
  EXPECT_EQ(std::adjacent_find(seeds.begin(), seeds.end()), seeds.end());
}

TEST(Random, OpenUnitNeverHitsEndpoints) {
  EXPECT_GT(random::to_open_unit(0), 0.0);
  EXPECT_LT(random::to_open_unit(~std::uint64_t{0}), 1.0);
}

TEST(Ensemble, PairUniformsAreUniform) {
  // One-sample Kolmogorov-Smirnov against U(0, 1).
  CoupledEnsemble ens(99, 2);
  std::vector<double> u;
  for (std::uint64_t i = 1; u.size() < 100000; ++i)
    for (std::uint64_t j = i + 1; j <= i + 10; ++j) u.push_back(ens.pair_uniform(i, j));
  std::sort(u.begin(), u.end());
  double ks = 0.0;
  const double m = static_cast<double>(u.size());
  for (std::size_t k = 0; k < u.size(); ++k)
    ks = std::max({ks, (k + 1) / m - u[k], u[k] - k / m});
  // 1% critical value is about 1.63 / sqrt(m).
  EXPECT_LT(ks * std::sqrt(m), 1.63);
}

TEST(Ensemble, PairUniformIsSymmetric) {
  CoupledEnsemble ens(5, 3);
  for (std::uint64_t i = 0; i < 50; ++i)
    for (std::uint64_t j = 0; j < 50; ++j)
      if (i != j) {
        EXPECT_EQ(ens.pair_uniform(i, j), ens.pair_uniform(j, i));
      }
  EXPECT_THROW(ens.pair_uniform(3, 3), InvalidInput);
}

TEST(Ensemble, PoissonMeanAcrossSeeds) {
  const double n = 200.0;
  double sum = 0.0, sq = 0.0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) {
    const double count = static_cast<double>(CoupledEnsemble(s, 2).poisson_count(n));
    sum += count;
    sq += count * count;
  }
  const double mean = sum / seeds;
  const double var = sq / seeds - mean * mean;
  // Standard error of the mean is sqrt(200 / 1000).
  EXPECT_NEAR(mean, n, 4.0 * std::sqrt(n / seeds));
  EXPECT_NEAR(var / n, 1.0, 0.2);
}

TEST(Ensemble, CountsAreMonotoneAndPrefixesNest) {
  CoupledEnsemble ens(2024, 2);
  std::size_t prev = 0;
  for (double n : {10.0, 50.0, 100.0, 400.0, 1000.0}) {
    const std::size_t count = ens.poisson_count(n);
    EXPECT_GE(count, prev);
    prev = count;
  }
  auto small = ens.points_up_to(100.0);
  auto large = ens.points_up_to(1000.0);
  ASSERT_LE(small.size(), large.size());
  EXPECT_TRUE(std::equal(small.coords.begin(), small.coords.end(), large.coords.begin()));
}

TEST(Ensemble, RealizationIsAPureFunctionOfSeed) {
  CoupledEnsemble a(77, 3), b(77, 3);
  auto big_first = b.points_up_to(500.0);
  auto pa = a.points_up_to(100.0);
  auto pb = b.points_up_to(100.0);
  EXPECT_EQ(pa.coords, pb.coords);
  EXPECT_EQ(a.arrival_time(7), b.arrival_time(7));
  EXPECT_NE(a.fork(0).points_up_to(100.0).coords, pa.coords);
  EXPECT_EQ(a.fork(3).points_up_to(100.0).coords, b.fork(3).points_up_to(100.0).coords);
}

TEST(Ensemble, PointsLieInTheTorus) {
  CoupledEnsemble ens(1, 4);
  auto cloud = ens.points_up_to(300.0);
  for (double x : cloud.coords) {
    EXPECT_GT(x, -0.5);
    EXPECT_LE(x, 0.5);
  }
  EXPECT_EQ(cloud.coords.size(), cloud.size() * 4);
}

TEST(Ensemble, PalmAddsOriginOnly) {
  CoupledEnsemble ens(8, 2);
  auto plain = ens.points_up_to(100.0);
  auto palm = ens.with_palm(true).points_up_to(100.0);
  ASSERT_EQ(palm.size(), plain.size() + 1);
  EXPECT_EQ(palm.coords[0], 0.0);
  EXPECT_EQ(palm.coords[1], 0.0);
  EXPECT_TRUE(std::equal(plain.coords.begin(), plain.coords.end(), palm.coords.begin() + 2));
  EXPECT_EQ(palm.label(0), 0u);
  EXPECT_EQ(palm.label(1), plain.label(0));
  EXPECT_EQ(ens.point(0), TorusPoint::origin(2));
}

TEST(Ensemble, RejectsBadArguments) {
  EXPECT_THROW(CoupledEnsemble(1, 0), InvalidInput);
  EXPECT_THROW(CoupledEnsemble(1, 2).poisson_count(0.0), InvalidInput);
  EXPECT_THROW(CoupledEnsemble(1, 2).arrival_time(0), InvalidInput);
}
