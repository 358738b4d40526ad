#include "rankone/correlation.hpp"
#include "rankone/diagnostics.hpp"
#include "rankone/weaktop.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rankone;

namespace {

// Random normal construction: the table repeats every three stages, last spacer positive.
ConstructionSpec random_spec(std::mt19937_64& rng) {
  std::vector<std::int64_t> cuts;
  std::vector<std::vector<BigInt>> spacers;
  for (int n = 0; n < 3; ++n) {
    const auto r = std::uniform_int_distribution<std::int64_t>(2, 3)(rng);
    cuts.push_back(r);
    std::vector<BigInt> row;
    for (std::int64_t k = 0; k < r; ++k) row.emplace_back(std::uniform_int_distribution<long>(k + 1 == r ? 1 : 0, 6)(rng));
    spacers.push_back(row);
  }
  auto spec = ConstructionSpec::explicit_table(cuts, spacers);
  spec.cyclic = true;
  spec.base_width = Rational(std::uniform_int_distribution<long>(1, 5)(rng)) / 4;
  return spec;
}

}  // namespace

TEST(Properties, RandomSpecsNormalizeAndSatisfyCauchySchwarz) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    Tower t(random_spec(rng));
    const auto i = LevelSet::base(0);
    for (long n : {1L, 2L, 5L, 13L, 40L}) {
      // u_k is normalized by μ(I)^2, so the ratio is μ(I)^2 (1 at the default width).
      const auto w = wre_ratio(t, i, i, n);
      // Slowly growing towers may not settle within the stage budget; the interval must still hold the value.
      EXPECT_TRUE(w.ratio.contains(w.target)) << t.spec().id() << " " << w.ratio;
      if (w.ratio.exact()) EXPECT_EQ(w.ratio, RationalInterval::point(w.target));
      // Cauchy-Schwarz on I: μ(I) ∫_I S_n^2 >= (∫_I S_n)^2.
      EXPECT_GE(renyi_ratio(t, n).lower * i.measure(t), 1) << t.spec().id();
    }
  }
}

TEST(Properties, RwmDominatesWreDeviation) {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 15; ++trial) {
    Tower t(random_spec(rng));
    const auto h1 = t.height(1).get_si();
    LevelSet a{1, {BigInt(0)}}, b{1, {BigInt(h1 - 1)}};
    if (h1 > 2) a.heights.emplace_back(h1 / 2);
    for (long n : {1L, 3L, 9L, 27L}) {
      const auto w = wre_ratio(t, a, b, n);
      const auto dev = abs(w.ratio - RationalInterval::point(w.target));
      EXPECT_GE(rwm_deviation(t, a, b, n).upper, dev.lower);
    }
  }
}

TEST(Properties, RenyiAtLeastOneOnFamilies) {
  for (auto fam : {Family::HajianKakutani, Family::Steep5, Family::Ztmr}) {
    Tower t(ConstructionSpec::named(fam));
    for (std::int64_t n = 1; n <= 60; ++n) EXPECT_GE(renyi_ratio(t, n).lower, 1) << to_string(fam) << " " << n;
  }
}

TEST(Properties, BreBoundedAlongKappa) {
  for (auto fam : {Family::HajianKakutani, Family::Steep5, Family::Ztmr}) {
    for (const Rational& width : {Rational(1), Rational(1, 3)}) {
      auto spec = ConstructionSpec::named(fam);
      spec.base_width = width;
      Tower t(spec);
      const Rational c = 4 / width;
      for (int mp = 1; mp <= 3; ++mp) {
        const auto n = kappa(t, mp).get_si();
        for (int m = 1; m <= 4; ++m) {
          if (t.height(m) < n + 1) continue;
          EXPECT_LE(bre_sup_profile(t, n, m).sup.upper, c) << to_string(fam) << " " << mp << " " << m;
        }
      }
    }
  }
}

TEST(Properties, RatioConstancyIsOneOverDescendantCount) {
  for (auto fam : {Family::HajianKakutani, Family::Steep5, Family::Ztmr}) {
    Tower t(ConstructionSpec::named(fam));
    for (int j = 0; j <= 2; ++j) {
      const Rational want = Rational(1) / t.product_of_cuts(0, j);
      for (const auto& r : ratio_constancy(t, j, 3)) EXPECT_EQ(r.ratio, want) << to_string(fam) << " j=" << j;
    }
  }
}

TEST(Properties, PartitionMinimumBelowAnyGrouping) {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 6)(rng), m = std::uniform_int_distribution<int>(1, 3)(rng);
    PartitionColumn d(n, DyadicSet{3, std::vector<bool>(16, false)});
    for (int cell = 0; cell < 16; ++cell) d[std::uniform_int_distribution<int>(0, n - 1)(rng)].cells[cell] = true;
    PartitionColumn c;
    for (int i = 0; i < m; ++i) c.push_back(enumerate_A(std::uniform_int_distribution<long>(1, 4000)(rng)));
    PartitionColumn grouped(m, DyadicSet{3, {}});
    for (const auto& piece : d) {
      const int g = std::uniform_int_distribution<int>(-1, m - 1)(rng);
      if (g >= 0) grouped[g] = set_union(grouped[g], piece);
    }
    EXPECT_LE(partition_P(c, d), rho(c, grouped));
  }
}
