#include "oracle.hpp"

#include "rankone/error.hpp"
#include "rankone/sumset.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace rankone;

namespace {

std::vector<oracle::Int> as_ints(const HeightList& h) {
  std::vector<oracle::Int> out;
  for (const auto& x : h.to_vector()) out.push_back(x.get_si());
  return out;
}

HeightList list(std::vector<std::int64_t> xs) { return HeightList(std::move(xs)); }

Tower explicit_from_heightsets(const std::vector<std::vector<long>>& hs) {
  std::vector<std::vector<BigInt>> sets;
  std::vector<BigInt> next;
  BigInt h = 1;
  for (const auto& row : hs) {
    sets.emplace_back(row.begin(), row.end());
    h = BigInt(row.back()) + h;  // tightest admissible next height
    next.push_back(h);
  }
  auto spacers = spacers_from_heightsets(sets, next);
  std::vector<std::int64_t> cuts;
  for (const auto& r : spacers) cuts.push_back(static_cast<std::int64_t>(r.size()));
  return Tower(ConstructionSpec::explicit_table(cuts, spacers));
}

}  // namespace

TEST(DescendantSet, Examples) {
  Tower hk(ConstructionSpec::named(Family::HajianKakutani));
  EXPECT_EQ(as_ints(descendant_set(hk, LevelSet::base(0), 2).heights), (std::vector<oracle::Int>{0, 1, 4, 5}));
  EXPECT_EQ(as_ints(descendant_set(hk, LevelSet::level(2, 7), 2).heights), (std::vector<oracle::Int>{7}));
  Tower s5(ConstructionSpec::named(Family::Steep5));
  EXPECT_EQ(as_ints(descendant_set(s5, LevelSet::base(0), 2).heights),
            (std::vector<oracle::Int>{0, 1, 5, 6, 25, 26}));
}

TEST(DescendantSet, MatchesOracleAndProductFormula) {
  for (auto fam : {Family::HajianKakutani, Family::Steep5, Family::Ztmr}) {
    Tower t(ConstructionSpec::named(fam));
    for (int n = 0; n <= 4; ++n) {
      std::vector<std::vector<oracle::Int>> sets;
      for (int i = 1; i < n; ++i) {
        std::vector<oracle::Int> row;
        for (const auto& e : t.stage(i).height_set) row.push_back(e.get_si());
        sets.push_back(row);
      }
      if (n < 1) continue;
      const auto d = descendant_set(t, LevelSet::level(1, 3), n);
      const auto want = oracle::sumset(sets, 3);
      EXPECT_EQ(as_ints(d.heights), std::vector<oracle::Int>(want.begin(), want.end()));
      EXPECT_EQ(BigInt(static_cast<unsigned long>(d.size())), t.product_of_cuts(1, n));
      EXPECT_LT(d.heights.back(), t.height(n));
    }
  }
}

TEST(DescendantSet, BudgetExceeded) {
  Tower t(ConstructionSpec::named(Family::Ztmr), 1000);
  EXPECT_THROW(descendant_set(t, LevelSet::base(0), 8), Error);
}

TEST(IntersectCount, Examples) {
  const auto d = list({0, 1, 4, 5});
  EXPECT_EQ(intersect_count(d, 3), 1);
  EXPECT_EQ(intersect_count(d, 0), 4);
  const BigInt shifts[] = {1, 2};
  EXPECT_EQ(multi_intersect_count(d, shifts), 0);
}

TEST(IntersectCount, RandomAgainstOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::set<oracle::Int> s;
    const int size = 1 + static_cast<int>(rng() % 30);
    while (static_cast<int>(s.size()) < size) s.insert(static_cast<oracle::Int>(rng() % 80));
    const HeightList d(std::vector<std::int64_t>(s.begin(), s.end()));
    HeightList::Wide wide;
    for (auto x : s) wide.emplace_back(static_cast<long>(x));
    for (oracle::Int k = -85; k <= 85; k += 1 + static_cast<oracle::Int>(rng() % 7)) {
      EXPECT_EQ(intersect_count(d, k), oracle::pair_count(s, k));
      EXPECT_EQ(intersect_count(d, k), intersect_count(d, -k));
    }
    std::vector<oracle::Int> sh;
    for (int p = 0; p < 3; ++p) sh.push_back(static_cast<oracle::Int>(rng() % 20));
    std::sort(sh.begin(), sh.end());
    std::vector<BigInt> bsh;
    for (auto x : sh) bsh.emplace_back(static_cast<long>(x));
    EXPECT_EQ(multi_intersect_count(d, bsh), oracle::multi_count(s, sh));
  }
}

TEST(IntersectCount, WideRepresentation) {
  const BigInt big = pow_big(5, 40);
  const HeightList d(HeightList::Wide{BigInt(0), BigInt(1), big, BigInt(big + 1)});
  EXPECT_FALSE(d.narrow());
  EXPECT_EQ(intersect_count(d, big), 2);
  EXPECT_EQ(intersect_count(d, 1), 2);
  EXPECT_EQ(intersect_count(d, BigInt(big - 1)), 1);
}

TEST(DecomposeShift, Examples) {
  Tower hk(ConstructionSpec::named(Family::HajianKakutani));
  const auto d = decompose_shift(hk, 3, 2);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->digits, (std::vector<BigInt>{-1, 4}));
  EXPECT_EQ(d->matches, (std::vector<std::int64_t>{1, 1}));
  EXPECT_FALSE(decompose_shift(hk, 2, 2));
  EXPECT_FALSE(decompose_shift(hk, 2, 6));
  Tower z(ConstructionSpec::named(Family::Ztmr));
  const auto zero = decompose_shift(z, 0, 4);
  ASSERT_TRUE(zero);
  EXPECT_EQ(zero->digits, (std::vector<BigInt>(4, 0)));
  EXPECT_EQ(zero->matches, (std::vector<std::int64_t>{2, 3, 4, 5}));
}

TEST(DecomposeShift, ProductFormulaMatchesCounts) {
  for (auto fam : {Family::HajianKakutani, Family::Steep5, Family::Ztmr}) {
    Tower t(ConstructionSpec::named(fam));
    const int n = fam == Family::HajianKakutani ? 6 : 3;
    ASSERT_TRUE(scale_separated(t, 0, n));
    const auto& d = t.relative_sumset(0, n);
    const auto top = t.max_descendant(n).get_si();
    for (oracle::Int k = -top; k <= top; ++k) {
      const auto dec = decompose_shift(t, k, n);
      EXPECT_EQ(dec ? dec->match_product() : BigInt(0), intersect_count(d, k)) << k;
    }
  }
}

TEST(Uniqueness, Examples) {
  EXPECT_TRUE(uniqueness_check(explicit_from_heightsets({{0, 1}, {0, 5}}), 2).pass);
  const auto fail = uniqueness_check(explicit_from_heightsets({{0, 1}, {0, 2}}), 2);
  EXPECT_FALSE(fail.pass);
  ASSERT_TRUE(fail.counterexample);
  EXPECT_NE(fail.counterexample->first, fail.counterexample->second);
  BigInt a = 0, b = 0;
  for (const auto& x : fail.counterexample->first) a += x;
  for (const auto& x : fail.counterexample->second) b += x;
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, fail.shift);
  EXPECT_TRUE(uniqueness_check(explicit_from_heightsets({{0, 1}}), 1).pass);
}

TEST(Uniqueness, SteepImpliesUnique) {
  for (auto fam : {Family::Steep5, Family::HajianKakutani, Family::Ztmr}) {
    Tower t(ConstructionSpec::named(fam));
    for (int n = 1; n <= 4; ++n) {
      if (is_steep_upto(t, n).pass) EXPECT_TRUE(uniqueness_check(t, n).pass);
      if (scale_separated(t, 0, n)) EXPECT_TRUE(uniqueness_check(t, n).pass);
    }
  }
}

TEST(DoubleDifference, Examples) {
  Tower s5(ConstructionSpec::named(Family::Steep5));
  EXPECT_EQ(double_difference_certificate(s5, 1, 5).status, DoubleDifference::CertifiedAbsent);
  EXPECT_EQ(double_difference_certificate(s5, 1, 5).gcd, 5);
  EXPECT_EQ(double_difference_certificate(s5, 0, 3).status, DoubleDifference::Present);
  Tower z(ConstructionSpec::named(Family::Ztmr));
  EXPECT_EQ(double_difference_certificate(z, 1, 5).status, DoubleDifference::CertifiedAbsent);
  // gcd 1 but 1 is not a double difference: H_0 = {0, 2}, H_1 = {0, 7}.
  const auto t = explicit_from_heightsets({{0, 2}, {0, 7}});
  const auto v = double_difference_certificate(t, 0, 2);
  EXPECT_EQ(v.gcd, 1);
  // E = {0, ±2, ±5, ±7, ±9}; no two entries of E are adjacent.
  EXPECT_EQ(v.status, DoubleDifference::AbsentAtStage);
}

TEST(SupportEnumerate, Examples) {
  Tower hk(ConstructionSpec::named(Family::HajianKakutani));
  const auto s = support_enumerate(hk, 0, 2);
  std::vector<std::pair<long, long>> got;
  for (const auto& e : s) got.emplace_back(e.shift.get_si(), e.count.get_si());
  EXPECT_EQ(got, (std::vector<std::pair<long, long>>{{0, 4}, {1, 2}, {3, 1}, {4, 2}, {5, 1}}));
  ASSERT_EQ(support_enumerate(hk, 3, 3).size(), 1u);
  EXPECT_EQ(support_enumerate(hk, 3, 3)[0].count, 1);
  Tower s5(ConstructionSpec::named(Family::Steep5));
  const auto one = support_enumerate(s5, 0, 1);
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one[1].shift, 1);
  EXPECT_EQ(one[1].count, 1);
}

TEST(SupportEnumerate, AgreesWithOracleHistogram) {
  Tower hk(ConstructionSpec::named(Family::HajianKakutani));
  Tower z(ConstructionSpec::named(Family::Ztmr));
  const auto packed = explicit_from_heightsets({{0, 1}, {0, 2, 4}, {0, 6, 12}});
  for (const Tower* t : {static_cast<const Tower*>(&hk), static_cast<const Tower*>(&z), &packed}) {
    const int n = 3;
    const auto d = as_ints(t->relative_sumset(0, n));
    const auto hist = oracle::difference_histogram(std::set<oracle::Int>(d.begin(), d.end()));
    const auto s = support_enumerate(*t, 0, n);
    ASSERT_EQ(s.size(), hist.size());
    std::size_t i = 0;
    for (const auto& [k, c] : hist) {
      EXPECT_EQ(s[i].shift, k);
      EXPECT_EQ(s[i].count, c);
      ++i;
    }
  }
}

TEST(Export, Formats) {
  std::ostringstream a, b;
  write_heights(a, list({0, 1, 4, 5}));
  EXPECT_EQ(a.str(), "0\n1\n4\n5\n");
  write_support_csv(b, {{BigInt(0), BigInt(4)}, {BigInt(3), BigInt(1)}});
  EXPECT_EQ(b.str(), "k,count\n0,4\n3,1\n");
}

TEST(ShiftCounter, BothPathsAgreeWithMergeCounting) {
  Tower s5(ConstructionSpec::named(Family::Steep5));
  const auto packed = explicit_from_heightsets({{0, 1}, {0, 2, 4}, {0, 6, 12}});
  for (const Tower* t : {static_cast<const Tower*>(&s5), &packed}) {
    const ShiftCounter counter(*t, 0, 3);
    EXPECT_EQ(counter.by_decomposition(), t == &s5);
    const auto& d = t->relative_sumset(0, 3);
    const auto top = d.back().get_si();
    for (oracle::Int k = -top - 2; k <= top + 2; ++k) EXPECT_EQ(counter.count(k), intersect_count(d, k)) << k;
  }
}

TEST(ShiftCounter, WideStagesUseBigIntSearch) {
  Tower s5(ConstructionSpec::named(Family::Steep5));
  const ShiftCounter counter(s5, 0, 12);
  EXPECT_TRUE(counter.by_decomposition());
  EXPECT_EQ(counter.count(0), s5.product_of_cuts(0, 12));
  // 5^67 - 5^66 is one difference of H_11 alone.
  EXPECT_EQ(counter.count(pow_big(5, 67) - pow_big(5, 66)), s5.product_of_cuts(0, 11));
  // 5^66 - 5^55 needs a digit from H_10 as well.
  EXPECT_EQ(counter.count(pow_big(5, 66) - pow_big(5, 55)), s5.product_of_cuts(0, 10));
  EXPECT_EQ(counter.count(2), 0);
}

TEST(CountAtLeast, MatchesMaterializedSet) {
  Tower z(ConstructionSpec::named(Family::Ztmr));
  const auto packed = explicit_from_heightsets({{0, 1}, {0, 2, 4}, {0, 6, 12}});
  for (const Tower* t : {static_cast<const Tower*>(&z), &packed}) {
    for (int j = 0; j <= 1; ++j) {
      const auto d = as_ints(t->relative_sumset(j, 3));
      for (oracle::Int theta = -1; theta <= d.back() + 2; ++theta) {
        const auto want = std::count_if(d.begin(), d.end(), [&](oracle::Int x) { return x >= theta; });
        EXPECT_EQ(count_at_least(*t, j, 3, theta), static_cast<long>(want)) << theta;
      }
    }
  }
}
