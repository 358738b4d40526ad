#include "oracle.hpp"

#include "rankone/error.hpp"
#include "rankone/spec_io.hpp"
#include "rankone/tower.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>

using namespace rankone;

namespace {

std::vector<BigInt> big(std::initializer_list<long> xs) {
  std::vector<BigInt> out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(BuildStage, HajianKakutaniStageTwo) {
  const auto st = build_stage(ConstructionSpec::named(Family::HajianKakutani), 2);
  EXPECT_EQ(st.height, 16);
  EXPECT_EQ(st.width, Rational(1, 4));
  EXPECT_EQ(st.height_set, big({0, 16}));
  EXPECT_EQ(st.max_descendant, 5);
}

TEST(BuildStage, Steep5StageOne) {
  const auto st = build_stage(ConstructionSpec::named(Family::Steep5), 1);
  EXPECT_EQ(st.height_set, big({0, 5, 25}));
  EXPECT_EQ(st.cuts, 3);
}

TEST(BuildStage, BaseColumn) {
  auto spec = ConstructionSpec::named(Family::Ztmr);
  spec.base_width = Rational(3, 7);
  const auto st = build_stage(spec, 0);
  EXPECT_EQ(st.height, 1);
  EXPECT_EQ(st.width, Rational(3, 7));
  EXPECT_EQ(st.max_descendant, 0);
}

TEST(BuildStage, ZtmrSmallStages) {
  Tower t(ConstructionSpec::named(Family::Ztmr));
  EXPECT_EQ(t.stage(0).height_set, big({0, 1}));
  EXPECT_EQ(t.stage(1).height_set, big({0, 5, 25}));
  EXPECT_EQ(t.stage(2).height_set, big({0, 125, 250, 3125}));
  for (int n = 0; n <= 12; ++n) EXPECT_EQ(t.stage(n).cuts, n + 2) << n;
  const auto& h5 = t.stage(5).height_set;
  const BigInt p = pow_big(5, 15);
  EXPECT_NE(std::find(h5.begin(), h5.end(), p), h5.end());
  EXPECT_NE(std::find(h5.begin(), h5.end(), 3 * p), h5.end());
}

TEST(BuildStage, RejectsBadCuts) {
  auto spec = ConstructionSpec::explicit_table({2, 1}, {{BigInt(0), BigInt(1)}, {BigInt(0)}});
  EXPECT_EQ(kind_of([&] { Tower t(spec); }), ErrorKind::InvalidSpec);
  auto neg = ConstructionSpec::explicit_table({2}, {{BigInt(0), BigInt(-1)}});
  EXPECT_EQ(kind_of([&] { Tower t(neg); }), ErrorKind::InvalidSpec);
}

TEST(BuildStage, BudgetGuard) {
  auto spec = ConstructionSpec::named(Family::HajianKakutani);
  spec.max_stage = 3;
  Tower t(spec);
  EXPECT_NO_THROW(t.stage(3));
  EXPECT_EQ(kind_of([&] { t.stage(4); }), ErrorKind::BudgetExceeded);
}

TEST(BuildStage, HeightsMatchHandRecurrence) {
  // h_{n+1} = 2 h_n + 2 h_n for the doubling-with-spacers rule.
  Tower t(ConstructionSpec::named(Family::HajianKakutani));
  oracle::Int h = 1;
  for (int n = 0; n < 10; ++n, h *= 4) EXPECT_EQ(t.height(n), BigInt(std::to_string(h)));
}

TEST(SpacersFromHeightsets, Steep5) {
  std::vector<std::vector<BigInt>> hs{big({0, 1}), big({0, 5, 25})};
  const auto table = spacers_from_heightsets(hs, big({5, 125}));
  ASSERT_EQ(table.size(), 2u);
  EXPECT_EQ(table[0], big({0, 3}));
  EXPECT_EQ(table[1], big({0, 15, 95}));
}

TEST(SpacersFromHeightsets, HajianKakutani) {
  std::vector<std::vector<BigInt>> hs;
  std::vector<BigInt> next;
  for (int n = 0; n < 5; ++n) {
    hs.push_back({BigInt(0), pow_big(4, n)});
    next.push_back(pow_big(4, n + 1));
  }
  const auto table = spacers_from_heightsets(hs, next);
  for (int n = 0; n < 5; ++n) EXPECT_EQ(table[n], (std::vector<BigInt>{0, 2 * pow_big(4, n)}));
}

TEST(SpacersFromHeightsets, Infeasible) {
  std::vector<std::vector<BigInt>> hs{big({0, 1}), big({0, 3})};
  EXPECT_EQ(kind_of([&] { spacers_from_heightsets(hs, big({5, 100})); }), ErrorKind::Infeasible);
}

TEST(SpacersFromHeightsets, RoundTripRandomExplicit) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int64_t> cuts;
    std::vector<std::vector<BigInt>> spacers;
    const int stages = 1 + static_cast<int>(rng() % 5);
    for (int n = 0; n < stages; ++n) {
      cuts.push_back(2 + static_cast<std::int64_t>(rng() % 3));
      std::vector<BigInt> row;
      for (int k = 0; k < cuts.back(); ++k) row.emplace_back(static_cast<long>(rng() % 4));
      spacers.push_back(row);
    }
    Tower t(ConstructionSpec::explicit_table(cuts, spacers));
    std::vector<std::vector<BigInt>> hs;
    std::vector<BigInt> next;
    for (int n = 0; n < stages; ++n) {
      hs.push_back(t.stage(n).height_set);
      // h_{stages} is one past the table, so rebuild it from the last row.
      BigInt h = 0;
      for (const auto& s : t.stage(n).spacers) h += t.height(n) + s;
      next.push_back(h);
    }
    EXPECT_EQ(spacers_from_heightsets(hs, next), spacers);
  }
}

TEST(Invariants, WidthsAndGrowth) {
  for (auto fam : {Family::HajianKakutani, Family::Ztmr, Family::Steep5}) {
    Tower t(ConstructionSpec::named(fam));
    BigInt prod = 1;
    for (int n = 0; n < 8; ++n) {
      const auto& st = t.stage(n);
      EXPECT_EQ(st.width, Rational(1) / Rational(prod));
      EXPECT_EQ(static_cast<std::int64_t>(st.height_set.size()), st.cuts);
      EXPECT_TRUE(std::is_sorted(st.height_set.begin(), st.height_set.end()));
      EXPECT_GT(t.height(n + 1), st.cuts * st.height);
      EXPECT_EQ(t.max_descendant(n + 1), st.max_descendant + st.height_set.back());
      prod *= static_cast<long>(st.cuts);
    }
  }
}

TEST(Normality, Evidence) {
  Tower hk(ConstructionSpec::named(Family::HajianKakutani));
  EXPECT_EQ(is_normal_upto(hk, 5).witnesses, (std::vector<int>{0, 1, 2, 3, 4}));
  Tower s5(ConstructionSpec::named(Family::Steep5));
  EXPECT_EQ(is_normal_upto(s5, 2).witnesses, (std::vector<int>{0, 1}));
  auto flat = ConstructionSpec::explicit_table({2, 3}, {big({0, 0}), big({0, 0, 0})});
  Tower f(flat);
  EXPECT_TRUE(is_normal_upto(f, 2).witnesses.empty());
}

TEST(Steepness, Verdicts) {
  Tower s5(ConstructionSpec::named(Family::Steep5));
  EXPECT_TRUE(is_steep_upto(s5, 4).pass);
  Tower hk(ConstructionSpec::named(Family::HajianKakutani));
  const auto v = is_steep_upto(hk, 3);
  EXPECT_FALSE(v.pass);
  ASSERT_TRUE(v.violation);
  EXPECT_EQ(v.violation->first, 1);
  EXPECT_EQ(v.violation->second, 4);
  EXPECT_TRUE(is_steep_upto(hk, 1).pass);
}

TEST(LevelSets, RefineMatchesOracle) {
  Tower t(ConstructionSpec::named(Family::Steep5));
  const auto refined = LevelSet::level(1, 2).refine(t, 3);
  const auto expect = oracle::sumset({{0, 5, 25}, {0, 125, 625, 3125}}, 2);
  std::vector<BigInt> want;
  for (auto x : expect) want.emplace_back(static_cast<long>(x));
  EXPECT_EQ(refined.heights, want);
  EXPECT_EQ(refined.measure(t), Rational(1, 2));  // 12 levels of width 1/24
  EXPECT_EQ(refined.measure(t), LevelSet::level(1, 2).measure(t));
}

TEST(SpecIo, RoundTripAndErrors) {
  const auto spec = spec_from_json(nlohmann::json::parse(
      R"({"kind":"explicit","cuts":[2,3],"spacers":[["0","2"],[0,1,"12345678901234567890"]],"base_width":"2/3"})"));
  EXPECT_EQ(spec.cuts, (std::vector<std::int64_t>{2, 3}));
  EXPECT_EQ(spec.spacers[1][2], BigInt("12345678901234567890"));
  EXPECT_EQ(spec.base_width, Rational(2, 3));
  const auto again = spec_from_json(spec_to_json(spec));
  EXPECT_EQ(again.id(), spec.id());
  EXPECT_EQ(again.base_width, spec.base_width);

  const auto fam = spec_from_json(nlohmann::json::parse(R"({"kind":"family","family":"ztmr","params":{}})"));
  EXPECT_EQ(fam.family, Family::Ztmr);

  EXPECT_EQ(kind_of([] { spec_from_json(nlohmann::json::parse(R"({"kind":"explicit","cuts":[1],"spacers":[[0]]})")); }),
            ErrorKind::InvalidSpec);
  EXPECT_EQ(kind_of([] { spec_from_json(nlohmann::json::parse(R"({"kind":"family","family":"nope"})")); }),
            ErrorKind::InvalidSpec);
  EXPECT_EQ(kind_of([] { spec_from_json(nlohmann::json::parse(R"({"kind":"family","family":"ztmr","x":1})")); }),
            ErrorKind::InvalidSpec);
}
