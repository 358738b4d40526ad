#include "rankone/correlation.hpp"
#include "rankone/diagnostics.hpp"
#include "rankone/error.hpp"
#include "rankone/orbit.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace rankone;

namespace {

// Column C_n written out level by level: true where the level belongs to I = C_0.
std::vector<bool> column(const Tower& t, int n) {
  std::vector<bool> col(static_cast<std::size_t>(t.height(0).get_si()), false);
  col[0] = true;
  for (int i = 0; i < n; ++i) {
    std::vector<bool> next;
    for (const auto& s : t.stage(i).spacers) {
      next.insert(next.end(), col.begin(), col.end());
      next.insert(next.end(), static_cast<std::size_t>(s.get_si()), false);
    }
    col = std::move(next);
  }
  return col;
}

// Position in C_n of an address carrying digits for stages p.stage .. n-1, from spacer counts only.
long position(const Tower& t, const PointAddress& p, int n) {
  long pos = p.height.get_si();
  for (int i = p.stage; i < n; ++i) {
    const auto d = p.digits[static_cast<std::size_t>(i - p.stage)];
    for (std::int64_t e = 0; e < d; ++e) pos += t.height(i).get_si() + t.stage(i).spacers[e].get_si();
  }
  return pos;
}

PointAddress random_point(const Tower& t, std::mt19937_64& rng, int m, int n) {
  PointAddress p;
  p.stage = m;
  p.height = std::uniform_int_distribution<long>(0, t.height(m).get_si() - 1)(rng);
  for (int i = m; i < n; ++i) p.digits.push_back(std::uniform_int_distribution<std::int64_t>(0, t.stage(i).cuts - 1)(rng));
  return p;
}

const Family kFamilies[] = {Family::HajianKakutani, Family::Steep5, Family::Ztmr};

}  // namespace

TEST(ApplyT, HajianKakutaniExamples) {
  Tower hk(ConstructionSpec::named(Family::HajianKakutani));
  EXPECT_EQ(std::get<PointAddress>(apply_T(hk, {1, 0, {}}, 1)), (PointAddress{1, 1, {}}));
  EXPECT_EQ(std::get<PointAddress>(apply_T(hk, {1, 3, {0}}, 1)), (PointAddress{2, 4, {}}));
  EXPECT_EQ(std::get<NeedsDigits>(apply_T(hk, {1, 3, {}}, 1)), NeedsDigits{1});
  EXPECT_EQ(std::get<NeedsDigits>(apply_T(hk, {1, 0, {}}, -1)), NeedsDigits{1});
  // Height 4 of C_2 is in D(I, 2) = {0, 1, 4, 5}.
  EXPECT_TRUE(contains(hk, LevelSet::base(0), {2, 4, {}}));
  EXPECT_FALSE(contains(hk, LevelSet::base(0), {2, 3, {}}));
}

TEST(ApplyT, MatchesWrittenOutColumn) {
  std::mt19937_64 rng(7);
  for (auto fam : kFamilies) {
    Tower t(ConstructionSpec::named(fam));
    const int n = fam == Family::HajianKakutani ? 7 : 3;
    const auto col = column(t, n);
    ASSERT_EQ(col.size(), static_cast<std::size_t>(t.height(n).get_si()));
    for (int trial = 0; trial < 300; ++trial) {
      const int m = std::uniform_int_distribution<int>(0, n - 1)(rng);
      const auto p = random_point(t, rng, m, n);
      const long from = position(t, p, n);
      const long steps = std::uniform_int_distribution<long>(-from, static_cast<long>(col.size()) - 1 - from)(rng);
      const auto got = apply_T(t, p, steps);
      ASSERT_TRUE(std::holds_alternative<PointAddress>(got));
      const auto& q = std::get<PointAddress>(got);
      ASSERT_LE(q.stage, n);
      EXPECT_EQ(position(t, q, n), from + steps) << to_string(fam);
      EXPECT_EQ(contains(t, LevelSet::base(0), std::get<PointAddress>(lift(t, q, n))),
                col[static_cast<std::size_t>(from + steps)]);
      // Invertible once both ends are resolved.
      const auto back = std::get<PointAddress>(apply_T(t, q, -steps));
      EXPECT_EQ(std::get<PointAddress>(lift(t, back, q.stage)), std::get<PointAddress>(lift(t, p, q.stage)));
    }
  }
}

TEST(ApplyT, LiftAddsCopyOffsets) {
  Tower s5(ConstructionSpec::named(Family::Steep5));
  const PointAddress p{1, 2, {1, 0}};
  const auto q = std::get<PointAddress>(lift(s5, p, 2));
  EXPECT_EQ(q.height, 2 + s5.stage(1).height_set[1]);
  EXPECT_EQ(q.digits, std::vector<std::int64_t>{0});
  EXPECT_EQ(std::get<NeedsDigits>(lift(s5, p, 5)), NeedsDigits{2});
  EXPECT_THROW((PointAddress{1, s5.height(1), {}}.validate(s5)), Error);
  EXPECT_THROW((PointAddress{1, 0, {7}}.validate(s5)), Error);
}

TEST(Orbit, SweepVisitsEveryLevelOnce) {
  for (auto fam : kFamilies) {
    Tower t(ConstructionSpec::named(fam));
    const long h = t.height(2).get_si();
    const auto path = trajectory(t, {2, 0, {}}, h - 1);
    ASSERT_EQ(path.size(), static_cast<std::size_t>(h));
    for (long k = 0; k < h; ++k) {
      EXPECT_EQ(path[k].stage, 2);
      EXPECT_EQ(path[k].height, k);
    }
  }
}

TEST(VisitCount, AgainstWrittenOutColumn) {
  Tower hk(ConstructionSpec::named(Family::HajianKakutani));
  const auto col = column(hk, 3);
  long want = 0;
  for (int k = 0; k <= 21; ++k) want += col[k];
  const auto got = visit_count(hk, {0, 0, {0, 0, 0}}, LevelSet::base(0), 0, 21);
  EXPECT_EQ(std::get<std::int64_t>(got), want);
  EXPECT_EQ(std::get<std::int64_t>(visit_count(hk, {0, 0, {}}, LevelSet::base(0), 0, 0)), 1);
  EXPECT_TRUE(std::holds_alternative<NeedsDigits>(visit_count(hk, {0, 0, {0}}, LevelSet::base(0), 0, 1000)));
}

TEST(VisitCount, BoundedByBreProfile) {
  Tower hk(ConstructionSpec::named(Family::HajianKakutani));
  const int m = 4;
  for (std::int64_t n : {2, 6, 22}) {
    const auto sup = bre_sup_profile(hk, n, m).sup;
    const auto an = partial_sum(hk, LevelSet::base(0), n).value.lower;
    for (long y = 0; y + n <= hk.height(m).get_si(); ++y) {
      const auto c = std::get<std::int64_t>(visit_count(hk, {m, y, {}}, LevelSet::base(0), 0, n - 1));
      EXPECT_LE(Rational(c) / an, sup.upper) << n << " " << y;
    }
  }
}

TEST(Coverage, CountsWithinLemmaBounds) {
  for (auto fam : kFamilies) {
    Tower t(ConstructionSpec::named(fam));
    for (int m = 0; m <= 4 && t.max_descendant(m) <= 5000; ++m)
      for (auto pol : {DigitPolicy::Zeros, DigitPolicy::Max, DigitPolicy::Random}) {
        const auto rep = std::get<CoverageReport>(coverage_counts(t, m, pol, 11));
        EXPECT_GE(rep.min, rep.descendants) << to_string(fam) << " m=" << m << " " << to_string(pol);
        EXPECT_LE(rep.max, 2 * rep.descendants) << to_string(fam) << " m=" << m << " " << to_string(pol);
        if (m == 0) {
          EXPECT_EQ(rep.min, 1);
          EXPECT_EQ(rep.max, 1);
        }
      }
  }
}

TEST(Coverage, HajianKakutaniStageOneAgainstColumn) {
  Tower hk(ConstructionSpec::named(Family::HajianKakutani));
  const auto rep = std::get<CoverageReport>(coverage_counts(hk, 1, DigitPolicy::Zeros));
  // Zero digits place C_1 at the bottom of C_4; the written-out column gives the counts directly.
  const auto col = column(hk, 4);
  std::map<std::int64_t, std::int64_t> want;
  for (long y : {0L, 1L}) {
    std::int64_t c = 0;
    for (long k = -1; k <= 1; ++k) c += (y + k >= 0) && col[static_cast<std::size_t>(y + k)];
    ++want[c];
  }
  EXPECT_EQ(rep.histogram, want);
  std::ostringstream csv;
  write_histogram_csv(csv, rep);
  EXPECT_EQ(csv.str().substr(0, 16), "count,frequency\n");
}

TEST(Coverage, SeedIsDeterministic) {
  Tower s5(ConstructionSpec::named(Family::Steep5));
  const auto a = std::get<CoverageReport>(coverage_counts(s5, 3, DigitPolicy::Random, 5));
  const auto b = std::get<CoverageReport>(coverage_counts(s5, 3, DigitPolicy::Random, 5));
  EXPECT_EQ(a.histogram, b.histogram);
  EXPECT_EQ(parse_digit_policy("max"), DigitPolicy::Max);
  EXPECT_THROW(parse_digit_policy("all"), Error);
}
