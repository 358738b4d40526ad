#pragma once

#include "rankone/sumset.hpp"
#include "rankone/tower.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace rankone {

/// 10^-9.
Rational default_tolerance();

/// A certified enclosure together with the stage it was read off.
/// exact is set when no level involved can leave column C_stage.
struct Measurement {
  RationalInterval value;
  int stage = 0;
  bool exact = false;
};

/// Correlation engine bound to one tower; caches shift counters per stage range.
/// Not thread-safe: use one per thread.
class Correlator {
 public:
  explicit Correlator(const Tower& tower) : tower_(tower) {}

  const Tower& tower() const { return tower_; }

  /// μ(A ∩ T^k B) for level sets of one column. Refines the stage until the
  /// value is exact or narrower than tol.
  Measurement pair(const LevelSet& a, const LevelSet& b, const BigInt& k, const Rational& tol);

  /// μ(A ∩ T^{s_1} A ∩ ... ∩ T^{s_p} A), shifts nonnegative and sorted.
  Measurement multi(const LevelSet& a, std::span<const BigInt> shifts, const Rational& tol);

  const ShiftCounter& counter(int first_stage, int n);

 private:
  const Tower& tower_;
  std::map<std::pair<int, int>, std::unique_ptr<ShiftCounter>> counters_;
};

Measurement corr_pair(const Tower& tower, const LevelSet& a, const LevelSet& b, const BigInt& k,
                      const Rational& tol = default_tolerance());
Measurement multi_corr(const Tower& tower, const LevelSet& a, std::span<const BigInt> shifts,
                       const Rational& tol = default_tolerance());

/// Levels of C_m making up a, as int64 heights. Throws BudgetExceeded past the
/// element budget or when heights leave the int64 range.
std::vector<std::int64_t> levels_at(const Tower& tower, const LevelSet& a, int m);

/// Smallest m >= column with max D(B, m) + reach < h_m, or -1 if none within the stage budget.
int settled_stage(const Tower& tower, const LevelSet& b, const BigInt& reach);

/// Σ_{k<n} μ(A ∩ T^k B), counted over pairs of levels in one stage.
Measurement window_sum(const Tower& tower, const LevelSet& a, const LevelSet& b, const BigInt& n);

/// a_n(F) = Σ_{k<n} u_k(F).
Measurement partial_sum(const Tower& tower, const LevelSet& f, const BigInt& n);

struct SeriesTerm {
  std::int64_t k = 0;
  RationalInterval u;       // u_k(F)
  RationalInterval prefix;  // a_{k+1}(F)
};

/// u_k(F) for k < n; only terms that may be nonzero are stored.
struct CorrelationSeries {
  LevelSet reference;
  std::int64_t length = 0;
  int stage = 0;
  bool exact = false;
  std::vector<SeriesTerm> terms;
  std::vector<std::int64_t> kappa_marks;  // κ(m) = M_m + 1 that are <= length

  RationalInterval u(std::int64_t k) const;
  /// a_{n'}(F) for n' <= length.
  RationalInterval a(std::int64_t n) const;
};

CorrelationSeries weights_and_sums(const Tower& tower, const LevelSet& f, std::int64_t n,
                                   const Rational& tol = default_tolerance());

/// κ(m) = M_m + 1.
BigInt kappa(const Tower& tower, int m);

struct ErgodicIntegrals {
  RationalInterval first;   // ∫_I S_n(1_I)
  RationalInterval second;  // ∫_I S_n(1_I)^2
  int stage = 0;
};

/// Per-level return counts c(y) = #{k < n : y + k in D(F, m)} for y in D(F, m).
/// Counts for levels whose orbit segment leaves C_m are lower bounds; those
/// levels are flagged in open.
struct LevelCounts {
  int stage = 0;
  std::vector<std::int64_t> levels;
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> open;  // extra visits still possible above h_m
};

LevelCounts level_counts(const Tower& tower, const LevelSet& f, std::int64_t n, int m);

ErgodicIntegrals ergodic_sum_integrals(const Tower& tower, std::int64_t n);

/// CSV with columns k,u_lower,u_upper,a_lower,a_upper,is_kappa_mark for k < length.
void write_series_csv(std::ostream& out, const CorrelationSeries& series);

}  // namespace rankone
