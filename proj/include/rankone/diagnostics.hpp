#pragma once

#include "rankone/correlation.hpp"
#include "rankone/sumset.hpp"
#include "rankone/tower.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rankone {

/// One grid cell of a diagnostic: the value at n (or k) and the stage it was read at.
struct ReportRow {
  BigInt n;
  RationalInterval value;
  int stage = 0;
};

struct DiagnosticsReport {
  std::string spec_id;
  std::string kind;
  std::vector<ReportRow> rows;
  std::vector<BigInt> kappa_marks;
  std::string verdict;        // short human-readable summary
  RationalInterval summary;   // the quantity the verdict is about
};

struct WreValue {
  RationalInterval ratio;  // (1/a_n(I)) Σ_{k<n} μ(A ∩ T^k B)
  Rational target;         // μ(A) μ(B)
  int stage = 0;
};

/// Throws CommonColumnRequired when A and B lie in different columns.
WreValue wre_ratio(const Tower& tower, const LevelSet& a, const LevelSet& b, const BigInt& n);

/// wre_ratio at n = κ(1), ..., κ(m_max). The summary is the largest |ratio - μ(A)μ(B)|
/// (upper bound) over the last two marks.
DiagnosticsReport wre_curve_kappa(const Tower& tower, const LevelSet& a, const LevelSet& b, int m_max);

/// (1/a_n(I)) Σ_{k<n} |μ(A ∩ T^k B) - μ(A) μ(B) u_k(I)|.
RationalInterval rwm_deviation(const Tower& tower, const LevelSet& a, const LevelSet& b, std::int64_t n,
                               const Rational& tol = default_tolerance());

struct RatioEntry {
  BigInt k;
  Rational ratio;  // μ(J ∩ T^k J) / μ(I ∩ T^k I)
};

/// For J the base of C_j and every 0 <= k <= M_{m_max} with μ(J ∩ T^k J) > 0.
/// Throws UniquenessRequired unless representations are certified unique up to m_max.
std::vector<RatioEntry> ratio_constancy(const Tower& tower, int j, int m_max);

/// ∫_I S_n^2 / (∫_I S_n)^2.
RationalInterval renyi_ratio(const Tower& tower, std::int64_t n);

struct BreLevel {
  std::int64_t level = 0;  // height of J in C_m
  RationalInterval value;  // (1/a_n(I)) S_n(1_I) on J
};

struct BreProfile {
  RationalInterval sup;
  std::int64_t argmax = 0;
  std::vector<BreLevel> levels;  // eligible levels with a nonzero value
};

/// Sup of (1/a_n(I)) S_n(1_I) over levels J of C_m with h(J) <= h_m - n.
/// Throws StageTooSmall when h_m < n + 1.
BreProfile bre_sup_profile(const Tower& tower, std::int64_t n, int m);

struct ZeroTypeWindow {
  int n = 0;
  BigInt lo, hi;  // window [lo, hi) = [M_n, M_{n+1}), with k = 0 left out
  RationalInterval max;
  std::optional<BigInt> argmax;
  int stage = 0;
};

/// Windows n in [m_lo, m_hi): the largest μ(I ∩ T^k I) over k in the window.
std::vector<ZeroTypeWindow> zerotype_scan(const Tower& tower, int m_lo, int m_hi);

struct RecurrenceWitness {
  BigInt n;
  Measurement bound;  // μ(A ∩ T^n A ∩ ... ∩ T^{kn} A)
  std::string source; // "height", "progression" or "support"
};

/// Tries candidate n in order (stage heights, progressions inside some H_j,
/// then the support of u) and returns the first with a positive certified
/// lower bound. nullopt means no witness among `budget` candidates.
std::optional<RecurrenceWitness> recurrence_witness(const Tower& tower, const LevelSet& a, int k,
                                                    std::uint64_t budget = 10000);

struct NonRecurrenceVerdict {
  bool certified = false;
  BigInt bound;                      // K
  std::optional<BigInt> candidate;   // smallest n <= K with n, 2n, ..., kn all in the support
  int digit_stage = 0;               // stage used by the digit (decomposition) scan
  int brute_stage = 0;               // stage used by the materialized scan
};

/// Checks that no 1 <= n <= K has n, 2n, ..., kn all in the support of u(I),
/// once by shift decomposition and once on a materialized descendant set; the
/// two scans must agree.
NonRecurrenceVerdict non_recurrence_certificate(const Tower& tower, int k, std::int64_t bound);

enum class SeqMode { SmallSetRatio, StrongCesaro, Asymptotic, Smooth };
SeqMode parse_seq_mode(const std::string& name);
const char* to_string(SeqMode mode);

/// u and v hold terms 0, 1, ...; `index_set` is K for small_set_ratio,
/// `level` is L for strong_cesaro (with v as the sequence x). Smooth reads u_n.
/// Throws IndexOutOfRange when a series is too short.
RationalInterval seq_functionals(const std::vector<RationalInterval>& u, const std::vector<RationalInterval>& v,
                                 const Rational& level, const std::vector<std::int64_t>& index_set, std::int64_t n,
                                 SeqMode mode);

}  // namespace rankone
