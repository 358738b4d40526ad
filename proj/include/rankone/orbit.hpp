#pragma once

#include "rankone/tower.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <variant>
#include <vector>

namespace rankone {

/// A point given by its level in C_stage and the copy of C_i it sits in for
/// i = stage, stage + 1, ... (digits[0] is the copy of C_stage inside C_{stage+1}).
struct PointAddress {
  int stage = 0;
  BigInt height;
  std::vector<std::int64_t> digits;

  /// Throws InvalidArgument unless height < h_stage and every digit is below its cut count.
  void validate(const Tower& tower) const;
  bool operator==(const PointAddress&) const = default;
};

std::ostream& operator<<(std::ostream& os, const PointAddress& p);

/// The orbit left the resolved part of the tower; `stages` more digits are needed at least.
struct NeedsDigits {
  int stages = 1;
  bool operator==(const NeedsDigits&) const = default;
};

using OrbitStep = std::variant<PointAddress, NeedsDigits>;

/// Re-expresses p at stage `to` (>= p.stage) by consuming digits; NeedsDigits if too few.
OrbitStep lift(const Tower& tower, const PointAddress& p, int to);

/// T^steps p. Digits are consumed only as far as the orbit climbs.
OrbitStep apply_T(const Tower& tower, const PointAddress& p, const BigInt& steps);

/// Whether the level of p lies in `target` (a set of levels of C_j with j <= p.stage).
bool contains(const Tower& tower, const LevelSet& target, const PointAddress& p);

/// Σ_{k_lo <= k <= k_hi} 1_target(T^k p), or NeedsDigits.
std::variant<std::int64_t, NeedsDigits> visit_count(const Tower& tower, const PointAddress& p, const LevelSet& target,
                                                    std::int64_t k_lo, std::int64_t k_hi);

struct TrajectoryPoint {
  std::int64_t k = 0;
  int stage = 0;
  BigInt height;
};

/// T^k p for k = 0..steps, stopping early when digits run out.
std::vector<TrajectoryPoint> trajectory(const Tower& tower, const PointAddress& p, std::int64_t steps);

enum class DigitPolicy { Zeros, Max, Random };
DigitPolicy parse_digit_policy(const std::string& name);
const char* to_string(DigitPolicy policy);

struct CoverageReport {
  int stage = 0;
  std::int64_t descendants = 0;  // |D(I, m)|
  std::int64_t min = 0, max = 0;
  std::map<std::int64_t, std::int64_t> histogram;  // count -> number of sampled points
  int digits_used = 0;                             // most digits any sample needed
};

/// For one point in each level of D(I, m), counts k in [-M_m, M_m] with T^k x in I.
/// Points get `extra` digits from the policy and more on demand, up to `max_digits`.
std::variant<CoverageReport, NeedsDigits> coverage_counts(const Tower& tower, int m, DigitPolicy policy, std::uint64_t seed = 0,
                               int extra = 3, int max_digits = 64);

void write_histogram_csv(std::ostream& os, const CoverageReport& report);
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& points);

}  // namespace rankone
