#include "rankone/orbit.hpp"

#include "rankone/error.hpp"

#include <algorithm>
#include <ostream>
#include <limits>
#include <random>

namespace rankone {

void PointAddress::validate(const Tower& tower) const {
  if (stage < 0) throw Error(ErrorKind::InvalidArgument, "stage must be nonnegative");
  if (height < 0 || height >= tower.height(stage)) {
    throw Error(ErrorKind::InvalidArgument, "height " + height.get_str() + " outside C_" + std::to_string(stage));
  }
  for (std::size_t i = 0; i < digits.size(); ++i) {
    const int s = stage + static_cast<int>(i);
    if (digits[i] < 0 || digits[i] >= tower.stage(s).cuts) {
      throw Error(ErrorKind::InvalidArgument,
                  "digit " + std::to_string(digits[i]) + " out of range for r_" + std::to_string(s));
    }
  }
}

std::ostream& operator<<(std::ostream& os, const PointAddress& p) {
  os << "(m=" << p.stage << ", h=" << p.height << ", digits=[";
  for (std::size_t i = 0; i < p.digits.size(); ++i) os << (i ? "," : "") << p.digits[i];
  return os << "])";
}

namespace {

// Lower bound on the digits needed to move `distance` levels from C_s.
int digits_needed(const Tower& tower, int s, const BigInt& distance) {
  int e = 1;
  while (e < 64 && s + e <= tower.last_stage() && tower.height(s + e) <= distance) ++e;
  return e;
}

void climb(const Tower& tower, PointAddress& p, BigInt& target) {
  const auto& offsets = tower.stage(p.stage).height_set;
  const BigInt& off = offsets[static_cast<std::size_t>(p.digits.front())];
  p.height += off;
  target += off;
  p.digits.erase(p.digits.begin());
  ++p.stage;
}

}  // namespace

OrbitStep lift(const Tower& tower, const PointAddress& p, int to) {
  if (to < p.stage) throw Error(ErrorKind::InvalidArgument, "cannot lift to a lower stage");
  const auto have = static_cast<int>(p.digits.size());
  if (to - p.stage > have) return NeedsDigits{to - p.stage - have};
  PointAddress q = p;
  BigInt unused = 0;
  while (q.stage < to) climb(tower, q, unused);
  return q;
}

OrbitStep apply_T(const Tower& tower, const PointAddress& p, const BigInt& steps) {
  PointAddress q = p;
  BigInt target = q.height + steps;
  while (target < 0 || target >= tower.height(q.stage)) {
    if (q.digits.empty()) {
      return NeedsDigits{digits_needed(tower, q.stage, BigInt(abs(target - q.height)))};
    }
    climb(tower, q, target);
  }
  q.height = target;
  return q;
}

bool contains(const Tower& tower, const LevelSet& target, const PointAddress& p) {
  if (target.column > p.stage) {
    throw Error(ErrorKind::InvalidArgument, "target column " + std::to_string(target.column) +
                                                " is above the point's stage " + std::to_string(p.stage));
  }
  BigInt y = p.height;
  for (int i = p.stage - 1; i >= target.column; --i) {
    const auto& h = tower.stage(i).height_set;
    const auto it = std::upper_bound(h.begin(), h.end(), y) - 1;
    y -= *it;
    if (y >= tower.height(i)) return false;  // a spacer level
  }
  return std::binary_search(target.heights.begin(), target.heights.end(), y);
}

std::variant<std::int64_t, NeedsDigits> visit_count(const Tower& tower, const PointAddress& p,
                                                    const LevelSet& target, std::int64_t k_lo, std::int64_t k_hi) {
  if (k_lo > k_hi) return std::int64_t{0};
  PointAddress q = p;
  if (target.column > q.stage) {
    auto up = lift(tower, q, target.column);
    if (auto* need = std::get_if<NeedsDigits>(&up)) return *need;
    q = std::get<PointAddress>(up);
  }
  auto start = apply_T(tower, q, BigInt(static_cast<long>(k_lo)));
  if (auto* need = std::get_if<NeedsDigits>(&start)) return *need;
  q = std::get<PointAddress>(start);
  std::int64_t count = 0;
  for (std::int64_t k = k_lo;; ++k) {
    if (contains(tower, target, q)) ++count;
    if (k == k_hi) break;
    auto next = apply_T(tower, q, 1);
    if (auto* need = std::get_if<NeedsDigits>(&next)) return *need;
    q = std::get<PointAddress>(next);
  }
  return count;
}

std::vector<TrajectoryPoint> trajectory(const Tower& tower, const PointAddress& p, std::int64_t steps) {
  std::vector<TrajectoryPoint> out;
  PointAddress q = p;
  for (std::int64_t k = 0; k <= steps; ++k) {
    out.push_back({k, q.stage, q.height});
    if (k == steps) break;
    auto next = apply_T(tower, q, 1);
    if (std::holds_alternative<NeedsDigits>(next)) break;
    q = std::get<PointAddress>(next);
  }
  return out;
}

DigitPolicy parse_digit_policy(const std::string& name) {
  if (name == "zeros") return DigitPolicy::Zeros;
  if (name == "max") return DigitPolicy::Max;
  if (name == "random") return DigitPolicy::Random;
  throw Error(ErrorKind::InvalidArgument, "unknown digit policy '" + name + "'");
}

const char* to_string(DigitPolicy policy) {
  switch (policy) {
    case DigitPolicy::Zeros: return "zeros";
    case DigitPolicy::Max: return "max";
    case DigitPolicy::Random: return "random";
  }
  return "unknown";
}

std::variant<CoverageReport, NeedsDigits> coverage_counts(const Tower& tower, int m, DigitPolicy policy,
                                                          std::uint64_t seed, int extra, int max_digits) {
  if (m < 0 || extra < 0 || max_digits < extra) throw Error(ErrorKind::InvalidArgument, "bad coverage parameters");
  std::mt19937_64 rng(seed);
  // Digits past `extra` alternate away from the extreme copies, so the point is
  // neither the bottom nor the top of every column (those orbits never resolve).
  auto digit = [&](int s) -> std::int64_t {
    const std::int64_t r = tower.stage(s).cuts;
    if (s - m >= extra && policy != DigitPolicy::Random) {
      const bool low = ((s - m - extra) % 2 == 0) == (policy == DigitPolicy::Max);
      return low ? 0 : r - 1;
    }
    switch (policy) {
      case DigitPolicy::Zeros: return 0;
      case DigitPolicy::Max: return r - 1;
      case DigitPolicy::Random: return std::uniform_int_distribution<std::int64_t>(0, r - 1)(rng);
    }
    return 0;
  };
  const LevelSet base = LevelSet::base(0);
  const auto reach = static_cast<std::int64_t>(tower.max_descendant(m).get_si());
  const auto d = tower.relative_sumset(0, m).to_vector();
  CoverageReport out;
  out.stage = m;
  out.descendants = static_cast<std::int64_t>(d.size());
  out.min = std::numeric_limits<std::int64_t>::max();
  for (const auto& y : d) {
    PointAddress x{m, y, {}};
    for (int i = 0; i < extra; ++i) x.digits.push_back(digit(m + i));
    while (true) {
      const auto c = visit_count(tower, x, base, -reach, reach);
      if (const auto* n = std::get_if<std::int64_t>(&c)) {
        out.min = std::min(out.min, *n);
        out.max = std::max(out.max, *n);
        ++out.histogram[*n];
        out.digits_used = std::max(out.digits_used, static_cast<int>(x.digits.size()));
        break;
      }
      const int more = std::get<NeedsDigits>(c).stages;
      const auto have = static_cast<int>(x.digits.size());
      const int cap = std::min(max_digits, tower.last_stage() - m);
      if (have + more > cap) return NeedsDigits{have + more - cap};
      for (int i = 0; i < more; ++i) x.digits.push_back(digit(m + have + i));
    }
  }
  if (d.empty()) out.min = 0;
  return out;
}

void write_histogram_csv(std::ostream& os, const CoverageReport& report) {
  os << "count,frequency\n";
  for (const auto& [c, f] : report.histogram) os << c << ',' << f << '\n';
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& points) {
  os << "k,stage,height\n";
  for (const auto& p : points) os << p.k << ',' << p.stage << ',' << p.height << '\n';
}

}  // namespace rankone
