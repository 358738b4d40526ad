#include "rankone/sumset.hpp"

#include "rankone/error.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>

namespace rankone {

namespace {

template <class T>
std::uint64_t count_pairs(const std::vector<T>& d, const T& k) {
  std::uint64_t count = 0;
  std::size_t j = 0;
  for (const auto& x : d) {
    const T target = x - k;
    while (j < d.size() && d[j] < target) ++j;
    if (j == d.size()) break;
    if (d[j] == target) ++count;
  }
  return count;
}

template <class T>
std::uint64_t count_multi(const std::vector<T>& d, const std::vector<T>& shifts) {
  std::vector<std::size_t> ptr(shifts.size(), 0);
  std::uint64_t count = 0;
  for (const auto& x : d) {
    bool all = true;
    for (std::size_t s = 0; s < shifts.size(); ++s) {
      const T target = x - shifts[s];
      auto& j = ptr[s];
      while (j < d.size() && d[j] < target) ++j;
      if (j == d.size() || d[j] != target) {
        all = false;
        break;
      }
    }
    if (all) ++count;
  }
  return count;
}

BigInt big(std::uint64_t v) { return BigInt(static_cast<unsigned long>(v)); }

// Differences of elements below 2^61 stay below 2^62 in magnitude.
constexpr std::int64_t kShiftLimit = std::int64_t{1} << 62;

}  // namespace

DescendantSet descendant_set(const Tower& tower, const LevelSet& level, int n) {
  if (level.heights.size() != 1) throw Error(ErrorKind::InvalidArgument, "descendant_set needs a single level");
  level.validate(tower);
  if (n < level.column) throw Error(ErrorKind::InvalidArgument, "target stage below the level's column");
  const HeightList& rel = tower.relative_sumset(level.column, n);
  DescendantSet out{level.column, level.heights.front(), n, {}};
  const BigInt& base = level.heights.front();
  const bool narrow = HeightList::fits_narrow(base + rel.back());
  out.heights = rel.visit([&](const auto& xs) {
    using V = std::decay_t<decltype(xs)>;
    if constexpr (std::is_same_v<V, HeightList::Narrow>) {
      if (narrow) {
        V v = xs;
        for (auto& x : v) x += base.get_si();
        return HeightList(std::move(v));
      }
    }
    HeightList::Wide v;
    v.reserve(xs.size());
    for (const auto& x : xs) v.push_back(base + x);
    return HeightList(std::move(v));
  });
  return out;
}

BigInt intersect_count(const HeightList& d, const BigInt& k) {
  const BigInt mag = abs(k);
  return d.visit([&](const auto& xs) -> BigInt {
    using T = typename std::decay_t<decltype(xs)>::value_type;
    if constexpr (std::is_same_v<T, std::int64_t>) {
      if (mag >= BigInt(static_cast<long>(kShiftLimit))) return 0;
      return big(count_pairs<std::int64_t>(xs, mag.get_si()));
    } else {
      return big(count_pairs<BigInt>(xs, mag));
    }
  });
}

BigInt multi_intersect_count(const HeightList& d, std::span<const BigInt> shifts) {
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    if (shifts[i] < 0 || (i > 0 && shifts[i] < shifts[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "shifts must be nonnegative and sorted");
    }
  }
  return d.visit([&](const auto& xs) -> BigInt {
    using T = typename std::decay_t<decltype(xs)>::value_type;
    if constexpr (std::is_same_v<T, std::int64_t>) {
      std::vector<std::int64_t> s;
      for (const auto& x : shifts) {
        if (x >= BigInt(static_cast<long>(kShiftLimit))) return 0;
        s.push_back(x.get_si());
      }
      return big(count_multi<std::int64_t>(xs, s));
    } else {
      return big(count_multi<BigInt>(xs, std::vector<BigInt>(shifts.begin(), shifts.end())));
    }
  });
}

std::vector<Difference> difference_set(const Tower& tower, int n) {
  const auto& h = tower.stage(n).height_set;
  std::map<BigInt, std::int64_t> counts;
  for (const auto& a : h)
    for (const auto& b : h) ++counts[a - b];
  std::vector<Difference> out;
  out.reserve(counts.size());
  for (auto& [value, m] : counts) out.push_back({value, m});
  return out;
}

BigInt ShiftDecomposition::match_product() const {
  BigInt p = 1;
  for (auto m : matches) p *= static_cast<long>(m);
  return p;
}

namespace {

struct StageDiffs {
  std::vector<Difference> diffs;
  BigInt reach;  // max H_j + ... + max H_{i-1}: largest |sum| of the stages below
};

std::vector<StageDiffs> stage_diffs(const Tower& tower, int j, int n) {
  std::vector<StageDiffs> out;
  BigInt reach = 0;
  for (int i = j; i < n; ++i) {
    out.push_back({difference_set(tower, i), reach});
    reach += tower.stage(i).height_set.back();
  }
  return out;
}

struct Search {
  const std::vector<StageDiffs>& stages;
  std::uint64_t budget;
  std::uint64_t nodes = 0;
  std::vector<std::size_t> pick;

  bool run(int i, const BigInt& rem) {
    if (++nodes > budget) throw Error(ErrorKind::BudgetExceeded, "shift decomposition search exceeded its node budget");
    if (i < 0) return rem == 0;
    const auto& st = stages[static_cast<std::size_t>(i)];
    const BigInt lo = rem - st.reach;
    const BigInt hi = rem + st.reach;
    auto it = std::lower_bound(st.diffs.begin(), st.diffs.end(), lo,
                               [](const Difference& d, const BigInt& v) { return d.value < v; });
    for (; it != st.diffs.end() && it->value <= hi; ++it) {
      pick[static_cast<std::size_t>(i)] = static_cast<std::size_t>(it - st.diffs.begin());
      if (run(i - 1, rem - it->value)) return true;
    }
    return false;
  }
};

}  // namespace

std::optional<ShiftDecomposition> decompose_shift(const Tower& tower, const BigInt& k, int n, int first_stage,
                                                  std::uint64_t node_budget) {
  if (first_stage < 0 || n < first_stage) throw Error(ErrorKind::InvalidArgument, "decompose_shift needs 0 <= j <= N");
  const auto stages = stage_diffs(tower, first_stage, n);
  Search search{stages, node_budget, 0, std::vector<std::size_t>(stages.size(), 0)};
  if (!search.run(static_cast<int>(stages.size()) - 1, k)) return std::nullopt;
  ShiftDecomposition out;
  out.shift = k;
  out.first_stage = first_stage;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& d = stages[i].diffs[search.pick[i]];
    out.digits.push_back(d.value);
    out.matches.push_back(d.matches);
  }
  return out;
}

namespace {

// Product of sizes, or nullopt once it passes budget.
std::optional<std::uint64_t> bounded_product(const std::vector<std::size_t>& sizes, std::uint64_t budget) {
  std::uint64_t p = 1;
  for (auto s : sizes) {
    if (s != 0 && p > budget / s) return std::nullopt;
    p *= s;
  }
  if (p > budget) return std::nullopt;
  return p;
}

}  // namespace

UniquenessVerdict uniqueness_check(const Tower& tower, int n, int first_stage, std::uint64_t budget) {
  std::vector<std::vector<BigInt>> diffs;
  std::vector<std::size_t> sizes;
  for (int i = first_stage; i < n; ++i) {
    std::vector<BigInt> d;
    for (auto& x : difference_set(tower, i)) d.push_back(std::move(x.value));
    sizes.push_back(d.size());
    diffs.push_back(std::move(d));
  }
  if (!bounded_product(sizes, budget)) {
    throw Error(ErrorKind::BudgetExceeded, "uniqueness brute force exceeds the tuple budget");
  }
  // (sum, mixed-radix tuple code), expanded stage by stage.
  std::vector<std::pair<BigInt, std::uint64_t>> sums{{BigInt(0), 0}};
  std::uint64_t radix = 1;
  for (const auto& d : diffs) {
    std::vector<std::pair<BigInt, std::uint64_t>> next;
    next.reserve(sums.size() * d.size());
    for (const auto& [s, code] : sums)
      for (std::size_t t = 0; t < d.size(); ++t) next.emplace_back(s + d[t], code + radix * t);
    radix *= d.size();
    sums = std::move(next);
  }
  std::sort(sums.begin(), sums.end());
  UniquenessVerdict out;
  for (std::size_t i = 0; i + 1 < sums.size(); ++i) {
    if (sums[i].first != sums[i + 1].first) continue;
    auto decode = [&](std::uint64_t code) {
      std::vector<BigInt> t;
      for (const auto& d : diffs) {
        t.push_back(d[code % d.size()]);
        code /= d.size();
      }
      return t;
    };
    out.pass = false;
    out.shift = sums[i].first;
    out.counterexample = std::make_pair(decode(sums[i].second), decode(sums[i + 1].second));
    break;
  }
  return out;
}

bool scale_separated(const Tower& tower, int first_stage, int n) {
  BigInt reach = 0;
  for (int i = first_stage; i < n; ++i) {
    const auto d = difference_set(tower, i);
    for (std::size_t t = 0; t + 1 < d.size(); ++t) {
      if (d[t + 1].value - d[t].value <= 2 * reach) return false;
    }
    reach += tower.stage(i).height_set.back();
  }
  return true;
}

ShiftCounter::ShiftCounter(const Tower& tower, int first_stage, int n) {
  if (first_stage < 0 || n < first_stage) throw Error(ErrorKind::InvalidArgument, "need 0 <= j <= N");
  if (!scale_separated(tower, first_stage, n)) {
    if (tower.product_of_cuts(first_stage, n) > BigInt(static_cast<unsigned long>(tower.element_budget()))) {
      throw Error(ErrorKind::BudgetExceeded,
                  "descendant set too large to materialize and no unique-representation certificate");
    }
    set_ = &tower.relative_sumset(first_stage, n);
    return;
  }
  for (auto& st : stage_diffs(tower, first_stage, n)) {
    diffs_.push_back(std::move(st.diffs));
    reach_.push_back(std::move(st.reach));
  }
  const BigInt total = n == first_stage ? BigInt(0) : BigInt(reach_.back() + diffs_.back().back().value);
  if (!HeightList::fits_narrow(total)) return;
  for (std::size_t i = 0; i < diffs_.size(); ++i) {
    std::vector<std::pair<std::int64_t, std::int64_t>> row;
    for (const auto& d : diffs_[i]) row.emplace_back(d.value.get_si(), d.matches);
    narrow_diffs_.push_back(std::move(row));
    narrow_reach_.push_back(reach_[i].get_si());
  }
}

bool ShiftCounter::search(int i, const BigInt& rem, std::vector<std::int64_t>& matches) const {
  if (i < 0) return rem == 0;
  const auto& row = diffs_[static_cast<std::size_t>(i)];
  const BigInt& reach = reach_[static_cast<std::size_t>(i)];
  const BigInt lo = rem - reach;
  auto it = std::lower_bound(row.begin(), row.end(), lo,
                             [](const Difference& d, const BigInt& v) { return d.value < v; });
  // Under scale separation at most one digit is feasible.
  if (it == row.end() || it->value > rem + reach) return false;
  matches[static_cast<std::size_t>(i)] = it->matches;
  return search(i - 1, rem - it->value, matches);
}

bool ShiftCounter::search_narrow(int i, std::int64_t rem, std::vector<std::int64_t>& matches) const {
  for (; i >= 0; --i) {
    const auto& row = narrow_diffs_[static_cast<std::size_t>(i)];
    const std::int64_t reach = narrow_reach_[static_cast<std::size_t>(i)];
    auto it = std::lower_bound(row.begin(), row.end(), rem - reach,
                               [](const auto& d, std::int64_t v) { return d.first < v; });
    if (it == row.end() || it->first > rem + reach) return false;
    matches[static_cast<std::size_t>(i)] = it->second;
    rem -= it->first;
  }
  return rem == 0;
}

BigInt ShiftCounter::count(const BigInt& t) const {
  if (set_) return intersect_count(*set_, t);
  std::vector<std::int64_t> matches(diffs_.size(), 0);
  const int top = static_cast<int>(diffs_.size()) - 1;
  bool found = false;
  if (!narrow_diffs_.empty() || diffs_.empty()) {
    if (!HeightList::fits_narrow(t)) return 0;
    found = search_narrow(top, t.get_si(), matches);
  } else {
    found = search(top, t, matches);
  }
  if (!found) return 0;
  std::uint64_t p = 1;
  bool overflow = false;
  for (auto m : matches) overflow = overflow || __builtin_mul_overflow(p, static_cast<std::uint64_t>(m), &p);
  if (!overflow) return big(p);
  BigInt q = 1;
  for (auto m : matches) q *= static_cast<long>(m);
  return q;
}

BigInt shift_count(const Tower& tower, int first_stage, int n, const BigInt& t) {
  return ShiftCounter(tower, first_stage, n).count(t);
}

namespace {

BigInt at_least(const Tower& tower, int j, int i, const BigInt& theta) {
  // Elements of H_j (+) ... (+) H_i; the lower stages sum to less than h_i,
  // which is at most any gap of H_i, so only one block can straddle theta.
  if (theta <= 0) return tower.product_of_cuts(j, i + 1);
  if (i < j) return 0;
  const auto& h = tower.stage(i).height_set;
  const BigInt below = tower.product_of_cuts(j, i);
  const BigInt lower_max = tower.max_descendant(i) - tower.max_descendant(j);
  BigInt out = 0;
  for (const auto& e : h) {
    if (e >= theta) out += below;
    else if (e + lower_max >= theta) out += at_least(tower, j, i - 1, theta - e);
  }
  return out;
}

}  // namespace

BigInt count_at_least(const Tower& tower, int first_stage, int n, const BigInt& theta) {
  if (first_stage < 0 || n < first_stage) throw Error(ErrorKind::InvalidArgument, "need 0 <= j <= N");
  return at_least(tower, first_stage, n - 1, theta);
}

const char* to_string(DoubleDifference verdict) {
  switch (verdict) {
    case DoubleDifference::CertifiedAbsent: return "certified_absent";
    case DoubleDifference::Present: return "present";
    case DoubleDifference::AbsentAtStage: return "absent_at_stage";
    case DoubleDifference::Unknown: return "unknown";
  }
  return "unknown";
}

namespace {

// All sums d_j + ... + d_{N-1}, with the product of match counts, by tuple expansion.
std::vector<SupportEntry> tuple_sums(const std::vector<StageDiffs>& stages) {
  std::vector<SupportEntry> sums{{BigInt(0), BigInt(1)}};
  for (const auto& st : stages) {
    std::vector<SupportEntry> next;
    next.reserve(sums.size() * st.diffs.size());
    for (const auto& s : sums)
      for (const auto& d : st.diffs) next.push_back({s.shift + d.value, s.count * static_cast<long>(d.matches)});
    sums = std::move(next);
  }
  return sums;
}

std::vector<std::size_t> diff_sizes(const std::vector<StageDiffs>& stages) {
  std::vector<std::size_t> sizes;
  for (const auto& st : stages) sizes.push_back(st.diffs.size());
  return sizes;
}

}  // namespace

DoubleDifferenceVerdict double_difference_certificate(const Tower& tower, int first_stage, int n,
                                                      std::uint64_t budget) {
  if (first_stage < 0 || n < first_stage) throw Error(ErrorKind::InvalidArgument, "need 0 <= j <= N");
  DoubleDifferenceVerdict out;
  out.gcd = 0;
  for (int i = first_stage; i < n; ++i) {
    for (const auto& e : tower.stage(i).height_set) out.gcd = gcd(out.gcd, e);
  }
  if (out.gcd > 1) {
    out.status = DoubleDifference::CertifiedAbsent;
    return out;
  }
  const auto stages = stage_diffs(tower, first_stage, n);
  if (!bounded_product(diff_sizes(stages), budget)) {
    out.status = DoubleDifference::Unknown;
    return out;
  }
  std::vector<BigInt> e;
  for (auto& s : tuple_sums(stages)) e.push_back(std::move(s.shift));
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  out.status = DoubleDifference::AbsentAtStage;
  for (const auto& b : e) {
    if (std::binary_search(e.begin(), e.end(), BigInt(b + 1))) {
      out.status = DoubleDifference::Present;
      break;
    }
  }
  return out;
}

std::vector<SupportEntry> support_enumerate(const Tower& tower, int first_stage, int n, std::uint64_t budget) {
  if (first_stage < 0 || n < first_stage) throw Error(ErrorKind::InvalidArgument, "need 0 <= j <= N");
  std::vector<SupportEntry> out;
  if (scale_separated(tower, first_stage, n)) {
    const auto stages = stage_diffs(tower, first_stage, n);
    if (!bounded_product(diff_sizes(stages), budget)) {
      throw Error(ErrorKind::BudgetExceeded, "support enumeration exceeds the tuple budget");
    }
    for (auto& s : tuple_sums(stages)) {
      if (s.shift >= 0) out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.shift < b.shift; });
    return out;
  }
  const auto s = tower.relative_sumset(first_stage, n).to_vector();
  if (!bounded_product({s.size(), s.size()}, budget)) {
    throw Error(ErrorKind::BudgetExceeded, "pairwise difference enumeration exceeds the budget");
  }
  std::map<BigInt, BigInt> hist;
  for (const auto& x : s)
    for (const auto& y : s) {
      if (x < y) break;
      hist[x - y] += 1;
    }
  for (auto& [k, c] : hist) out.push_back({k, c});
  return out;
}

void write_heights(std::ostream& out, const HeightList& heights) {
  heights.visit([&](const auto& xs) {
    for (const auto& x : xs) out << x << '\n';
  });
}

void write_support_csv(std::ostream& out, const std::vector<SupportEntry>& support) {
  out << "k,count\n";
  for (const auto& e : support) out << e.shift << ',' << e.count << '\n';
}

}  // namespace rankone
