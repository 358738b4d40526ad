#include "rankone/correlation.hpp"

#include "rankone/error.hpp"

#include <algorithm>
#include <ostream>

namespace rankone {

Rational default_tolerance() { return Rational(1, 1000000000); }

namespace {

BigInt big64(std::int64_t v) { return BigInt(static_cast<long>(v)); }

void require_common_column(const LevelSet& a, const LevelSet& b) {
  if (a.column != b.column) {
    throw Error(ErrorKind::CommonColumnRequired, "level sets lie in columns C_" + std::to_string(a.column) +
                                                     " and C_" + std::to_string(b.column));
  }
}

// max D(B, m) when m >= column.
BigInt top_level(const Tower& tower, const LevelSet& b, int m) {
  return b.heights.back() + tower.max_descendant(m) - tower.max_descendant(b.column);
}

std::int64_t as64(std::int64_t v) { return v; }
std::int64_t as64(const BigInt& v) { return v.get_si(); }

bool is_budget(const Error& e) { return e.kind() == ErrorKind::BudgetExceeded; }

HeightList level_list(const Tower& tower, const LevelSet& a, int m) {
  a.validate(tower);
  if (a.heights.empty()) return HeightList(HeightList::Narrow{});
  if (m < a.column) throw Error(ErrorKind::InvalidArgument, "stage below the level set's column");
  const BigInt total = tower.product_of_cuts(a.column, m) * static_cast<unsigned long>(a.heights.size());
  if (total > BigInt(static_cast<unsigned long>(tower.element_budget()))) {
    throw Error(ErrorKind::BudgetExceeded, "level set has " + total.get_str() + " levels in C_" + std::to_string(m) +
                                               ", above the element budget");
  }
  const HeightList& rel = tower.relative_sumset(a.column, m);
  // Copies of distinct levels of C_j never collide in C_m.
  if (HeightList::fits_narrow(top_level(tower, a, m))) {
    HeightList::Narrow out;
    out.reserve(static_cast<std::size_t>(total.get_ui()));
    rel.visit([&](const auto& xs) {
      for (const auto& h : a.heights)
        for (const auto& x : xs) out.push_back(h.get_si() + as64(x));
    });
    std::sort(out.begin(), out.end());
    return HeightList(std::move(out));
  }
  HeightList::Wide out;
  rel.visit([&](const auto& xs) {
    for (const auto& h : a.heights)
      for (const auto& x : xs) out.push_back(h + x);
  });
  std::sort(out.begin(), out.end());
  return HeightList(std::move(out));
}

}  // namespace

std::vector<std::int64_t> levels_at(const Tower& tower, const LevelSet& a, int m) {
  HeightList list = level_list(tower, a, m);
  if (!list.narrow()) throw Error(ErrorKind::BudgetExceeded, "level heights exceed the int64 range");
  return list.visit([](const auto& xs) {
    std::vector<std::int64_t> out;
    for (const auto& x : xs) out.push_back(as64(x));
    return out;
  });
}

int settled_stage(const Tower& tower, const LevelSet& b, const BigInt& reach) {
  if (b.heights.empty()) return b.column;
  for (int m = b.column; m <= tower.last_stage(); ++m) {
    if (top_level(tower, b, m) + reach < tower.height(m)) return m;
  }
  return -1;
}

const ShiftCounter& Correlator::counter(int first_stage, int n) {
  auto& slot = counters_[{first_stage, n}];
  if (!slot) slot = std::make_unique<ShiftCounter>(tower_, first_stage, n);
  return *slot;
}

Measurement Correlator::pair(const LevelSet& a_in, const LevelSet& b_in, const BigInt& k_in, const Rational& tol) {
  require_common_column(a_in, b_in);
  a_in.validate(tower_);
  b_in.validate(tower_);
  if (tol <= 0) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  // μ(A ∩ T^k B) = μ(B ∩ T^{-k} A).
  const bool flip = k_in < 0;
  const LevelSet& a = flip ? b_in : a_in;
  const LevelSet& b = flip ? a_in : b_in;
  const BigInt k = flip ? BigInt(-k_in) : k_in;
  const int j = a.column;

  auto evaluate = [&](int m) {
    const auto& c = counter(j, m);
    BigInt lower = 0;
    for (const auto& x : a.heights)
      for (const auto& y : b.heights) lower += c.count(k + y - x);
    // Levels of B whose k-th image leaves C_m.
    BigInt open = 0;
    const BigInt& h = tower_.height(m);
    if (b.heights.empty() || top_level(tower_, b, m) + k >= h) {
      for (const auto& y : b.heights) open += count_at_least(tower_, j, m, h - k - y);
    }
    const Rational& w = tower_.width(m);
    return Measurement{{Rational(lower) * w, Rational(lower + open) * w}, m, open == 0};
  };

  const int settled = settled_stage(tower_, b, k);
  if (settled >= 0) {
    try {
      return evaluate(settled);
    } catch (const Error& e) {
      if (!is_budget(e)) throw;
    }
  }
  std::optional<Measurement> best;
  for (int m = j; m <= tower_.last_stage(); ++m) {
    Measurement cur;
    try {
      cur = evaluate(m);
    } catch (const Error& e) {
      if (!is_budget(e)) throw;
      break;
    }
    if (best) cur.value = cur.value.intersect(best->value);
    best = cur;
    if (cur.exact || cur.value.width() < tol) return cur;
  }
  throw Error(ErrorKind::BudgetExceeded,
              "correlation at shift " + k_in.get_str() + " not resolved to the tolerance within the stage budget" +
                  (best ? " (best width " + to_string(best->value.width()) + ")" : std::string()));
}

Measurement Correlator::multi(const LevelSet& a, std::span<const BigInt> shifts, const Rational& tol) {
  a.validate(tower_);
  if (tol <= 0) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    if (shifts[i] < 0 || (i > 0 && shifts[i] < shifts[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "shifts must be nonnegative and sorted");
    }
  }
  if (shifts.empty()) return {RationalInterval::point(a.measure(tower_)), a.column, true};
  const int j = a.column;
  const BigInt& top = shifts.back();

  // Counted forwards: y, y + (s_p - s_i) all in D(A, m); open levels are those with y + s_p >= h_m.
  auto evaluate = [&](int m) {
    const HeightList d = level_list(tower_, a, m);
    const BigInt lower = multi_intersect_count(d, shifts);
    BigInt open = 0;
    const BigInt& h = tower_.height(m);
    if (a.heights.empty() || top_level(tower_, a, m) + top >= h) {
      for (const auto& y : a.heights) open += count_at_least(tower_, j, m, h - top - y);
    }
    const Rational& w = tower_.width(m);
    return Measurement{{Rational(lower) * w, Rational(lower + open) * w}, m, open == 0};
  };

  const int settled = settled_stage(tower_, a, top);
  if (settled >= 0) {
    try {
      return evaluate(settled);
    } catch (const Error& e) {
      if (!is_budget(e)) throw;
    }
  }
  std::optional<Measurement> best;
  for (int m = j; m <= tower_.last_stage(); ++m) {
    Measurement cur;
    try {
      cur = evaluate(m);
    } catch (const Error& e) {
      if (!is_budget(e)) throw;
      break;
    }
    if (best) cur.value = cur.value.intersect(best->value);
    best = cur;
    if (cur.exact || cur.value.width() < tol || cur.value.lower > 0) return cur;
  }
  if (best && best->value.lower > 0) return *best;
  throw Error(ErrorKind::BudgetExceeded, "multiple correlation not resolved within the stage and element budgets");
}

Measurement corr_pair(const Tower& tower, const LevelSet& a, const LevelSet& b, const BigInt& k,
                      const Rational& tol) {
  return Correlator(tower).pair(a, b, k, tol);
}

Measurement multi_corr(const Tower& tower, const LevelSet& a, std::span<const BigInt> shifts, const Rational& tol) {
  return Correlator(tower).multi(a, shifts, tol);
}

namespace {

// Stage used for window computations: the settled stage when its levels can be
// materialized, otherwise the deepest stage that can.
int window_stage(const Tower& tower, const std::vector<const LevelSet*>& sets, const BigInt& reach) {
  int settled = -1;
  for (const auto* s : sets) settled = std::max(settled, settled_stage(tower, *s, reach));
  auto affordable = [&](int m) {
    try {
      for (const auto* s : sets) levels_at(tower, *s, m);
      return true;
    } catch (const Error& e) {
      if (!is_budget(e)) throw;
      return false;
    }
  };
  if (settled >= 0 && affordable(settled)) return settled;
  const int column = sets.front()->column;
  int best = -1;
  for (int m = column; m <= tower.last_stage() && affordable(m); ++m) best = m;
  if (best < 0) throw Error(ErrorKind::BudgetExceeded, "no stage of the level set fits the element budget");
  return best;
}

// Visits that may still happen above h_m for a level y over n steps: #{k < n : y + k >= h_m}.
BigInt open_steps(const BigInt& h, std::int64_t y, const BigInt& n) {
  const BigInt extra = n - (h - y);
  return extra > 0 ? std::min(extra, n) : BigInt(0);
}

constexpr std::int64_t kWindowCap = std::int64_t{1} << 62;

}  // namespace

Measurement window_sum(const Tower& tower, const LevelSet& a, const LevelSet& b, const BigInt& n) {
  require_common_column(a, b);
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "window length must be nonnegative");
  if (n == 0) return {RationalInterval::point(0), a.column, true};
  const int m = window_stage(tower, {&a, &b}, n - 1);
  const auto da = levels_at(tower, a, m);
  const auto db = levels_at(tower, b, m);
  const std::int64_t len = n >= BigInt(static_cast<long>(kWindowCap)) ? kWindowCap : n.get_si();
  // Pairs (x, y) in D_A x D_B with 0 <= x - y < n.
  BigInt pairs = 0;
  std::size_t lo = 0, hi = 0;
  for (const auto x : da) {
    while (hi < db.size() && db[hi] <= x) ++hi;
    while (lo < hi && db[lo] <= x - len) ++lo;
    pairs += static_cast<unsigned long>(hi - lo);
  }
  BigInt open = 0;
  const BigInt& h = tower.height(m);
  for (const auto y : db) open += open_steps(h, y, n);
  const Rational& w = tower.width(m);
  return {{Rational(pairs) * w, Rational(pairs + open) * w}, m, open == 0};
}

Measurement partial_sum(const Tower& tower, const LevelSet& f, const BigInt& n) {
  auto out = window_sum(tower, f, f, n);
  const Rational mu = f.measure(tower);
  out.value = out.value.scaled(1 / (mu * mu));
  return out;
}

RationalInterval CorrelationSeries::u(std::int64_t k) const {
  auto it = std::lower_bound(terms.begin(), terms.end(), k, [](const SeriesTerm& t, std::int64_t v) { return t.k < v; });
  if (it != terms.end() && it->k == k) return it->u;
  return RationalInterval::point(0);
}

RationalInterval CorrelationSeries::a(std::int64_t n) const {
  auto it = std::lower_bound(terms.begin(), terms.end(), n, [](const SeriesTerm& t, std::int64_t v) { return t.k < v; });
  if (it == terms.begin()) return RationalInterval::point(0);
  return std::prev(it)->prefix;
}

CorrelationSeries weights_and_sums(const Tower& tower, const LevelSet& f, std::int64_t n, const Rational& tol) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "series length must be nonnegative");
  f.validate(tower);
  CorrelationSeries out;
  out.reference = f;
  out.length = n;
  const Rational mu = f.measure(tower);
  const Rational norm = 1 / (mu * mu);
  for (int m = 0; m <= tower.last_stage(); ++m) {
    const BigInt kap = kappa(tower, m);
    if (kap > n) break;
    out.kappa_marks.push_back(kap.get_si());
  }
  if (n == 0) {
    out.exact = true;
    return out;
  }
  const int settled = settled_stage(tower, f, BigInt(static_cast<long>(n - 1)));
  std::vector<std::int64_t> diffs;
  bool have_stage = false;
  if (settled >= 0) {
    try {
      const auto d = levels_at(tower, f, settled);
      for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t t = i + 1; t-- > 0;) {
          if (d[i] - d[t] >= n) break;
          diffs.push_back(d[i] - d[t]);
        }
      have_stage = true;
    } catch (const Error& e) {
      if (!is_budget(e)) throw;
    }
  }
  RationalInterval running = RationalInterval::point(0);
  if (have_stage) {
    out.stage = settled;
    out.exact = true;
    std::sort(diffs.begin(), diffs.end());
    const Rational unit = tower.width(settled) * norm;
    for (std::size_t i = 0; i < diffs.size();) {
      std::size_t e = i;
      while (e < diffs.size() && diffs[e] == diffs[i]) ++e;
      const auto u = RationalInterval::point(Rational(static_cast<unsigned long>(e - i)) * unit);
      running += u;
      out.terms.push_back({diffs[i], u, running});
      i = e;
    }
    return out;
  }
  // Shift by shift, each to the tolerance.
  Correlator corr(tower);
  out.exact = true;
  for (std::int64_t k = 0; k < n; ++k) {
    const auto mes = corr.pair(f, f, big64(k), tol);
    out.stage = std::max(out.stage, mes.stage);
    out.exact = out.exact && mes.exact;
    if (mes.value.upper == 0) continue;
    const auto u = mes.value.scaled(norm);
    running += u;
    out.terms.push_back({k, u, running});
  }
  return out;
}

BigInt kappa(const Tower& tower, int m) { return tower.max_descendant(m) + 1; }

LevelCounts level_counts(const Tower& tower, const LevelSet& f, std::int64_t n, int m) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "orbit length must be nonnegative");
  LevelCounts out;
  out.stage = m;
  out.levels = levels_at(tower, f, m);
  const BigInt& h = tower.height(m);
  const BigInt nn = big64(n);
  std::size_t hi = 0;
  for (std::size_t i = 0; i < out.levels.size(); ++i) {
    const auto x = out.levels[i];
    if (hi < i) hi = i;
    while (hi < out.levels.size() && out.levels[hi] - x < n) ++hi;
    out.counts.push_back(static_cast<std::int64_t>(hi - i));
    out.open.push_back(open_steps(h, x, nn).get_si());
  }
  return out;
}

ErgodicIntegrals ergodic_sum_integrals(const Tower& tower, std::int64_t n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be at least 1");
  const LevelSet base = LevelSet::base(0);
  const int m = window_stage(tower, {&base}, big64(n - 1));
  const auto lc = level_counts(tower, base, n, m);
  BigInt s1 = 0, s1_open = 0, s2 = 0, s2_open = 0;
  for (std::size_t i = 0; i < lc.counts.size(); ++i) {
    const BigInt c = big64(lc.counts[i]);
    const BigInt top = c + lc.open[i];
    s1 += c;
    s1_open += top;
    s2 += c * c;
    s2_open += top * top;
  }
  const Rational& w = tower.width(m);
  return {{Rational(s1) * w, Rational(s1_open) * w}, {Rational(s2) * w, Rational(s2_open) * w}, m};
}

void write_series_csv(std::ostream& out, const CorrelationSeries& series) {
  out << "k,u_lower,u_upper,a_lower,a_upper,is_kappa_mark\n";
  auto mark = [&](std::int64_t k) {
    return std::binary_search(series.kappa_marks.begin(), series.kappa_marks.end(), k + 1);
  };
  for (std::int64_t k = 0; k < series.length; ++k) {
    const auto u = series.u(k);
    const auto a = series.a(k + 1);
    out << k << ',' << to_string(u.lower) << ',' << to_string(u.upper) << ',' << to_string(a.lower) << ','
        << to_string(a.upper) << ',' << (mark(k) ? 1 : 0) << '\n';
  }
}

}  // namespace rankone
