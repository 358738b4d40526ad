#include "rankone/diagnostics.hpp"

#include "rankone/error.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace rankone {

namespace {

BigInt big64(std::int64_t v) { return BigInt(static_cast<long>(v)); }

bool is_budget(const Error& e) { return e.kind() == ErrorKind::BudgetExceeded; }

// #{(x, y) in da x db : x - y = k} for 0 <= k < n, keyed by k.
std::map<std::int64_t, std::int64_t> window_histogram(const std::vector<std::int64_t>& da,
                                                      const std::vector<std::int64_t>& db, std::int64_t n) {
  std::map<std::int64_t, std::int64_t> out;
  std::size_t lo = 0;
  for (const auto x : da) {
    while (lo < db.size() && db[lo] <= x - n) ++lo;
    for (std::size_t t = lo; t < db.size() && db[t] <= x; ++t) ++out[x - db[t]];
  }
  return out;
}

// Smallest stage where every listed set is settled for the given reach and can be materialized.
std::optional<int> common_settled_stage(const Tower& tower, const std::vector<const LevelSet*>& sets,
                                        const BigInt& reach) {
  int m = -1;
  for (const auto* s : sets) {
    const int st = settled_stage(tower, *s, reach);
    if (st < 0) return std::nullopt;
    m = std::max(m, st);
  }
  try {
    for (const auto* s : sets) levels_at(tower, *s, m);
  } catch (const Error& e) {
    if (!is_budget(e)) throw;
    return std::nullopt;
  }
  return m;
}

}  // namespace

WreValue wre_ratio(const Tower& tower, const LevelSet& a, const LevelSet& b, const BigInt& n) {
  if (a.column != b.column) {
    throw Error(ErrorKind::CommonColumnRequired, "A lies in C_" + std::to_string(a.column) + " and B in C_" +
                                                     std::to_string(b.column) + "; refine both to one column");
  }
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be at least 1");
  const auto sum = window_sum(tower, a, b, n);
  const auto an = partial_sum(tower, LevelSet::base(0), n);
  WreValue out;
  out.target = a.measure(tower) * b.measure(tower);
  out.stage = std::max(sum.stage, an.stage);
  if (sum.exact && an.exact) {
    out.ratio = RationalInterval::point(sum.value.lower / an.value.lower);
  } else {
    out.ratio = divide(sum.value, an.value);
  }
  return out;
}

DiagnosticsReport wre_curve_kappa(const Tower& tower, const LevelSet& a, const LevelSet& b, int m_max) {
  DiagnosticsReport out;
  out.spec_id = tower.spec().id();
  out.kind = "wre";
  Rational target = a.measure(tower) * b.measure(tower);
  for (int m = 1; m <= m_max; ++m) {
    const BigInt n = kappa(tower, m);
    out.kappa_marks.push_back(n);
    const auto v = wre_ratio(tower, a, b, n);
    out.rows.push_back({n, v.ratio, v.stage});
  }
  RationalInterval dev = RationalInterval::point(0);
  const std::size_t from = out.rows.size() >= 2 ? out.rows.size() - 2 : 0;
  for (std::size_t i = from; i < out.rows.size(); ++i) {
    const auto d = abs(out.rows[i].value - RationalInterval::point(target));
    dev = {max(dev.lower, d.lower), max(dev.upper, d.upper)};
  }
  out.summary = dev;
  out.verdict = "max |ratio - mu(A)mu(B)| over the last two kappa marks, target " + to_string(target);
  return out;
}

RationalInterval rwm_deviation(const Tower& tower, const LevelSet& a, const LevelSet& b, std::int64_t n,
                               const Rational& tol) {
  if (a.column != b.column) throw Error(ErrorKind::CommonColumnRequired, "A and B must lie in one column");
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be at least 1");
  const LevelSet base = LevelSet::base(0);
  const Rational mu_i = base.measure(tower);
  const Rational target = a.measure(tower) * b.measure(tower);
  if (const auto m = common_settled_stage(tower, {&a, &b, &base}, big64(n - 1))) {
    const auto da = levels_at(tower, a, *m);
    const auto db = levels_at(tower, b, *m);
    const auto di = levels_at(tower, base, *m);
    const auto hab = window_histogram(da, db, n);
    const auto hi = window_histogram(di, di, n);
    const Rational& w = tower.width(*m);
    std::set<std::int64_t> keys;
    for (const auto& [k, c] : hab) keys.insert(k);
    for (const auto& [k, c] : hi) keys.insert(k);
    Rational total = 0, an = 0;
    for (const auto k : keys) {
      const auto ab = hab.count(k) ? hab.at(k) : 0;
      const auto ii = hi.count(k) ? hi.at(k) : 0;
      const Rational u = Rational(ii) * w / (mu_i * mu_i);
      an += u;
      total += abs(Rational(ab) * w - target * u);
    }
    return RationalInterval::point(total / an);
  }
  Correlator c(tower);
  RationalInterval total = RationalInterval::point(0), an = RationalInterval::point(0);
  for (std::int64_t k = 0; k < n; ++k) {
    const auto u = c.pair(base, base, big64(k), tol).value.scaled(1 / (mu_i * mu_i));
    const auto ab = c.pair(a, b, big64(k), tol).value;
    an += u;
    total += abs(ab - u.scaled(target));
  }
  return divide(total, an);
}

std::vector<RatioEntry> ratio_constancy(const Tower& tower, int j, int m_max) {
  if (j < 0 || m_max < j) throw Error(ErrorKind::InvalidArgument, "need 0 <= j <= m_max");
  bool unique = scale_separated(tower, 0, m_max);
  if (!unique) {
    try {
      unique = uniqueness_check(tower, m_max).pass;
    } catch (const Error& e) {
      if (!is_budget(e)) throw;
    }
  }
  if (!unique) {
    throw Error(ErrorKind::UniquenessRequired,
                "shift representations are not certified unique up to stage " + std::to_string(m_max));
  }
  const BigInt limit = tower.max_descendant(m_max);
  const LevelSet jay = LevelSet::base(j);
  const LevelSet base = LevelSet::base(0);
  const int m = settled_stage(tower, jay, limit);
  if (m < 0) throw Error(ErrorKind::BudgetExceeded, "no settled stage within the stage budget");
  Correlator c(tower);
  std::vector<RatioEntry> out;
  const Rational& w = tower.width(m);
  for (const auto& e : support_enumerate(tower, j, m)) {
    if (e.shift > limit) break;
    const Rational mu_j = Rational(e.count) * w;
    const auto mu_i = c.pair(base, base, e.shift, default_tolerance());
    if (!mu_i.exact) throw Error(ErrorKind::BudgetExceeded, "correlation of I not exact");
    out.push_back({e.shift, mu_j / mu_i.value.lower});
  }
  return out;
}

RationalInterval renyi_ratio(const Tower& tower, std::int64_t n) {
  const auto e = ergodic_sum_integrals(tower, n);
  const RationalInterval sq = multiply(e.first, e.first);
  if (e.first.exact() && e.second.exact()) return RationalInterval::point(e.second.lower / sq.lower);
  return divide(e.second, sq);
}

BreProfile bre_sup_profile(const Tower& tower, std::int64_t n, int m) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be at least 1");
  const BigInt& h = tower.height(m);
  if (h < n + 1) {
    throw Error(ErrorKind::StageTooSmall, "h_" + std::to_string(m) + " = " + h.get_str() + " < n + 1 = " +
                                              std::to_string(n + 1) + "; no level has n levels above it");
  }
  const LevelSet base = LevelSet::base(0);
  const auto an = partial_sum(tower, base, big64(n));
  const auto d = levels_at(tower, base, m);
  const std::int64_t last = BigInt(h - n).get_si();  // highest eligible level
  auto visits = [&](std::int64_t y) {
    auto lo = std::lower_bound(d.begin(), d.end(), y);
    auto hi = std::lower_bound(d.begin(), d.end(), y + n);
    return static_cast<std::int64_t>(hi - lo);
  };
  auto value = [&](std::int64_t c) {
    const RationalInterval cnt = RationalInterval::point(Rational(static_cast<long>(c)));
    return an.exact ? RationalInterval::point(Rational(static_cast<long>(c)) / an.value.lower) : divide(cnt, an.value);
  };
  BreProfile out;
  out.sup = RationalInterval::point(0);
  std::int64_t best = -1;
  // A window of n levels holds the most points of D when it starts at one of them
  // or is pushed against the eligibility limit.
  std::vector<std::int64_t> starts;
  for (const auto x : d) {
    if (x <= last) starts.push_back(x);
  }
  if (std::find(starts.begin(), starts.end(), last) == starts.end()) starts.push_back(last);
  for (const auto y : starts) {
    const auto c = visits(y);
    if (c == 0) continue;
    out.levels.push_back({y, value(c)});
    if (c > best) {
      best = c;
      out.argmax = y;
    }
  }
  if (best > 0) out.sup = value(best);
  return out;
}

namespace {

struct WindowSearch {
  std::vector<std::vector<Difference>> diffs;  // per stage, sorted by decreasing match count
  std::vector<BigInt> reach;
  std::vector<Rational> cuts;
  BigInt lo, hi;  // inclusive target range for k
  Rational best = 0;
  std::optional<BigInt> argmax;

  void run(int i, const BigInt& acc, const Rational& p) {
    if (p <= best) return;
    if (i < 0) {
      if (acc >= lo && acc <= hi) {
        best = p;
        argmax = acc;
      }
      return;
    }
    const auto& r = reach[static_cast<std::size_t>(i)];
    for (const auto& d : diffs[static_cast<std::size_t>(i)]) {
      const BigInt next = acc + d.value;
      if (next + r < lo || next - r > hi) continue;
      run(i - 1, next, p * Rational(d.matches) / cuts[static_cast<std::size_t>(i)]);
    }
  }
};

}  // namespace

std::vector<ZeroTypeWindow> zerotype_scan(const Tower& tower, int m_lo, int m_hi) {
  if (m_lo < 0 || m_hi < m_lo) throw Error(ErrorKind::InvalidArgument, "need 0 <= m_lo <= m_hi");
  const LevelSet base = LevelSet::base(0);
  const Rational& w0 = tower.width(0);
  std::vector<ZeroTypeWindow> out;
  for (int n = m_lo; n < m_hi; ++n) {
    ZeroTypeWindow win;
    win.n = n;
    win.lo = tower.max_descendant(n);
    win.hi = tower.max_descendant(n + 1);
    win.max = RationalInterval::point(0);
    const BigInt first = max(Rational(win.lo), Rational(1)).get_num();
    if (first >= win.hi) {
      out.push_back(win);
      continue;
    }
    const int m = settled_stage(tower, base, win.hi - 1);
    if (m < 0) throw Error(ErrorKind::BudgetExceeded, "window " + std::to_string(n) + " not settled within the stage budget");
    win.stage = m;
    if (scale_separated(tower, 0, m)) {
      // μ(I ∩ T^k I) = w_0 Π m_i / r_i along the unique decomposition of k.
      WindowSearch search;
      BigInt reach = 0;
      for (int i = 0; i < m; ++i) {
        auto d = difference_set(tower, i);
        std::stable_sort(d.begin(), d.end(), [](const Difference& x, const Difference& y) { return x.matches > y.matches; });
        search.diffs.push_back(std::move(d));
        search.reach.push_back(reach);
        search.cuts.emplace_back(static_cast<long>(tower.stage(i).cuts));
        reach += tower.stage(i).height_set.back();
      }
      search.lo = first;
      search.hi = win.hi - 1;
      search.run(m - 1, 0, Rational(1));
      if (search.argmax) {
        win.max = RationalInterval::point(w0 * search.best);
        win.argmax = search.argmax;
      }
    } else {
      const auto d = levels_at(tower, base, m);
      const auto lo64 = first.get_si(), hi64 = win.hi.get_si();
      std::map<std::int64_t, std::int64_t> counts;
      for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t t = 0; t < i; ++t) {
          const auto k = d[i] - d[t];
          if (k >= lo64 && k < hi64) ++counts[k];
        }
      std::int64_t best = 0;
      for (const auto& [k, c] : counts) {
        if (c > best) {
          best = c;
          win.argmax = big64(k);
        }
      }
      win.max = RationalInterval::point(Rational(static_cast<long>(best)) * tower.width(m));
    }
    out.push_back(win);
  }
  return out;
}

namespace {

constexpr std::uint64_t kWitnessElementCap = std::uint64_t{1} << 18;

// Positive lower bound for μ(A ∩ T^n A ∩ ... ∩ T^{kn} A) at a settled, affordable stage.
std::optional<Measurement> probe(Correlator& c, const LevelSet& a, const BigInt& n, int k) {
  const Tower& t = c.tower();
  const int m = settled_stage(t, a, n * k);
  if (m < 0) return std::nullopt;
  if (t.product_of_cuts(a.column, m) * static_cast<unsigned long>(a.heights.size()) >
      BigInt(static_cast<unsigned long>(std::min(kWitnessElementCap, t.element_budget())))) {
    return std::nullopt;
  }
  std::vector<BigInt> shifts;
  for (int i = 1; i <= k; ++i) shifts.push_back(n * i);
  const auto mes = c.multi(a, shifts, default_tolerance());
  if (mes.value.lower > 0) return mes;
  return std::nullopt;
}

}  // namespace

std::optional<RecurrenceWitness> recurrence_witness(const Tower& tower, const LevelSet& a, int k,
                                                    std::uint64_t budget) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  a.validate(tower);
  if (a.heights.empty()) return std::nullopt;
  Correlator c(tower);
  std::set<BigInt> tried;
  std::uint64_t spent = 0;
  auto attempt = [&](const BigInt& n, const char* source) -> std::optional<RecurrenceWitness> {
    if (n <= 0 || spent >= budget || !tried.insert(n).second) return std::nullopt;
    ++spent;
    if (auto mes = probe(c, a, n, k)) return RecurrenceWitness{n, *mes, source};
    return std::nullopt;
  };
  for (int j = 0; j <= tower.last_stage() && spent < budget; ++j) {
    if (auto w = attempt(tower.height(j), "height")) return w;
    const auto& h = tower.stage(j).height_set;
    const std::set<BigInt> members(h.begin(), h.end());
    for (std::size_t x = 0; x < h.size(); ++x)
      for (std::size_t y = x + 1; y < h.size(); ++y) {
        const BigInt d = h[y] - h[x];
        bool progression = true;
        for (int i = 2; i <= k && progression; ++i) progression = members.count(h[x] + d * i) > 0;
        if (!progression) continue;
        if (auto w = attempt(d, "progression")) return w;
      }
    // Stop early once heights are far beyond anything affordable.
    if (settled_stage(tower, a, tower.height(j) * k) < 0) break;
  }
  // Support-driven: positive differences n of D(A, m) with 2n, ..., kn differences as well.
  int m = a.column;
  while (m + 1 <= tower.last_stage() &&
         tower.product_of_cuts(a.column, m + 1) * static_cast<unsigned long>(a.heights.size()) <= 4096) {
    ++m;
  }
  std::vector<std::int64_t> d;
  try {
    d = levels_at(tower, a, m);
  } catch (const Error& e) {
    if (!is_budget(e)) throw;
  }
  std::set<std::int64_t> diffs;
  for (std::size_t x = 0; x < d.size(); ++x)
    for (std::size_t y = 0; y < x; ++y) diffs.insert(d[x] - d[y]);
  for (const auto n : diffs) {
    if (spent >= budget) break;
    bool ok = true;
    for (int i = 2; i <= k && ok; ++i) ok = diffs.count(n * i) > 0;
    if (!ok) continue;
    if (auto w = attempt(big64(n), "support")) return w;
  }
  return std::nullopt;
}

NonRecurrenceVerdict non_recurrence_certificate(const Tower& tower, int k, std::int64_t bound) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  NonRecurrenceVerdict out;
  out.bound = big64(std::max<std::int64_t>(bound, 0));
  if (bound <= 0) {
    out.certified = true;
    return out;
  }
  const LevelSet base = LevelSet::base(0);
  const BigInt top = big64(bound) * k;
  const int m = settled_stage(tower, base, top);
  if (m < 0) throw Error(ErrorKind::BudgetExceeded, "no settled stage for shifts up to " + top.get_str());
  out.digit_stage = m;
  out.brute_stage = m;

  // Digit scan: positivity of |S ∩ (t + S)| through the shift counter.
  const ShiftCounter counter(tower, 0, m);
  std::optional<std::int64_t> digit_hit;
  for (std::int64_t n = 1; n <= bound && !digit_hit; ++n) {
    bool all = true;
    for (int i = 1; i <= k && all; ++i) all = counter.count(big64(n * i)) > 0;
    if (all) digit_hit = n;
  }
  // Brute-force scan over every pairwise difference of the materialized set.
  const auto d = levels_at(tower, base, m);
  const auto hist = window_histogram(d, d, top.get_si() + 1);
  std::optional<std::int64_t> brute_hit;
  for (std::int64_t n = 1; n <= bound && !brute_hit; ++n) {
    bool all = true;
    for (int i = 1; i <= k && all; ++i) all = hist.count(n * i) > 0;
    if (all) brute_hit = n;
  }
  if (digit_hit != brute_hit) {
    throw Error(ErrorKind::Infeasible, "digit and brute-force support scans disagree");
  }
  if (brute_hit) out.candidate = big64(*brute_hit);
  out.certified = !brute_hit;
  return out;
}

SeqMode parse_seq_mode(const std::string& name) {
  if (name == "small_set_ratio") return SeqMode::SmallSetRatio;
  if (name == "strong_cesaro") return SeqMode::StrongCesaro;
  if (name == "asymptotic") return SeqMode::Asymptotic;
  if (name == "smooth") return SeqMode::Smooth;
  throw Error(ErrorKind::InvalidArgument, "unknown mode '" + name + "'");
}

const char* to_string(SeqMode mode) {
  switch (mode) {
    case SeqMode::SmallSetRatio: return "small_set_ratio";
    case SeqMode::StrongCesaro: return "strong_cesaro";
    case SeqMode::Asymptotic: return "asymptotic";
    case SeqMode::Smooth: return "smooth";
  }
  return "unknown";
}

RationalInterval seq_functionals(const std::vector<RationalInterval>& u, const std::vector<RationalInterval>& v,
                                 const Rational& level, const std::vector<std::int64_t>& index_set, std::int64_t n,
                                 SeqMode mode) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be at least 1");
  const auto need = [&](const std::vector<RationalInterval>& s, std::int64_t len, const char* name) {
    if (static_cast<std::int64_t>(s.size()) < len) {
      throw Error(ErrorKind::IndexOutOfRange, std::string(name) + " has " + std::to_string(s.size()) +
                                                  " terms, " + std::to_string(len) + " needed");
    }
  };
  need(u, mode == SeqMode::Smooth ? n + 1 : n, "u");
  RationalInterval an = RationalInterval::point(0);
  for (std::int64_t k = 0; k < n; ++k) an += u[static_cast<std::size_t>(k)];
  RationalInterval num = RationalInterval::point(0);
  switch (mode) {
    case SeqMode::SmallSetRatio: {
      const std::set<std::int64_t> ks(index_set.begin(), index_set.end());
      for (const auto k : ks) {
        if (k < 0) throw Error(ErrorKind::IndexOutOfRange, "negative index in K");
        if (k < n) num += u[static_cast<std::size_t>(k)];
      }
      break;
    }
    case SeqMode::StrongCesaro:
      need(v, n, "x");
      for (std::int64_t k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        num += multiply(u[i], abs(v[i] - RationalInterval::point(level)));
      }
      break;
    case SeqMode::Asymptotic:
      need(v, n, "v");
      for (std::int64_t k = 0; k < n; ++k) num += abs(u[static_cast<std::size_t>(k)] - v[static_cast<std::size_t>(k)]);
      break;
    case SeqMode::Smooth:
      for (std::int64_t k = 0; k < n; ++k) {
        num += abs(u[static_cast<std::size_t>(k + 1)] - u[static_cast<std::size_t>(k)]);
      }
      break;
  }
  if (num.exact() && an.exact()) return RationalInterval::point(num.lower / an.lower);
  return divide(num, an);
}

}  // namespace rankone
