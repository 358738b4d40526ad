#include "rankone/weaktop.hpp"

#include "rankone/error.hpp"

#include <algorithm>
#include <random>

namespace rankone {

namespace {

BigInt pow2(unsigned long e) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, e);
  return out;
}

Rational dyadic(std::uint64_t count, int level) {
  Rational r(BigInt(static_cast<unsigned long>(count)), pow2(static_cast<unsigned long>(level)));
  r.canonicalize();
  return r;
}

std::pair<DyadicSet, DyadicSet> align(const DyadicSet& a, const DyadicSet& b) {
  const int level = std::max(a.level, b.level);
  const std::size_t extent = std::max(a.cells.size() << (level - a.level), b.cells.size() << (level - b.level));
  return {a.refine(level, extent), b.refine(level, extent)};
}

std::uint64_t cell_count(int level, std::uint64_t stage_cells) { return stage_cells << level; }

}  // namespace

DyadicSet DyadicSet::interval(int level, std::uint64_t first, std::uint64_t last) {
  DyadicSet out{level, std::vector<bool>(last, false)};
  for (auto c = first; c < last; ++c) out.cells[c] = true;
  return out;
}

Rational DyadicSet::measure() const {
  return dyadic(static_cast<std::uint64_t>(std::count(cells.begin(), cells.end(), true)), level);
}

DyadicSet DyadicSet::refine(int to, std::size_t extent) const {
  if (to < level) throw Error(ErrorKind::InvalidArgument, "cannot coarsen a dyadic set");
  const int shift = to - level;
  DyadicSet out{to, std::vector<bool>(std::max(cells.size() << shift, extent), false)};
  for (std::size_t c = 0; c < out.cells.size(); ++c) {
    const auto parent = c >> shift;
    out.cells[c] = parent < cells.size() && cells[parent];
  }
  return out;
}

bool DyadicSet::empty() const { return std::none_of(cells.begin(), cells.end(), [](bool b) { return b; }); }

bool same_set(const DyadicSet& a, const DyadicSet& b) {
  const auto [x, y] = align(a, b);
  return x.cells == y.cells;
}

DyadicSet set_union(const DyadicSet& a, const DyadicSet& b) {
  auto [x, y] = align(a, b);
  for (std::size_t c = 0; c < x.cells.size(); ++c) x.cells[c] = x.cells[c] || y.cells[c];
  return x;
}

DyadicSet set_intersection(const DyadicSet& a, const DyadicSet& b) {
  auto [x, y] = align(a, b);
  for (std::size_t c = 0; c < x.cells.size(); ++c) x.cells[c] = x.cells[c] && y.cells[c];
  return x;
}

Rational symdiff_measure(const DyadicSet& a, const DyadicSet& b) {
  const auto [x, y] = align(a, b);
  std::uint64_t n = 0;
  for (std::size_t c = 0; c < x.cells.size(); ++c) n += x.cells[c] != y.cells[c];
  return dyadic(n, x.level);
}

int enumeration_stage(const BigInt& i) {
  if (i < 1) throw Error(ErrorKind::InvalidArgument, "enumeration starts at i = 1");
  if (i == 1) return 1;
  BigInt idx = i - 2;
  for (int s = 2;; ++s) {
    const BigInt size = pow2(static_cast<unsigned long>(s) << (s - 1));
    if (idx < size) return s;
    idx -= size;
  }
}

DyadicSet enumerate_A(const BigInt& i) {
  const int s = enumeration_stage(i);
  if (s == 1) return DyadicSet::interval(0, 0, 1);
  BigInt mask = i - 2;
  for (int t = 2; t < s; ++t) mask -= pow2(static_cast<unsigned long>(t) << (t - 1));
  DyadicSet out{s - 1, std::vector<bool>(cell_count(s - 1, static_cast<std::uint64_t>(s)), false)};
  for (std::size_t c = 0; c < out.cells.size(); ++c) out.cells[c] = mpz_tstbit(mask.get_mpz_t(), c) != 0;
  return out;
}

DyadicMap DyadicMap::identity(int k) {
  DyadicMap out{k, std::vector<std::uint32_t>(cell_count(k, static_cast<std::uint64_t>(k)))};
  for (std::uint32_t c = 0; c < out.perm.size(); ++c) out.perm[c] = c;
  return out;
}

void DyadicMap::validate() const {
  if (k < 0 || k > 24) throw Error(ErrorKind::InvalidArgument, "rank must lie in [0, 24]");
  if (perm.size() != cell_count(k, static_cast<std::uint64_t>(k))) {
    throw Error(ErrorKind::InvalidArgument, "rank " + std::to_string(k) + " needs " +
                                                std::to_string(cell_count(k, static_cast<std::uint64_t>(k))) +
                                                " cells, got " + std::to_string(perm.size()));
  }
  std::vector<bool> seen(perm.size(), false);
  for (const auto c : perm) {
    if (c >= perm.size() || seen[c]) throw Error(ErrorKind::InvalidArgument, "cell array is not a permutation");
    seen[c] = true;
  }
}

DyadicMap DyadicMap::inverse() const {
  DyadicMap out{k, std::vector<std::uint32_t>(perm.size())};
  for (std::uint32_t c = 0; c < perm.size(); ++c) out.perm[perm[c]] = c;
  return out;
}

DyadicMap DyadicMap::at_rank(int to) const {
  if (to < k) throw Error(ErrorKind::InvalidArgument, "cannot lower the rank of a map");
  DyadicMap out = identity(to);
  const int shift = to - k;
  const std::uint64_t moved = perm.size() << shift;
  for (std::uint64_t c = 0; c < moved; ++c) {
    out.perm[c] = static_cast<std::uint32_t>((std::uint64_t{perm[c >> shift]} << shift) | (c & ((1u << shift) - 1)));
  }
  return out;
}

DyadicSet DyadicMap::apply(const DyadicSet& a) const {
  const int level = std::max(a.level, k);
  const int shift = level - k;
  const std::uint64_t moved = perm.size() << shift;
  const DyadicSet src = a.refine(level, moved);
  DyadicSet out{level, std::vector<bool>(src.cells.size(), false)};
  for (std::uint64_t c = 0; c < src.cells.size(); ++c) {
    if (!src.cells[c]) continue;
    const auto dest =
        c < moved ? (std::uint64_t{perm[c >> shift]} << shift) | (c & ((std::uint64_t{1} << shift) - 1)) : c;
    out.cells[dest] = true;
  }
  return out;
}

DyadicMap compose(const DyadicMap& s, const DyadicMap& t) {
  const int k = std::max(s.k, t.k);
  const auto a = s.at_rank(k), b = t.at_rank(k);
  DyadicMap out{k, std::vector<std::uint32_t>(a.perm.size())};
  for (std::size_t c = 0; c < out.perm.size(); ++c) out.perm[c] = a.perm[b.perm[c]];
  return out;
}

Distance metric_d(const DyadicMap& s, const DyadicMap& t, std::uint64_t n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "N must be at least 1");
  const auto si = s.inverse(), ti = t.inverse();
  Distance out;
  for (std::uint64_t i = 1; i <= n; ++i) {
    const auto a = enumerate_A(BigInt(static_cast<unsigned long>(i)));
    const Rational term = symdiff_measure(t.apply(a), s.apply(a)) + symdiff_measure(ti.apply(a), si.apply(a));
    out.partial += term / pow2(static_cast<unsigned long>(i));
  }
  // Both maps fix everything beyond [0, K), so each term is at most 2K.
  const int big = std::max(s.k, t.k);
  out.tail = Rational(2 * big) / pow2(static_cast<unsigned long>(n));
  out.tail.canonicalize();
  return out;
}

bool disjoint(const PartitionColumn& c) {
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (!set_intersection(c[i], c[j]).empty()) return false;
  return true;
}

bool is_rokhlin_column(const DyadicMap& t, const PartitionColumn& c) {
  if (!disjoint(c)) return false;
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    if (!same_set(t.apply(c[i]), c[i + 1])) return false;
  return true;
}

CyclicVerdict cyclic_membership(const DyadicMap& t) {
  t.validate();
  CyclicVerdict out;
  if (t.perm.empty()) return out;
  PartitionColumn col;
  std::uint32_t c = 0;
  do {
    col.push_back(DyadicSet::interval(t.k, c, c + 1));
    c = t.perm[c];
  } while (c != 0);
  out.member = col.size() == t.perm.size();
  if (out.member) out.column = std::move(col);
  return out;
}

DyadicMap random_cyclic(int k, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  DyadicMap out = DyadicMap::identity(k);
  std::vector<std::uint32_t> order = out.perm;
  // Fisher-Yates with an explicit reduction so the result is the same on every platform.
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);
  for (std::size_t i = 0; i < order.size(); ++i) out.perm[order[i]] = order[(i + 1) % order.size()];
  return out;
}

Rational rho(const PartitionColumn& c, const PartitionColumn& d) {
  if (c.size() != d.size()) throw Error(ErrorKind::InvalidArgument, "rho needs columns with equally many levels");
  Rational total = 0;
  for (std::size_t i = 0; i < c.size(); ++i) total += symdiff_measure(c[i], d[i]);
  return total;
}

Rational partition_P(const PartitionColumn& c, const PartitionColumn& d) {
  if (!disjoint(d)) throw Error(ErrorKind::InvalidArgument, "D must consist of disjoint pieces");
  // Pieces of D are disjoint, so ρ(C, D') splits into one independent choice per piece:
  // adding piece p to level i changes μ(A_i Δ D'_i) by μ(p) - 2 μ(p ∩ A_i).
  Rational total = 0;
  for (const auto& a : c) total += a.measure();
  for (const auto& p : d) {
    Rational best = 0;
    const Rational mp = p.measure();
    for (const auto& a : c) best = std::min(best, Rational(mp - 2 * set_intersection(p, a).measure()));
    total += best;
  }
  return total;
}

Rational partition_P_T(const PartitionColumn& c, const PartitionColumn& d, const DyadicMap& t,
                       std::size_t max_pieces) {
  if (d.size() > max_pieces) {
    throw Error(ErrorKind::BudgetExceeded, std::to_string(d.size()) + " pieces exceed the limit of " +
                                               std::to_string(max_pieces));
  }
  if (!disjoint(d)) throw Error(ErrorKind::InvalidArgument, "D must consist of disjoint pieces");
  std::vector<Rational> piece_measure;
  for (const auto& p : d) piece_measure.push_back(p.measure());
  // A set is a union of pieces of D when its measure equals the sum over the pieces it meets fully.
  auto union_of_pieces = [&](const DyadicSet& s) {
    Rational covered = 0;
    for (std::size_t j = 0; j < d.size(); ++j) {
      const Rational in = set_intersection(s, d[j]).measure();
      if (in != 0 && in != piece_measure[j]) return false;
      covered += in;
    }
    return covered == s.measure();
  };
  // A Rokhlin column D' is fixed by its first level G, a union of pieces of D.
  std::optional<Rational> best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d.size()); ++mask) {
    DyadicSet g{0, {}};
    for (std::size_t j = 0; j < d.size(); ++j)
      if (mask >> j & 1) g = set_union(g, d[j]);
    PartitionColumn col{g};
    bool ok = true;
    for (std::size_t i = 1; i < c.size() && ok; ++i) {
      col.push_back(t.apply(col.back()));
      ok = union_of_pieces(col.back());
    }
    if (!ok || !disjoint(col)) continue;
    col.resize(c.size(), DyadicSet{0, {}});
    const Rational r = rho(c, col);
    if (!best || r < *best) best = r;
  }
  return *best;
}

}  // namespace rankone
