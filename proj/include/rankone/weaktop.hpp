#pragma once

#include "rankone/numeric.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace rankone {

/// A finite union of dyadic cells [c 2^-level, (c+1) 2^-level), c < cells.size().
struct DyadicSet {
  int level = 0;
  std::vector<bool> cells;

  static DyadicSet interval(int level, std::uint64_t first, std::uint64_t last);  // cells [first, last)
  Rational measure() const;
  /// The same set on cells of length 2^-to (to >= level) covering at least `extent` of them.
  DyadicSet refine(int to, std::size_t extent = 0) const;
  bool empty() const;
};

bool same_set(const DyadicSet& a, const DyadicSet& b);
DyadicSet set_union(const DyadicSet& a, const DyadicSet& b);
DyadicSet set_intersection(const DyadicSet& a, const DyadicSet& b);
Rational symdiff_measure(const DyadicSet& a, const DyadicSet& b);

/// A_i of the staged enumeration: A_1 = [0, 1), then for each stage s >= 2 every
/// union of cells of length 2^-(s-1) in [0, s), in little-endian bitmask order.
DyadicSet enumerate_A(const BigInt& i);
/// Stage that index i falls in.
int enumeration_stage(const BigInt& i);

/// Permutation of the k 2^k cells of length 2^-k in [0, k); the identity beyond.
struct DyadicMap {
  int k = 0;
  std::vector<std::uint32_t> perm;

  static DyadicMap identity(int k);
  /// Throws InvalidArgument unless perm is a bijection of the right size.
  void validate() const;
  DyadicMap inverse() const;
  DyadicMap at_rank(int k) const;  // same map on finer cells, k >= this->k
  DyadicSet apply(const DyadicSet& a) const;
  bool operator==(const DyadicMap&) const = default;
};

/// (s t)(x) = s(t(x)) at the larger of the two ranks.
DyadicMap compose(const DyadicMap& s, const DyadicMap& t);

struct Distance {
  Rational partial;  // Σ_{i<=N} 2^-i (μ(T A_i Δ S A_i) + μ(T^-1 A_i Δ S^-1 A_i))
  Rational tail;     // bound on the remaining terms
};

Distance metric_d(const DyadicMap& s, const DyadicMap& t, std::uint64_t n);

using PartitionColumn = std::vector<DyadicSet>;

/// Pieces are pairwise disjoint.
bool disjoint(const PartitionColumn& c);
/// T(A_i) = A_{i+1} for every consecutive pair.
bool is_rokhlin_column(const DyadicMap& t, const PartitionColumn& c);

struct CyclicVerdict {
  bool member = false;
  std::optional<PartitionColumn> column;  // the cycle from cell 0, one cell per level
};

CyclicVerdict cyclic_membership(const DyadicMap& t);
DyadicMap random_cyclic(int k, std::uint64_t seed);

/// Σ μ(A_i Δ B_i); throws InvalidArgument on different lengths.
Rational rho(const PartitionColumn& c, const PartitionColumn& d);
/// min ρ(C, D') over D' <= D with |D'| = |C| (pieces of D' are unions of pieces of D,
/// not every piece of D need be used). D must be disjoint.
Rational partition_P(const PartitionColumn& c, const PartitionColumn& d);
/// As partition_P, restricted to D' that are Rokhlin columns for T.
/// Throws BudgetExceeded when |D| exceeds `max_pieces`.
Rational partition_P_T(const PartitionColumn& c, const PartitionColumn& d, const DyadicMap& t,
                       std::size_t max_pieces = 12);

}  // namespace rankone
