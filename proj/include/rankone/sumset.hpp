#pragma once

#include "rankone/height_list.hpp"
#include "rankone/tower.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace rankone {

/// D(J, N) = h(J) + H_j (+) ... (+) H_{N-1}.
struct DescendantSet {
  int column = 0;
  BigInt base_height;
  int stage = 0;
  HeightList heights;

  std::size_t size() const { return heights.size(); }
};

/// J must be a single level. Throws BudgetExceeded when |D| exceeds the tower's element budget.
DescendantSet descendant_set(const Tower& tower, const LevelSet& level, int n);

/// |D ∩ (k + D)|.
BigInt intersect_count(const HeightList& d, const BigInt& k);
/// |D ∩ (s_1 + D) ∩ ... ∩ (s_p + D)|; shifts nonnegative and sorted.
BigInt multi_intersect_count(const HeightList& d, std::span<const BigInt> shifts);

/// One difference e - e' of H_n together with its multiplicity.
struct Difference {
  BigInt value;
  std::int64_t matches = 0;
};

/// D_n = H_n - H_n, sorted, with match counts.
std::vector<Difference> difference_set(const Tower& tower, int n);

struct ShiftDecomposition {
  BigInt shift;
  int first_stage = 0;               // digits[i] belongs to stage first_stage + i
  std::vector<BigInt> digits;        // d_i in D_i
  std::vector<std::int64_t> matches; // m_i

  BigInt match_product() const;
};

inline constexpr std::uint64_t kDefaultNodeBudget = std::uint64_t{1} << 22;

/// Finds d_j + ... + d_{N-1} = k with d_i in D_i, searching the top stage first
/// and taking the smallest feasible digit first. Returns nullopt when k has no
/// representation. Throws BudgetExceeded after node_budget search nodes.
std::optional<ShiftDecomposition> decompose_shift(const Tower& tower, const BigInt& k, int n, int first_stage = 0,
                                                  std::uint64_t node_budget = kDefaultNodeBudget);

struct UniquenessVerdict {
  bool pass = true;
  BigInt shift;  // the sum with two representations, on failure
  std::optional<std::pair<std::vector<BigInt>, std::vector<BigInt>>> counterexample;
};

/// Brute force over all tuples of D_j x ... x D_{N-1}.
UniquenessVerdict uniqueness_check(const Tower& tower, int n, int first_stage = 0,
                                   std::uint64_t budget = kDefaultElementBudget);

/// Structural certificate for unique representation over stages [j, N): the
/// smallest gap inside D_i exceeds 2 (max H_j + ... + max H_{i-1}) for every i.
bool scale_separated(const Tower& tower, int first_stage, int n);

/// |S ∩ (t + S)| for S = H_j (+) ... (+) H_{N-1}, reusable across many t.
///
/// Uses the product of match counts when scale_separated holds (no
/// materialization), otherwise merge counting on S within the element budget.
class ShiftCounter {
 public:
  ShiftCounter(const Tower& tower, int first_stage, int n);

  BigInt count(const BigInt& t) const;
  bool by_decomposition() const { return set_ == nullptr; }

 private:
  const HeightList* set_ = nullptr;
  std::vector<std::vector<Difference>> diffs_;
  std::vector<BigInt> reach_;
  // int64 mirror of diffs_/reach_, filled when every partial sum fits.
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> narrow_diffs_;
  std::vector<std::int64_t> narrow_reach_;

  bool search(int i, const BigInt& rem, std::vector<std::int64_t>& matches) const;
  bool search_narrow(int i, std::int64_t rem, std::vector<std::int64_t>& matches) const;
};

BigInt shift_count(const Tower& tower, int first_stage, int n, const BigInt& t);

/// #{s in S : s >= theta} for S = H_j (+) ... (+) H_{N-1}, without materializing S.
BigInt count_at_least(const Tower& tower, int first_stage, int n, const BigInt& theta);

enum class DoubleDifference { CertifiedAbsent, Present, AbsentAtStage, Unknown };
const char* to_string(DoubleDifference verdict);

struct DoubleDifferenceVerdict {
  DoubleDifference status = DoubleDifference::Unknown;
  BigInt gcd;  // gcd of the entries of H_j, ..., H_{N-1}
};

/// Decides whether 1 lies in (D - D) - (D - D) for D = D(base of C_j, N).
DoubleDifferenceVerdict double_difference_certificate(const Tower& tower, int first_stage, int n,
                                                      std::uint64_t budget = kDefaultElementBudget);

struct SupportEntry {
  BigInt shift;
  BigInt count;
};

/// Every k >= 0 with |D ∩ (k + D)| > 0 for D = D(base of C_j, N), sorted.
std::vector<SupportEntry> support_enumerate(const Tower& tower, int first_stage, int n,
                                            std::uint64_t budget = kDefaultElementBudget);

void write_heights(std::ostream& out, const HeightList& heights);
void write_support_csv(std::ostream& out, const std::vector<SupportEntry>& support);

}  // namespace rankone
