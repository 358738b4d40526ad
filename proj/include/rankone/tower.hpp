#pragma once

#include "rankone/height_list.hpp"
#include "rankone/numeric.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rankone {

enum class Family { HajianKakutani, Ztmr, Steep5 };

const char* to_string(Family family);
Family parse_family(const std::string& name);

inline constexpr int kDefaultMaxStage = 24;
inline constexpr std::uint64_t kDefaultElementBudget = std::uint64_t{1} << 24;

/// Generative description of a rank-one cutting-and-stacking construction.
struct ConstructionSpec {
  enum class Kind { Explicit, Family };

  Kind kind = Kind::Explicit;

  // Explicit tables: cuts[n] = r_n, spacers[n][k] = s_{n,k}. When cyclic is
  // set the table repeats with period cuts.size().
  std::vector<std::int64_t> cuts;
  std::vector<std::vector<BigInt>> spacers;
  bool cyclic = false;

  Family family = Family::HajianKakutani;

  Rational base_width{1};
  int max_stage = kDefaultMaxStage;

  static ConstructionSpec explicit_table(std::vector<std::int64_t> cuts,
                                         std::vector<std::vector<BigInt>> spacers);
  static ConstructionSpec named(Family family);

  /// Throws InvalidSpec on r_n < 2, negative spacers, ragged rows or a bad width.
  void validate() const;

  /// Highest stage index whose cut data exists (bounded by max_stage).
  int last_stage() const;

  std::string id() const;
};

/// Height set of a named family at stage n, straight from its closed form.
std::vector<BigInt> family_height_set(Family family, int n);

/// Snapshot of column C_n.
struct TowerStage {
  int n = 0;
  BigInt height;                   // h_n
  Rational width;                  // w_n
  std::int64_t cuts = 0;           // r_n
  std::vector<BigInt> spacers;     // s_{n,k}, k < r_n
  std::vector<BigInt> height_set;  // H_n
  BigInt max_descendant;           // M_n = max D(I, n)
};

/// Memoized, thread-safe view of the stages of one construction.
///
/// Stages are built at most once and never mutated afterwards; references
/// returned by stage() stay valid for the lifetime of the Tower.
class Tower {
 public:
  explicit Tower(ConstructionSpec spec, std::uint64_t element_budget = kDefaultElementBudget);

  Tower(const Tower&) = delete;
  Tower& operator=(const Tower&) = delete;

  const ConstructionSpec& spec() const { return spec_; }
  std::uint64_t element_budget() const { return element_budget_; }
  int last_stage() const { return spec_.last_stage(); }

  /// Throws BudgetExceeded past last_stage().
  const TowerStage& stage(int n) const;

  const BigInt& height(int n) const { return stage(n).height; }
  const Rational& width(int n) const { return stage(n).width; }
  const BigInt& max_descendant(int n) const { return stage(n).max_descendant; }

  /// r_j * r_{j+1} * ... * r_{N-1}.
  BigInt product_of_cuts(int j, int n) const;

  /// H_j (+) H_{j+1} (+) ... (+) H_{N-1}, cached. Budget-checked.
  const HeightList& relative_sumset(int j, int n) const;

 private:
  ConstructionSpec spec_;
  std::uint64_t element_budget_;
  mutable std::mutex mutex_;
  mutable std::vector<std::unique_ptr<TowerStage>> stages_;
  mutable std::map<std::pair<int, int>, std::unique_ptr<HeightList>> sumsets_;

  void extend_locked(int n) const;
};

/// Builds stage n of spec from scratch.
TowerStage build_stage(const ConstructionSpec& spec, int n);

/// Reconstructs the spacer table from height sets H_n and next heights h_{n+1}.
/// Heights h_n are taken as h_0 = 1 and h_n = next_heights[n-1]. Throws
/// Infeasible when some consecutive gap of H_n is smaller than h_n.
std::vector<std::vector<BigInt>> spacers_from_heightsets(std::span<const std::vector<BigInt>> height_sets,
                                                         std::span<const BigInt> next_heights);

/// Union of levels of one column C_j, given by their heights.
struct LevelSet {
  int column = 0;
  std::vector<BigInt> heights;  // sorted, distinct, each < h_column

  static LevelSet base(int column) { return {column, {BigInt(0)}}; }
  static LevelSet level(int column, BigInt height) { return {column, {std::move(height)}}; }

  /// Throws InvalidArgument if heights are unsorted, repeated or out of the column.
  void validate(const Tower& tower) const;
  Rational measure(const Tower& tower) const;
  /// The same set expressed as levels of C_m, m >= column.
  LevelSet refine(const Tower& tower, int m) const;
};

struct NormalityEvidence {
  int checked_stages = 0;
  std::vector<int> witnesses;  // n with s_{n, r_n - 1} > 0
};

NormalityEvidence is_normal_upto(const Tower& tower, int n);

struct SteepnessVerdict {
  bool pass = true;
  std::optional<std::pair<BigInt, BigInt>> violation;  // first (t_i, t_{i+1})
};

SteepnessVerdict is_steep_upto(const Tower& tower, int n, const Rational& factor = Rational(5));

}  // namespace rankone
