#include "rankone/tower.hpp"

#include "rankone/error.hpp"

#include <algorithm>
#include <sstream>

namespace rankone {

const char* to_string(Family family) {
  switch (family) {
    case Family::HajianKakutani: return "hajian_kakutani";
    case Family::Ztmr: return "ztmr";
    case Family::Steep5: return "steep5";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  if (name == "hajian_kakutani") return Family::HajianKakutani;
  if (name == "ztmr") return Family::Ztmr;
  if (name == "steep5") return Family::Steep5;
  throw Error(ErrorKind::InvalidSpec, "unknown family '" + name + "'");
}

ConstructionSpec ConstructionSpec::explicit_table(std::vector<std::int64_t> cuts,
                                                  std::vector<std::vector<BigInt>> spacers) {
  ConstructionSpec spec;
  spec.kind = Kind::Explicit;
  spec.cuts = std::move(cuts);
  spec.spacers = std::move(spacers);
  return spec;
}

ConstructionSpec ConstructionSpec::named(Family family) {
  ConstructionSpec spec;
  spec.kind = Kind::Family;
  spec.family = family;
  return spec;
}

void ConstructionSpec::validate() const {
  if (base_width <= 0) throw Error(ErrorKind::InvalidSpec, "base_width must be positive");
  if (max_stage < 0) throw Error(ErrorKind::InvalidSpec, "max_stage must be nonnegative");
  if (kind == Kind::Family) return;
  if (cuts.empty()) throw Error(ErrorKind::InvalidSpec, "explicit spec needs at least one stage");
  if (cuts.size() != spacers.size()) {
    throw Error(ErrorKind::InvalidSpec, "cuts and spacers tables differ in length");
  }
  for (std::size_t n = 0; n < cuts.size(); ++n) {
    if (cuts[n] < 2) {
      throw Error(ErrorKind::InvalidSpec, "r_" + std::to_string(n) + " = " + std::to_string(cuts[n]) +
                                              " violates r_n >= 2 (each column is cut into at least two subcolumns)");
    }
    if (spacers[n].size() != static_cast<std::size_t>(cuts[n])) {
      throw Error(ErrorKind::InvalidSpec, "stage " + std::to_string(n) + " lists " +
                                              std::to_string(spacers[n].size()) + " spacer counts for " +
                                              std::to_string(cuts[n]) + " subcolumns");
    }
    for (std::size_t k = 0; k < spacers[n].size(); ++k) {
      if (spacers[n][k] < 0) {
        throw Error(ErrorKind::InvalidSpec,
                    "negative spacer count s_" + std::to_string(n) + "," + std::to_string(k));
      }
    }
  }
}

int ConstructionSpec::last_stage() const {
  if (kind == Kind::Family || cyclic) return max_stage;
  return std::min(max_stage, static_cast<int>(cuts.size()) - 1);
}

std::string ConstructionSpec::id() const {
  if (kind == Kind::Family) return to_string(family);
  std::ostringstream out;
  out << "explicit[";
  for (std::size_t n = 0; n < cuts.size(); ++n) {
    if (n) out << ';';
    for (std::size_t k = 0; k < spacers[n].size(); ++k) out << (k ? "," : "") << spacers[n][k].get_str();
  }
  out << ']';
  if (cyclic) out << "*";
  return out.str();
}

std::vector<BigInt> family_height_set(Family family, int n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative stage");
  std::vector<BigInt> out{BigInt(0)};
  const auto tri = static_cast<unsigned long>(n) * static_cast<unsigned long>(n + 1) / 2;
  switch (family) {
    case Family::HajianKakutani:
      out.push_back(pow_big(4, static_cast<unsigned long>(n)));
      break;
    case Family::Steep5:
      for (int j = 0; j <= n; ++j) out.push_back(pow_big(5, tri + j));
      break;
    case Family::Ztmr: {
      const auto c = ceil_sqrt(n);
      const BigInt unit = pow_big(5, tri);
      for (std::int64_t i = 1; i <= c; ++i) out.push_back(unit * static_cast<long>(i));
      for (std::int64_t j = c; j <= n; ++j) out.push_back(pow_big(5, tri + static_cast<unsigned long>(j)));
      break;
    }
  }
  return out;
}

namespace {

std::vector<BigInt> height_set_from_spacers(const BigInt& height, const std::vector<BigInt>& spacers) {
  std::vector<BigInt> out{BigInt(0)};
  BigInt running = 0;
  for (std::size_t k = 0; k + 1 < spacers.size(); ++k) {
    running += height + spacers[k];
    out.push_back(running);
  }
  return out;
}

// Cut count and spacer row for stage n, given its height h_n.
std::pair<std::int64_t, std::vector<BigInt>> stage_rule(const ConstructionSpec& spec, int n, const BigInt& height) {
  if (spec.kind == ConstructionSpec::Kind::Explicit) {
    const auto idx = static_cast<std::size_t>(n) % spec.cuts.size();
    return {spec.cuts[idx], spec.spacers[idx]};
  }
  const auto here = family_height_set(spec.family, n);
  const auto next = family_height_set(spec.family, n + 1);
  // h_{n+1} is the smallest nonzero entry of H_{n+1}: the first subcolumn never carries spacers.
  std::vector<BigInt> spacers;
  spacers.reserve(here.size());
  for (std::size_t k = 0; k + 1 < here.size(); ++k) spacers.push_back(here[k + 1] - here[k] - height);
  spacers.push_back(next.at(1) - here.back() - height);
  for (std::size_t k = 0; k < spacers.size(); ++k) {
    if (spacers[k] < 0) {
      throw Error(ErrorKind::InvalidSpec, std::string(to_string(spec.family)) + " stage " + std::to_string(n) +
                                              " needs a negative spacer at subcolumn " + std::to_string(k));
    }
  }
  if (spacers.front() != 0) {
    throw Error(ErrorKind::InvalidSpec, std::string(to_string(spec.family)) + " stage " + std::to_string(n) +
                                            " would need spacers above the first subcolumn");
  }
  return {static_cast<std::int64_t>(here.size()), std::move(spacers)};
}

}  // namespace

Tower::Tower(ConstructionSpec spec, std::uint64_t element_budget)
    : spec_(std::move(spec)), element_budget_(element_budget) {
  spec_.validate();
}

void Tower::extend_locked(int n) const {
  while (static_cast<int>(stages_.size()) <= n) {
    const int i = static_cast<int>(stages_.size());
    auto st = std::make_unique<TowerStage>();
    st->n = i;
    if (i == 0) {
      st->height = 1;
      st->width = spec_.base_width;
      st->max_descendant = 0;
    } else {
      const TowerStage& prev = *stages_.back();
      st->height = 0;
      for (const auto& s : prev.spacers) st->height += prev.height + s;
      st->width = prev.width / Rational(static_cast<long>(prev.cuts));
      st->max_descendant = prev.max_descendant + prev.height_set.back();
    }
    auto [cuts, spacers] = stage_rule(spec_, i, st->height);
    st->cuts = cuts;
    st->spacers = std::move(spacers);
    st->height_set = height_set_from_spacers(st->height, st->spacers);
    if (static_cast<std::int64_t>(st->height_set.size()) != st->cuts) {
      throw Error(ErrorKind::InvalidSpec, "stage " + std::to_string(i) + ": |H_n| != r_n");
    }
    if (spec_.kind == ConstructionSpec::Kind::Family &&
        st->height_set != family_height_set(spec_.family, i)) {
      throw Error(ErrorKind::InvalidSpec, "stage " + std::to_string(i) + ": spacer reconstruction diverged");
    }
    stages_.push_back(std::move(st));
  }
}

const TowerStage& Tower::stage(int n) const {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative stage index");
  if (n > last_stage()) {
    throw Error(ErrorKind::BudgetExceeded,
                "stage " + std::to_string(n) + " is beyond the stage budget " + std::to_string(last_stage()));
  }
  std::lock_guard lock(mutex_);
  extend_locked(n);
  return *stages_[static_cast<std::size_t>(n)];
}

BigInt Tower::product_of_cuts(int j, int n) const {
  BigInt out = 1;
  for (int i = j; i < n; ++i) out *= static_cast<long>(stage(i).cuts);
  return out;
}

namespace {

template <class T>
std::vector<T> expand(const std::vector<T>& current, const std::vector<T>& height_set) {
  // current lies in [0, h_i) and consecutive entries of H_i are >= h_i apart,
  // so offset-major order is already sorted.
  std::vector<T> out;
  out.reserve(current.size() * height_set.size());
  for (const auto& e : height_set) {
    for (const auto& x : current) out.push_back(x + e);
  }
  return out;
}

}  // namespace

const HeightList& Tower::relative_sumset(int j, int n) const {
  if (j < 0 || n < j) throw Error(ErrorKind::InvalidArgument, "relative_sumset needs 0 <= j <= N");
  const BigInt count = product_of_cuts(j, n);
  if (count > BigInt(static_cast<unsigned long>(element_budget_))) {
    throw Error(ErrorKind::BudgetExceeded, "descendant set of size " + count.get_str() +
                                               " exceeds the element budget; use decomposition counting");
  }
  // Every element is at most M_N; stage N itself need not exist.
  const BigInt top = n == 0 ? BigInt(0) : BigInt(max_descendant(n - 1) + stage(n - 1).height_set.back());
  std::lock_guard lock(mutex_);
  if (auto it = sumsets_.find({j, n}); it != sumsets_.end()) return *it->second;

  std::unique_ptr<HeightList> built;
  if (HeightList::fits_narrow(top)) {
    std::vector<std::int64_t> cur{0};
    for (int i = j; i < n; ++i) {
      std::vector<std::int64_t> hs;
      for (const auto& e : stages_[static_cast<std::size_t>(i)]->height_set) hs.push_back(e.get_si());
      cur = expand(cur, hs);
    }
    built = std::make_unique<HeightList>(std::move(cur));
  } else {
    std::vector<BigInt> cur{BigInt(0)};
    for (int i = j; i < n; ++i) cur = expand(cur, stages_[static_cast<std::size_t>(i)]->height_set);
    built = std::make_unique<HeightList>(HeightList::Wide(std::move(cur)));
  }
  auto [it, inserted] = sumsets_.emplace(std::make_pair(j, n), std::move(built));
  return *it->second;
}

TowerStage build_stage(const ConstructionSpec& spec, int n) {
  Tower tower(spec);
  return tower.stage(n);
}

std::vector<std::vector<BigInt>> spacers_from_heightsets(std::span<const std::vector<BigInt>> height_sets,
                                                         std::span<const BigInt> next_heights) {
  if (height_sets.size() != next_heights.size()) {
    throw Error(ErrorKind::InvalidArgument, "need one next height per height set");
  }
  std::vector<std::vector<BigInt>> table;
  BigInt height = 1;
  for (std::size_t n = 0; n < height_sets.size(); ++n) {
    const auto& h = height_sets[n];
    if (h.size() < 2 || h.front() != 0) {
      throw Error(ErrorKind::InvalidSpec, "H_" + std::to_string(n) + " must start at 0 and have at least 2 entries");
    }
    std::vector<BigInt> row;
    for (std::size_t k = 0; k + 1 < h.size(); ++k) {
      if (h[k + 1] <= h[k]) throw Error(ErrorKind::InvalidSpec, "H_" + std::to_string(n) + " not increasing");
      BigInt s = h[k + 1] - h[k] - height;
      if (s < 0) {
        throw Error(ErrorKind::Infeasible, "gap " + BigInt(h[k + 1] - h[k]).get_str() + " in H_" +
                                               std::to_string(n) + " is smaller than h_" + std::to_string(n) +
                                               " = " + height.get_str());
      }
      row.push_back(std::move(s));
    }
    BigInt last = next_heights[n] - h.back() - height;
    if (last < 0) {
      throw Error(ErrorKind::Infeasible, "h_" + std::to_string(n + 1) + " = " + next_heights[n].get_str() +
                                             " is below max(H_n) + h_n");
    }
    row.push_back(std::move(last));
    table.push_back(std::move(row));
    height = next_heights[n];
  }
  return table;
}

void LevelSet::validate(const Tower& tower) const {
  const BigInt& h = tower.height(column);
  for (std::size_t i = 0; i < heights.size(); ++i) {
    if (heights[i] < 0 || heights[i] >= h) {
      throw Error(ErrorKind::InvalidArgument, "level " + heights[i].get_str() + " is outside column C_" +
                                                  std::to_string(column));
    }
    if (i > 0 && heights[i] <= heights[i - 1]) {
      throw Error(ErrorKind::InvalidArgument, "level heights must be sorted and distinct");
    }
  }
}

Rational LevelSet::measure(const Tower& tower) const {
  return tower.width(column) * Rational(static_cast<unsigned long>(heights.size()));
}

LevelSet LevelSet::refine(const Tower& tower, int m) const {
  if (m < column) throw Error(ErrorKind::InvalidArgument, "cannot refine to a coarser column");
  const auto rel = tower.relative_sumset(column, m).to_vector();
  LevelSet out{m, {}};
  out.heights.reserve(heights.size() * rel.size());
  for (const auto& a : heights) {
    for (const auto& s : rel) out.heights.push_back(a + s);
  }
  std::sort(out.heights.begin(), out.heights.end());
  return out;
}

NormalityEvidence is_normal_upto(const Tower& tower, int n) {
  NormalityEvidence out;
  out.checked_stages = n;
  for (int i = 0; i < n; ++i) {
    if (tower.stage(i).spacers.back() > 0) out.witnesses.push_back(i);
  }
  return out;
}

SteepnessVerdict is_steep_upto(const Tower& tower, int n, const Rational& factor) {
  std::vector<BigInt> merged;
  for (int i = 0; i < n; ++i) {
    const auto& hs = tower.stage(i).height_set;
    merged.insert(merged.end(), hs.begin() + 1, hs.end());
  }
  std::sort(merged.begin(), merged.end());
  SteepnessVerdict out;
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    if (Rational(merged[i + 1]) < factor * Rational(merged[i])) {
      out.pass = false;
      out.violation = std::make_pair(merged[i], merged[i + 1]);
      break;
    }
  }
  return out;
}

}  // namespace rankone
