#pragma once

#include "rankone/numeric.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace rankone {

/// Sorted list of distinct integer heights.
///
/// Stored as int64 whenever every element has magnitude below 2^61, so that
/// sums and differences of two elements cannot overflow; otherwise as BigInt.
/// Algorithms dispatch on the representation through visit().
class HeightList {
 public:
  using Narrow = std::vector<std::int64_t>;
  using Wide = std::vector<BigInt>;

  static constexpr std::int64_t kNarrowLimit = std::int64_t{1} << 61;

  HeightList() = default;
  /// Takes a sorted, duplicate-free vector.
  explicit HeightList(Wide values);
  explicit HeightList(Narrow values) : data_(std::move(values)) {}

  static bool fits_narrow(const BigInt& value);

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  bool narrow() const { return std::holds_alternative<Narrow>(data_); }
  BigInt at(std::size_t i) const;
  BigInt front() const { return at(0); }
  BigInt back() const { return at(size() - 1); }
  Wide to_vector() const;

  template <class F>
  decltype(auto) visit(F&& f) const {
    return std::visit(std::forward<F>(f), data_);
  }

  friend bool operator==(const HeightList& a, const HeightList& b) { return a.to_vector() == b.to_vector(); }

 private:
  std::variant<Narrow, Wide> data_;
};

}  // namespace rankone
