#include "rankone/height_list.hpp"

namespace rankone {

bool HeightList::fits_narrow(const BigInt& value) {
  const auto v = to_int64(value);
  return v && *v < kNarrowLimit && *v > -kNarrowLimit;
}

HeightList::HeightList(Wide values) {
  bool all_narrow = true;
  for (const auto& v : values) {
    if (!fits_narrow(v)) {
      all_narrow = false;
      break;
    }
  }
  if (!all_narrow) {
    data_ = std::move(values);
    return;
  }
  Narrow narrow_values;
  narrow_values.reserve(values.size());
  for (const auto& v : values) narrow_values.push_back(v.get_si());
  data_ = std::move(narrow_values);
}

std::size_t HeightList::size() const {
  return visit([](const auto& v) { return v.size(); });
}

BigInt HeightList::at(std::size_t i) const {
  return visit([i](const auto& v) -> BigInt {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Narrow>) {
      return BigInt(static_cast<long>(v.at(i)));
    } else {
      return v.at(i);
    }
  });
}

HeightList::Wide HeightList::to_vector() const {
  return visit([](const auto& v) -> Wide {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Narrow>) {
      Wide out;
      out.reserve(v.size());
      for (auto x : v) out.emplace_back(static_cast<long>(x));
      return out;
    } else {
      return v;
    }
  });
}

}  // namespace rankone
