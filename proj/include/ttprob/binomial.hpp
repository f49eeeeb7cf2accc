#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace ttprob {

namespace detail {

inline constexpr int kPascalRows = 512;

// Rows 0..kPascalRows-1 of Pascal's triangle, built once by addition in long
// double. Entries up to C(63, k) are exact; larger ones carry a few ulps.
class PascalTable {
 public:
  static const PascalTable& instance() {
    static const PascalTable table;
    return table;
  }

  long double get(int row, int k) const noexcept {
    return values_[offset(row) + static_cast<std::size_t>(k)];
  }

 private:
  PascalTable() {
    values_.resize(offset(kPascalRows));
    for (int row = 0; row < kPascalRows; ++row) {
      values_[offset(row)] = 1.0L;
      values_[offset(row) + row] = 1.0L;
      for (int k = 1; k < row; ++k) {
        values_[offset(row) + k] = values_[offset(row - 1) + k - 1] + values_[offset(row - 1) + k];
      }
    }
  }

  static constexpr std::size_t offset(int row) noexcept {
    return static_cast<std::size_t>(row) * (row + 1) / 2;
  }

  std::vector<long double> values_;
};

}  // namespace detail

/// C(n, k); zero outside 0 <= k <= n.
inline long double binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0.0L;
  if (n < detail::kPascalRows) return detail::PascalTable::instance().get(n, k);
  if (k > n - k) k = n - k;
  long double c = 1.0L;
  for (int i = 1; i <= k; ++i) c = c * static_cast<long double>(n - k + i) / i;
  return c;
}

/// base^exp with 0^0 = 1.
inline long double ipow(long double base, int exp) {
  if (exp == 0) return 1.0L;
  return std::pow(base, static_cast<long double>(exp));
}

}  // namespace ttprob
