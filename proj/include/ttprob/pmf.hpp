#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

namespace ttprob {

inline constexpr double kDefaultTruncation = 1e-12;

// Distribution over consecutive integers starting at `offset`. Mass beyond the
// last stored value is not materialized; its total is `tail`.
struct Pmf {
  int offset = 0;
  std::vector<double> mass;
  double tail = 0.0;

  double at(int value) const noexcept {
    const long idx = static_cast<long>(value) - offset;
    if (idx < 0 || idx >= static_cast<long>(mass.size())) return 0.0;
    return mass[static_cast<std::size_t>(idx)];
  }

  int max_value() const noexcept { return offset + static_cast<int>(mass.size()) - 1; }

  double stored_mass() const noexcept { return std::accumulate(mass.begin(), mass.end(), 0.0); }

  /// Raw moment sum_{stored} v^k p(v); the tail is not included.
  double raw_moment(int k) const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
      double v = 1.0;
      for (int e = 0; e < k; ++e) v *= static_cast<double>(offset + static_cast<int>(i));
      s += v * mass[i];
    }
    return s;
  }

  /// Mean of the stored part, renormalized by the stored mass.
  double truncated_mean() const noexcept { return raw_moment(1) / stored_mass(); }

  double truncated_variance() const noexcept {
    const double z = stored_mass();
    const double mu = raw_moment(1) / z;
    return raw_moment(2) / z - mu * mu;
  }

  void add(int value, double p) {
    if (mass.empty()) offset = value;
    if (value < offset) {
      mass.insert(mass.begin(), static_cast<std::size_t>(offset - value), 0.0);
      offset = value;
    }
    const std::size_t idx = static_cast<std::size_t>(value - offset);
    if (idx >= mass.size()) mass.resize(idx + 1, 0.0);
    mass[idx] += p;
  }
};

/// Law of X + Y for independent (possibly defective) X, Y. Any pair of
/// outcomes with one side in a tail lands in the tail of the result.
inline Pmf convolve(const Pmf& x, const Pmf& y) {
  Pmf out;
  const double sx = x.stored_mass();
  const double sy = y.stored_mass();
  out.tail = sx * y.tail + x.tail * sy + x.tail * y.tail;
  if (x.mass.empty() || y.mass.empty()) return out;
  out.offset = x.offset + y.offset;
  out.mass.assign(x.mass.size() + y.mass.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.mass.size(); ++i) {
    if (x.mass[i] == 0.0) continue;
    for (std::size_t k = 0; k < y.mass.size(); ++k) out.mass[i + k] += x.mass[i] * y.mass[k];
  }
  return out;
}

}  // namespace ttprob
