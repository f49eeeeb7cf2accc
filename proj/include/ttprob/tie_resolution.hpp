#pragma once

#include <cmath>
#include <utility>

#include "ttprob/pmf.hpp"
#include "ttprob/scoring.hpp"

namespace ttprob {

// After (n-1, n-1) the rallies group into pairs, one served by each player.
// A pair is won outright by A, won outright by B, or split (back to level).
struct TieParameters {
  double win_pair_a = 0.0;
  double win_pair_b = 0.0;
  double continue_pair = 1.0;

  explicit TieParameters(const RallyModel& model)
      : win_pair_a(model.p_a() * (1.0 - model.p_b())),
        win_pair_b((1.0 - model.p_a()) * model.p_b()),
        continue_pair((1.0 - model.p_a()) * (1.0 - model.p_b()) + model.p_a() * model.p_b()) {}

  /// Probability a pair ends the set.
  double resolve_pair() const noexcept { return win_pair_a + win_pair_b; }

  /// p_a = p_b = 1 or p_a = p_b = 0: every pair splits forever.
  bool stuck() const noexcept { return resolve_pair() == 0.0; }
};

namespace detail {
inline void require_resolving(const TieParameters& t) {
  if (t.stuck()) throw DomainError("tie never resolves: every post-tie pair is split");
}
}  // namespace detail

/// (P[A wins from the tie], P[B wins from the tie]).
inline std::pair<double, double> tie_win_probs(const RallyModel& model) {
  const TieParameters t(model);
  detail::require_resolving(t);
  if (model.kind() == ModelKind::NoServer) {
    const double p = model.p_a();
    const double denom = 1.0 - 2.0 * p * (1.0 - p);
    return {p * p / denom, (1.0 - p) * (1.0 - p) / denom};
  }
  const double q = t.resolve_pair();
  return {t.win_pair_a / q, t.win_pair_b / q};
}

/// P[the tie lasts exactly 2*pairs further rallies], pairs >= 1.
inline double tie_extra_duration_pmf(const RallyModel& model, int pairs) {
  if (pairs < 1) throw InvalidArgument("number of post-tie pairs must be >= 1");
  const TieParameters t(model);
  return t.resolve_pair() * std::pow(t.continue_pair, pairs - 1);
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of the number of post-tie rallies, 2L with L geometric.
inline Moments tie_extra_moments(const RallyModel& model) {
  const TieParameters t(model);
  detail::require_resolving(t);
  const double q = t.resolve_pair();
  return {2.0 / q, 4.0 * t.continue_pair / (q * q)};
}

/// Post-tie extra rally counts, materialized pair by pair until
/// scale * r^L < threshold. The tail field holds r^L.
inline Pmf tie_extra_pmf(const RallyModel& model, double threshold = kDefaultTruncation,
                         double scale = 1.0) {
  const TieParameters t(model);
  detail::require_resolving(t);
  Pmf pmf;
  pmf.offset = 2;
  double tail = 1.0;
  const double q = t.resolve_pair();
  constexpr int kMaxPairs = 50'000'000;
  for (int pairs = 1; tail * scale >= threshold; ++pairs) {
    if (pairs > kMaxPairs) throw DomainError("tie resolves too slowly to materialize");
    if (pairs > 1) pmf.mass.push_back(0.0);  // odd extra counts are impossible
    pmf.mass.push_back(tail * q);
    tail *= t.continue_pair;
  }
  pmf.tail = tail;
  return pmf;
}

}  // namespace ttprob
