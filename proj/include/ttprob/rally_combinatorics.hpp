#pragma once

#include <algorithm>

#include "ttprob/binomial.hpp"
#include "ttprob/scoring.hpp"
#include "ttprob/serve_schedule.hpp"

namespace ttprob {

// The event "after alpha + beta rallies of a set opened by first_server, A has
// alpha points, B has beta points, and last_scorer won the final rally".
// Only meaningful before the tie, where the m-rotation governs the serve.
struct ScoreEventQuery {
  int alpha = 0;
  int beta = 0;
  Player last_scorer = Player::A;
  Player first_server = Player::A;
};

inline void check_query(const ScoreEventQuery& q) {
  if (q.alpha < 0 || q.beta < 0) throw InvalidArgument("scores must be non-negative");
  if (q.last_scorer == Player::A && q.alpha < 1) {
    throw InvalidArgument("A cannot have scored the last point with alpha = 0");
  }
  if (q.last_scorer == Player::B && q.beta < 1) {
    throw InvalidArgument("B cannot have scored the last point with beta = 0");
  }
}

/// Inclusive range of j, the number of points A won on A's own serve.
struct ComponentIndexRange {
  int j_min = 0;
  int j_max = -1;

  bool empty() const noexcept { return j_min > j_max; }
  bool contains(int j) const noexcept { return j >= j_min && j <= j_max; }
};

namespace detail {

// One of the eight (R = 0 / R > 0) x (K even / odd) x (C = A / B) cases for an
// A-set. A's serves are a binomial block of `a_trials` free trials with
// `j - a_shift` successes; B's serves give `b_trials` free trials with
// `alpha - j - b_shift` A-successes. The shifts remove the fixed last rally.
struct ASetCase {
  int a_serves = 0;
  int b_serves = 0;
  int a_trials = 0;
  int a_shift = 0;
  int b_trials = 0;
  int b_shift = 0;
  ComponentIndexRange range;
};

inline ASetCase a_set_case(int alpha, int beta, Player last, int m) {
  const ServeDecomposition d = decompose(alpha + beta, m);
  const int K = d.K;
  const int R = d.R;
  const int hi = d.k1 * m;  // ceil(K/2) m
  const int lo = d.k2 * m;  // floor(K/2) m
  const bool a_last = last == Player::A;
  ASetCase c;
  if (R == 0 && K % 2 == 0) {
    // Last rally served by B.
    c.a_serves = hi;
    c.b_serves = lo;
    c.a_trials = hi;
    c.a_shift = 0;
    c.b_trials = lo - 1;
    if (a_last) {
      c.b_shift = 1;
      c.range = {std::max(0, alpha - lo), std::min(alpha - 1, hi)};
    } else {
      c.b_shift = 0;
      c.range = {std::max(0, alpha - lo + 1), std::min(alpha, hi)};
    }
  } else if (R == 0) {
    // K odd: last rally served by A.
    c.a_serves = hi;
    c.b_serves = lo;
    c.a_trials = hi - 1;
    c.b_trials = lo;
    c.b_shift = 0;
    if (a_last) {
      c.a_shift = 1;
      c.range = {std::max(1, alpha - lo), std::min(alpha, hi)};
    } else {
      c.a_shift = 0;
      c.range = {std::max(0, alpha - lo), std::min(alpha, hi - 1)};
    }
  } else if (K % 2 == 0) {
    // R > 0, K even: A is serving the trailing R rallies.
    c.a_serves = hi + R;
    c.b_serves = lo;
    c.a_trials = hi + R - 1;
    c.b_trials = lo;
    c.b_shift = 0;
    if (a_last) {
      c.a_shift = 1;
      c.range = {std::max(1, alpha - lo), std::min(alpha, hi + R)};
    } else {
      c.a_shift = 0;
      c.range = {std::max(0, alpha - lo), std::min(alpha, hi + R - 1)};
    }
  } else {
    // R > 0, K odd: B is serving the trailing R rallies.
    c.a_serves = hi;
    c.b_serves = lo + R;
    c.a_trials = hi;
    c.a_shift = 0;
    c.b_trials = lo + R - 1;
    if (a_last) {
      c.b_shift = 1;
      c.range = {std::max(0, alpha - lo - R), std::min(alpha - 1, hi)};
    } else {
      c.b_shift = 0;
      c.range = {std::max(0, alpha - lo - R + 1), std::min(alpha, hi)};
    }
  }
  return c;
}

inline double a_set_component(int alpha, int beta, Player last, int j, double p_a, double p_b,
                              int m) {
  const ASetCase c = a_set_case(alpha, beta, last, m);
  if (!c.range.contains(j)) return 0.0;
  const int a_on_b = alpha - j;
  const long double pa = p_a;
  const long double pb = p_b;
  const long double own = binomial(c.a_trials, j - c.a_shift) * ipow(pa, j) *
                          ipow(1.0L - pa, c.a_serves - j);
  const long double away = binomial(c.b_trials, a_on_b - c.b_shift) * ipow(1.0L - pb, a_on_b) *
                           ipow(pb, c.b_serves - a_on_b);
  return static_cast<double>(own * away);
}

// For a B-set, A is the second server. The swapped A-set counts the opener's
// own-serve points x; A's own-serve points are j = alpha - (s1 - x) where s1 is
// the opener's serve count.
inline int b_set_offset(int alpha, int beta, int m) {
  return alpha - decompose(alpha + beta, m).serves_by_a(m);
}

}  // namespace detail

inline ComponentIndexRange index_range(const ScoreEventQuery& q, int m) {
  check_query(q);
  if (q.first_server == Player::A) return detail::a_set_case(q.alpha, q.beta, q.last_scorer, m).range;
  const ComponentIndexRange r = detail::a_set_case(q.beta, q.alpha, other(q.last_scorer), m).range;
  const int shift = detail::b_set_offset(q.alpha, q.beta, m);
  return {r.j_min + shift, r.j_max + shift};
}

/// Probability of the score event with A winning exactly j points on A's own
/// serve. Zero for j outside index_range.
inline double component_prob(const ScoreEventQuery& q, int j, const RallyModel& model, int m) {
  check_query(q);
  if (m < 1) throw InvalidArgument("m must be >= 1");
  if (q.first_server == Player::A) {
    return detail::a_set_component(q.alpha, q.beta, q.last_scorer, j, model.p_a(), model.p_b(), m);
  }
  const int x = j - detail::b_set_offset(q.alpha, q.beta, m);
  return detail::a_set_component(q.beta, q.alpha, other(q.last_scorer), x, model.p_b(), model.p_a(),
                                 m);
}

/// Closed form when every rally is won by A with probability p.
inline double no_server_score_prob(int alpha, int beta, Player last_scorer, double p) {
  check_query({alpha, beta, last_scorer, Player::A});
  const int top = alpha + beta - 1;
  const long double c = last_scorer == Player::A ? binomial(top, alpha - 1) : binomial(top, alpha);
  return static_cast<double>(c * ipow(p, alpha) * ipow(1.0L - p, beta));
}

/// P[score event], the sum of component_prob over the index range.
inline double score_prob(const ScoreEventQuery& q, const RallyModel& model, int m) {
  check_query(q);
  if (m < 1) throw InvalidArgument("m must be >= 1");
  if (model.kind() == ModelKind::NoServer) {
    return no_server_score_prob(q.alpha, q.beta, q.last_scorer, model.p_a());
  }
  const ComponentIndexRange r = index_range(q, m);
  double total = 0.0;
  for (int j = r.j_min; j <= r.j_max; ++j) total += component_prob(q, j, model, m);
  return total;
}

}  // namespace ttprob
