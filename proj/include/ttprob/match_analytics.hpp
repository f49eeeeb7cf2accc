#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "ttprob/pmf.hpp"
#include "ttprob/set_analytics.hpp"

namespace ttprob {

struct MatchQuery {
  ScoringSystem system;
  RallyModel model;
  Player first_server = Player::A;
};

namespace detail {

// First server of the 0-based set `index`: alternates from the match opener.
constexpr Player set_opener(Player match_opener, int index) noexcept {
  return index % 2 == 0 ? match_opener : other(match_opener);
}

constexpr std::size_t slot(Player p) noexcept { return p == Player::A ? 0 : 1; }

// Walks the (sets won by A, sets won by B) lattice of a first-to-G race.
// `step(state, set_index, winner)` folds a set result into a carried state.
template <class State, class Step>
State race_over_sets(int G, const State& start, Step step) {
  const auto side = static_cast<std::size_t>(G + 1);
  std::vector<State> grid(side * side);
  std::vector<bool> live(side * side, false);
  auto at = [side](int a, int b) { return static_cast<std::size_t>(a) * side + b; };
  grid[at(0, 0)] = start;
  live[at(0, 0)] = true;
  State finished{};
  bool any_finished = false;
  for (int played = 0; played < 2 * G - 1; ++played) {
    for (int a = std::max(0, played - (G - 1)); a <= std::min(G - 1, played); ++a) {
      const int b = played - a;
      if (!live[at(a, b)]) continue;
      const State& here = grid[at(a, b)];
      for (Player w : {Player::A, Player::B}) {
        State next = step(here, played, w);
        const int na = a + (w == Player::A);
        const int nb = b + (w == Player::B);
        if (na == G || nb == G) {
          finished = any_finished ? State::merge(finished, next) : next;
          any_finished = true;
        } else if (live[at(na, nb)]) {
          grid[at(na, nb)] = State::merge(grid[at(na, nb)], next);
        } else {
          grid[at(na, nb)] = std::move(next);
          live[at(na, nb)] = true;
        }
      }
    }
  }
  return finished;
}

struct RawMoments {
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  static RawMoments merge(const RawMoments& x, const RawMoments& y) {
    return {x.m0 + y.m0, x.m1 + y.m1, x.m2 + y.m2};
  }
};

struct PmfState {
  Pmf pmf;
  static PmfState merge(const PmfState& x, const PmfState& y) {
    PmfState out{x.pmf};
    for (std::size_t i = 0; i < y.pmf.mass.size(); ++i) {
      out.pmf.add(y.pmf.offset + static_cast<int>(i), y.pmf.mass[i]);
    }
    out.pmf.tail += y.pmf.tail;
    return out;
  }
};

}  // namespace detail

/// P[A wins the match]: the first to G sets, each set opened alternately.
inline double match_win_prob(const MatchQuery& q) {
  validate_system(q.system);
  const std::array<WinProbs, 2> per_set{set_win_probs(q.system, q.model, Player::A),
                                        set_win_probs(q.system, q.model, Player::B)};
  const int G = q.system.G;
  const auto side = static_cast<std::size_t>(G + 1);
  std::vector<double> grid(side * side, 0.0);
  auto at = [side](int a, int b) { return static_cast<std::size_t>(a) * side + b; };
  grid[at(0, 0)] = 1.0;
  double a_wins = 0.0;
  for (int played = 0; played < 2 * G - 1; ++played) {
    const WinProbs& w = per_set[detail::slot(detail::set_opener(q.first_server, played))];
    for (int a = std::max(0, played - (G - 1)); a <= std::min(G - 1, played); ++a) {
      const int b = played - a;
      const double here = grid[at(a, b)];
      if (here == 0.0) continue;
      if (a + 1 == G) {
        a_wins += here * w.a;
      } else {
        grid[at(a + 1, b)] += here * w.a;
      }
      if (b + 1 < G) grid[at(a, b + 1)] += here * w.b;
    }
  }
  return a_wins;
}

/// Match duration law, convolving per-set winner/duration laws along every
/// set-winner sequence.
inline Pmf match_duration_pmf(const MatchQuery& q, double truncation = kDefaultTruncation) {
  validate_system(q.system);
  const std::array<JointDuration, 2> per_set{
      joint_winner_duration(q.system, q.model, Player::A, truncation),
      joint_winner_duration(q.system, q.model, Player::B, truncation)};
  detail::PmfState start;
  start.pmf.offset = 0;
  start.pmf.mass = {1.0};
  const auto done = detail::race_over_sets(
      q.system.G, start, [&](const detail::PmfState& s, int index, Player winner) {
        const JointDuration& j = per_set[detail::slot(detail::set_opener(q.first_server, index))];
        return detail::PmfState{convolve(s.pmf, winner == Player::A ? j.a_wins : j.b_wins)};
      });
  return done.pmf;
}

/// Exact match duration moments from closed-form per-set winner moments.
inline Moments match_duration_moments(const MatchQuery& q) {
  validate_system(q.system);
  const std::array<SetMoments, 2> per_set{winner_duration_moments(q.system, q.model, Player::A),
                                          winner_duration_moments(q.system, q.model, Player::B)};
  const auto done = detail::race_over_sets(
      q.system.G, detail::RawMoments{1.0, 0.0, 0.0},
      [&](const detail::RawMoments& s, int index, Player winner) {
        const SetMoments& sm = per_set[detail::slot(detail::set_opener(q.first_server, index))];
        const WinnerMoments& w = winner == Player::A ? sm.a : sm.b;
        return detail::RawMoments{s.m0 * w.prob, s.m1 * w.prob + s.m0 * w.first,
                                  s.m2 * w.prob + 2.0 * s.m1 * w.first + s.m0 * w.second};
      });
  const double mean = done.m1 / done.m0;
  return {mean, done.m2 / done.m0 - mean * mean};
}

struct ComparisonRow {
  ScoringSystem old_system;
  ScoringSystem new_system;
  RallyModel model = RallyModel::no_server(0.5);
  double win_prob_old = 0.0;
  double win_prob_new = 0.0;
  double mean_old = 0.0;
  double mean_new = 0.0;
  double std_old = 0.0;
  double std_new = 0.0;
  double ratio_mean = 1.0;
  double ratio_std = 1.0;
};

namespace detail {
inline double ratio(double num, double den) {
  if (num == den) return 1.0;
  if (!(den > 0.0) || !(num > 0.0)) throw DomainError("ratio of durations is not positive and finite");
  return num / den;
}
}  // namespace detail

/// Old-over-new ratios of match duration mean and standard deviation for
/// each model, with A opening the match.
inline std::vector<ComparisonRow> compare_systems(const ScoringSystem& old_system,
                                                  const ScoringSystem& new_system,
                                                  const std::vector<RallyModel>& models,
                                                  Player first = Player::A) {
  validate_system(old_system);
  validate_system(new_system);
  std::vector<ComparisonRow> rows;
  rows.reserve(models.size());
  for (const RallyModel& model : models) {
    ComparisonRow row{old_system, new_system, model};
    const MatchQuery old_q{old_system, model, first};
    const MatchQuery new_q{new_system, model, first};
    row.win_prob_old = match_win_prob(old_q);
    row.win_prob_new = match_win_prob(new_q);
    const Moments mo = match_duration_moments(old_q);
    const Moments mn = match_duration_moments(new_q);
    row.mean_old = mo.mean;
    row.mean_new = mn.mean;
    row.std_old = std::sqrt(std::max(0.0, mo.variance));
    row.std_new = std::sqrt(std::max(0.0, mn.variance));
    row.ratio_mean = detail::ratio(row.mean_old, row.mean_new);
    row.ratio_std = detail::ratio(row.std_old, row.std_new);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ttprob
