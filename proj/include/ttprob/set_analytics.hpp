#pragma once

#include <cmath>
#include <vector>

#include "ttprob/pmf.hpp"
#include "ttprob/rally_combinatorics.hpp"
#include "ttprob/scoring.hpp"
#include "ttprob/serve_schedule.hpp"
#include "ttprob/tie_resolution.hpp"

namespace ttprob {

struct WinProbs {
  double a = 0.0;
  double b = 0.0;
};

// Final-score law of one set, indexed by the loser's points k. For k <= n-2
// the winner has n points; for k >= n-1 the set went through the tie and the
// winner has k+2.
struct FinalScorePmf {
  int n = 0;
  std::vector<double> a_wins;
  std::vector<double> b_wins;
  double tail_a = 0.0;  // unmaterialized tie outcomes won by A
  double tail_b = 0.0;

  double tail() const noexcept { return tail_a + tail_b; }

  int winner_points(int loser_points) const noexcept {
    return loser_points <= n - 2 ? n : loser_points + 2;
  }

  /// P[final score (score_a, score_b)]; zero for non-terminal or unmaterialized scores.
  double at(int score_a, int score_b) const noexcept {
    if (score_a > score_b) {
      const int k = score_b;
      if (k < 0 || k >= static_cast<int>(a_wins.size()) || winner_points(k) != score_a) return 0.0;
      return a_wins[static_cast<std::size_t>(k)];
    }
    const int k = score_a;
    if (k < 0 || k >= static_cast<int>(b_wins.size()) || winner_points(k) != score_b) return 0.0;
    return b_wins[static_cast<std::size_t>(k)];
  }
};

/// Set duration split by winner. Each part is a defective pmf whose stored
/// mass plus tail is that player's win probability.
struct JointDuration {
  Pmf a_wins;
  Pmf b_wins;
};

// Per-winner raw duration moments: P[W = w], E[D 1{W = w}], E[D^2 1{W = w}].
struct WinnerMoments {
  double prob = 0.0;
  double first = 0.0;
  double second = 0.0;
};

struct SetMoments {
  WinnerMoments a;
  WinnerMoments b;

  double mean() const noexcept { return a.first + b.first; }
  double variance() const noexcept {
    const double mu = mean();
    return a.second + b.second - mu * mu;
  }
};

namespace detail {

// Probabilities of the pre-tie terminal scores and of reaching the tie.
struct SetCore {
  std::vector<double> a_wins;  // P[A wins (n, k)], k = 0..n-2
  std::vector<double> b_wins;  // P[B wins (k, n)]
  double tie_mass = 0.0;
};

inline SetCore set_core(const ScoringSystem& sys, const RallyModel& model, Player first) {
  validate_system(sys);
  const int n = sys.n;
  SetCore core;
  core.a_wins.resize(static_cast<std::size_t>(n - 1));
  core.b_wins.resize(static_cast<std::size_t>(n - 1));
  for (int k = 0; k <= n - 2; ++k) {
    core.a_wins[static_cast<std::size_t>(k)] = score_prob({n, k, Player::A, first}, model, sys.m);
    core.b_wins[static_cast<std::size_t>(k)] = score_prob({k, n, Player::B, first}, model, sys.m);
  }
  core.tie_mass = score_prob({n - 1, n - 1, Player::A, first}, model, sys.m) +
                  score_prob({n - 1, n - 1, Player::B, first}, model, sys.m);
  return core;
}

// Tie-branch win split; a stuck tie is only an error if it can be reached.
inline std::pair<double, double> reachable_tie_split(const SetCore& core, const RallyModel& model) {
  if (core.tie_mass == 0.0) return {0.0, 0.0};
  return tie_win_probs(model);
}

}  // namespace detail

/// P[A wins], P[B wins] for a set opened by `first`.
inline WinProbs set_win_probs(const ScoringSystem& sys, const RallyModel& model, Player first) {
  const detail::SetCore core = detail::set_core(sys, model, first);
  const auto [tie_a, tie_b] = detail::reachable_tie_split(core, model);
  WinProbs w;
  for (double v : core.a_wins) w.a += v;
  for (double v : core.b_wins) w.b += v;
  w.a += core.tie_mass * tie_a;
  w.b += core.tie_mass * tie_b;
  return w;
}

inline FinalScorePmf final_score_distribution(const ScoringSystem& sys, const RallyModel& model,
                                              Player first, double truncation = kDefaultTruncation) {
  const detail::SetCore core = detail::set_core(sys, model, first);
  FinalScorePmf out;
  out.n = sys.n;
  out.a_wins = core.a_wins;
  out.b_wins = core.b_wins;
  if (core.tie_mass == 0.0) return out;
  const TieParameters t(model);
  detail::require_resolving(t);
  double reach = core.tie_mass;  // P[tie still running after the pairs so far]
  while (reach >= truncation) {
    out.a_wins.push_back(reach * t.win_pair_a);
    out.b_wins.push_back(reach * t.win_pair_b);
    reach *= t.continue_pair;
  }
  const auto [tie_a, tie_b] = tie_win_probs(model);
  out.tail_a = reach * tie_a;
  out.tail_b = reach * tie_b;
  return out;
}

inline JointDuration joint_winner_duration(const ScoringSystem& sys, const RallyModel& model,
                                           Player first, double truncation = kDefaultTruncation) {
  const FinalScorePmf scores = final_score_distribution(sys, model, first, truncation);
  JointDuration out;
  for (Pmf* part : {&out.a_wins, &out.b_wins}) {
    part->offset = sys.n;
    part->mass.assign(static_cast<std::size_t>(sys.n - 1), 0.0);
  }
  for (std::size_t k = 0; k < scores.a_wins.size(); ++k) {
    const int loser = static_cast<int>(k);
    const int d = scores.winner_points(loser) + loser;
    out.a_wins.add(d, scores.a_wins[k]);
    out.b_wins.add(d, scores.b_wins[k]);
  }
  out.a_wins.tail = scores.tail_a;
  out.b_wins.tail = scores.tail_b;
  return out;
}

/// Law of the number of rallies D in a set, with unmaterialized tie mass in `tail`.
inline Pmf duration_pmf(const ScoringSystem& sys, const RallyModel& model, Player first,
                        double truncation = kDefaultTruncation) {
  const JointDuration joint = joint_winner_duration(sys, model, first, truncation);
  Pmf out = joint.a_wins;
  for (std::size_t i = 0; i < joint.b_wins.mass.size(); ++i) {
    out.add(joint.b_wins.offset + static_cast<int>(i), joint.b_wins.mass[i]);
  }
  out.tail = joint.a_wins.tail + joint.b_wins.tail;
  return out;
}

/// Closed-form per-winner duration moments: exact sums over the pre-tie
/// outcomes plus the geometric tie branch.
inline SetMoments winner_duration_moments(const ScoringSystem& sys, const RallyModel& model,
                                          Player first) {
  const detail::SetCore core = detail::set_core(sys, model, first);
  const int n = sys.n;
  SetMoments out;
  for (int k = 0; k <= n - 2; ++k) {
    const double d = n + k;
    const double pa = core.a_wins[static_cast<std::size_t>(k)];
    const double pb = core.b_wins[static_cast<std::size_t>(k)];
    out.a.prob += pa;
    out.a.first += d * pa;
    out.a.second += d * d * pa;
    out.b.prob += pb;
    out.b.first += d * pb;
    out.b.second += d * d * pb;
  }
  if (core.tie_mass > 0.0) {
    const auto [tie_a, tie_b] = tie_win_probs(model);
    const Moments extra = tie_extra_moments(model);
    const double base = sys.tie_rally_count();
    const double m1 = base + extra.mean;
    const double m2 = base * base + 2.0 * base * extra.mean + extra.variance + extra.mean * extra.mean;
    for (auto [part, share] : {std::pair{&out.a, tie_a}, std::pair{&out.b, tie_b}}) {
      const double w = core.tie_mass * share;
      part->prob += w;
      part->first += w * m1;
      part->second += w * m2;
    }
  }
  return out;
}

inline Moments duration_moments(const ScoringSystem& sys, const RallyModel& model, Player first) {
  const SetMoments m = winner_duration_moments(sys, model, first);
  return {m.mean(), m.variance()};
}

/// P[A wins the set] from an intermediate state, by backward recursion over
/// the scores still to be played.
inline double win_prob_from_score(const ScoringSystem& sys, const RallyModel& model, Player first,
                                  const ScoreState& state) {
  validate_system(sys);
  switch (classify(state, sys)) {
    case StateStatus::Invalid:
      throw InvalidArgument("score state is not reachable under this scoring system");
    case StateStatus::Terminal:
      throw DomainError("set already decided");
    case StateStatus::Live:
      break;
  }
  const int n = sys.n;
  auto rally_prob = [&](int rally_index) {
    return model.a_wins_rally(scheduled_server(rally_index, sys, first));
  };
  // Level tie value; only evaluated when the tie is reachable.
  auto tie_value = [&]() { return tie_win_probs(model).first; };

  if (state.phase == Phase::Tie) {
    const int lead = state.alpha - state.beta;
    if (lead == 0) return tie_value();
    const double p = rally_prob(state.alpha + state.beta + 1);
    const double converts = lead > 0 ? p : 1.0 - p;
    if (converts == 1.0) return lead > 0 ? 1.0 : 0.0;
    return lead > 0 ? p + (1.0 - p) * tie_value() : p * tie_value();
  }

  // direct[a][b]: P[A wins without a tie]; reach_tie[a][b]: P[reaching the tie].
  const auto side = static_cast<std::size_t>(n + 1);
  std::vector<double> direct(side * side, 0.0);
  std::vector<double> reach_tie(side * side, 0.0);
  auto at = [side](int a, int b) { return static_cast<std::size_t>(a) * side + b; };
  for (int b = 0; b <= n - 2; ++b) direct[at(n, b)] = 1.0;
  reach_tie[at(n - 1, n - 1)] = 1.0;
  for (int total = 2 * n - 3; total >= state.alpha + state.beta; --total) {
    const double p = rally_prob(total + 1);
    for (int a = std::max(0, total - (n - 1)); a <= std::min(n - 1, total); ++a) {
      const int b = total - a;
      direct[at(a, b)] = p * direct[at(a + 1, b)] + (1.0 - p) * direct[at(a, b + 1)];
      reach_tie[at(a, b)] = p * reach_tie[at(a + 1, b)] + (1.0 - p) * reach_tie[at(a, b + 1)];
    }
  }
  const double to_tie = reach_tie[at(state.alpha, state.beta)];
  const double win = direct[at(state.alpha, state.beta)];
  return to_tie == 0.0 ? win : win + to_tie * tie_value();
}

// Everything about one set in a single value.
struct SetDistributions {
  WinProbs win;
  FinalScorePmf final_scores;
  Pmf duration;
  JointDuration joint;
  Moments moments;
};

inline SetDistributions set_distributions(const ScoringSystem& sys, const RallyModel& model,
                                          Player first, double truncation = kDefaultTruncation) {
  SetDistributions out;
  out.win = set_win_probs(sys, model, first);
  out.final_scores = final_score_distribution(sys, model, first, truncation);
  out.joint = joint_winner_duration(sys, model, first, truncation);
  out.duration = duration_pmf(sys, model, first, truncation);
  out.moments = duration_moments(sys, model, first);
  return out;
}

}  // namespace ttprob
