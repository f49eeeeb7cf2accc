#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "ttprob/grid.hpp"
#include "ttprob/rally_combinatorics.hpp"
#include "ttprob/scoring.hpp"
#include "ttprob/tie_resolution.hpp"

namespace ttprob {

// ---------------------------------------------------------------------------
// Serve-count estimator
// ---------------------------------------------------------------------------

struct ServeCountData {
  std::uint64_t a_own_serve_wins = 0;
  std::uint64_t a_own_serves = 0;
  std::uint64_t b_own_serve_wins = 0;
  std::uint64_t b_own_serves = 0;
};

struct ServeCountEstimate {
  double p_a = 0.0;
  double p_b = 0.0;
  double se_a = 0.0;  // binomial standard error sqrt(p(1-p)/serves)
  double se_b = 0.0;
  bool on_boundary = false;
  std::vector<std::string> warnings;
};

/// Own-serve win ratios: the maximum-likelihood estimate when serve tallies
/// are observed.
inline ServeCountEstimate mle_serve_counts(const ServeCountData& d) {
  if (d.a_own_serves == 0 || d.b_own_serves == 0) {
    throw DomainError("insufficient data: each player needs at least one serve");
  }
  if (d.a_own_serve_wins > d.a_own_serves || d.b_own_serve_wins > d.b_own_serves) {
    throw InvalidArgument("own-serve wins cannot exceed own serves");
  }
  ServeCountEstimate e;
  e.p_a = static_cast<double>(d.a_own_serve_wins) / static_cast<double>(d.a_own_serves);
  e.p_b = static_cast<double>(d.b_own_serve_wins) / static_cast<double>(d.b_own_serves);
  e.se_a = std::sqrt(e.p_a * (1.0 - e.p_a) / static_cast<double>(d.a_own_serves));
  e.se_b = std::sqrt(e.p_b * (1.0 - e.p_b) / static_cast<double>(d.b_own_serves));
  e.on_boundary = e.p_a == 0.0 || e.p_a == 1.0 || e.p_b == 0.0 || e.p_b == 1.0;
  if (e.on_boundary) e.warnings.push_back("degenerate estimate: a serve win rate is 0 or 1");
  return e;
}

// ---------------------------------------------------------------------------
// Final-score likelihood
// ---------------------------------------------------------------------------

struct ScoreObservation {
  ScoringSystem system;
  Player first_server = Player::A;
  int score_a = 0;
  int score_b = 0;
};

inline bool is_final_score(const ScoringSystem& sys, int score_a, int score_b) {
  if (score_a < 0 || score_b < 0) return false;
  const int winner = std::max(score_a, score_b);
  const int loser = std::min(score_a, score_b);
  if (loser <= sys.n - 2) return winner == sys.n;
  return winner == loser + 2;
}

/// P[a set opened by obs.first_server ends on obs' score].
inline double observation_prob(const ScoreObservation& obs, const RallyModel& model) {
  const ScoringSystem& sys = obs.system;
  validate_system(sys);
  if (!is_final_score(sys, obs.score_a, obs.score_b)) {
    throw InvalidArgument("observed score " + std::to_string(obs.score_a) + "-" +
                          std::to_string(obs.score_b) + " does not end a set with n = " +
                          std::to_string(sys.n));
  }
  const Player winner = obs.score_a > obs.score_b ? Player::A : Player::B;
  const int loser_points = std::min(obs.score_a, obs.score_b);
  const int n = sys.n;
  if (loser_points <= n - 2) {
    return score_prob({obs.score_a, obs.score_b, winner, obs.first_server}, model, sys.m);
  }
  const double tie = score_prob({n - 1, n - 1, Player::A, obs.first_server}, model, sys.m) +
                     score_prob({n - 1, n - 1, Player::B, obs.first_server}, model, sys.m);
  const TieParameters t(model);
  const int pairs = loser_points - n + 2;
  const double decisive = winner == Player::A ? t.win_pair_a : t.win_pair_b;
  return tie * decisive * std::pow(t.continue_pair, pairs - 1);
}

/// Sum of per-observation log-probabilities; -inf when any is impossible.
inline double log_likelihood(const std::vector<ScoreObservation>& obs, const RallyModel& model) {
  double ll = 0.0;
  for (const auto& o : obs) ll += std::log(observation_prob(o, model));
  return ll;
}

struct ScoreMleOptions {
  GridSpec grid{0.01, 0.99, 0.01};
  bool no_server = false;  // search p with p_a = p, p_b = 1 - p
  int refine_sweeps = 3;
  unsigned threads = 0;
};

struct ScoreMle {
  double p_a = 0.0;
  double p_b = 0.0;
  double log_likelihood = 0.0;
  double grid_p_a = 0.0;  // best grid point before refinement
  double grid_p_b = 0.0;
  double grid_log_likelihood = 0.0;
  std::size_t grid_points = 0;
  std::size_t tied_grid_points = 0;
  bool on_boundary = false;  // best grid point sits on the edge of the grid
};

namespace detail {

// Distinct (m, n, first server, score) keys with multiplicities.
class GroupedObservations {
 public:
  explicit GroupedObservations(const std::vector<ScoreObservation>& obs) {
    if (obs.empty()) throw InvalidArgument("need at least one observation");
    std::map<std::tuple<int, int, int, int, int>, double> counts;
    for (const auto& o : obs) {
      validate_system(o.system);
      if (!is_final_score(o.system, o.score_a, o.score_b)) {
        throw InvalidArgument("observation is not a final set score");
      }
      counts[{o.system.m, o.system.n, o.first_server == Player::A ? 0 : 1, o.score_a, o.score_b}] += 1.0;
    }
    for (const auto& [key, count] : counts) {
      const auto [m, n, first, sa, sb] = key;
      ScoreObservation o{{m, n, 1}, first == 0 ? Player::A : Player::B, sa, sb};
      keys_.push_back(o);
      counts_.push_back(count);
    }
  }

  double log_likelihood(const RallyModel& model) const {
    double ll = 0.0;
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      ll += counts_[i] * std::log(observation_prob(keys_[i], model));
    }
    return ll;
  }

 private:
  std::vector<ScoreObservation> keys_;
  std::vector<double> counts_;
};

// Maximizes f on [lo, hi]; returns the best of the final bracket midpoint and `start`.
template <class F>
double golden_section_max(F f, double lo, double hi, double start) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-10) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  return f(mid) > f(start) ? mid : start;
}

}  // namespace detail

/// Grid search over the strength parameters followed by golden-section
/// refinement along each axis.
inline ScoreMle mle_from_scores(const std::vector<ScoreObservation>& observations,
                                const ScoreMleOptions& opt = {}) {
  const detail::GroupedObservations data(observations);
  const std::vector<double> axis = opt.grid.values();
  for (double v : axis) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("grid must lie inside [0, 1]");
  }
  auto make_model = [&](double x, double y) {
    return opt.no_server ? RallyModel::no_server(x) : RallyModel::server(x, y);
  };
  auto ll_at = [&](double x, double y) { return data.log_likelihood(make_model(x, y)); };

  const std::size_t rows = axis.size();
  const std::size_t cols = opt.no_server ? 1 : axis.size();
  std::vector<double> surface(rows * cols);
  auto fill_row = [&](std::size_t i) {
    for (std::size_t k = 0; k < cols; ++k) {
      surface[i * cols + k] = ll_at(axis[i], opt.no_server ? 1.0 - axis[i] : axis[k]);
    }
  };
  unsigned workers = opt.threads != 0 ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, rows));
  if (workers <= 1) {
    for (std::size_t i = 0; i < rows; ++i) fill_row(i);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < rows; i += workers) fill_row(i);
      }));
    }
    for (auto& j : jobs) j.get();
  }

  double best = -std::numeric_limits<double>::infinity();
  for (double v : surface) best = std::max(best, v);
  if (!std::isfinite(best)) {
    throw DomainError("observations are impossible at every grid point");
  }
  // Ties go to the tied grid point nearest the centroid of all tied points.
  std::vector<std::pair<double, double>> tied;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < cols; ++k) {
      if (surface[i * cols + k] >= best - 1e-12) {
        tied.emplace_back(axis[i], opt.no_server ? 1.0 - axis[i] : axis[k]);
      }
    }
  }
  double cx = 0.0;
  double cy = 0.0;
  for (const auto& [x, y] : tied) {
    cx += x;
    cy += y;
  }
  cx /= static_cast<double>(tied.size());
  cy /= static_cast<double>(tied.size());
  auto chosen = tied.front();
  double chosen_dist = std::numeric_limits<double>::infinity();
  for (const auto& t : tied) {
    const double dist = std::hypot(t.first - cx, t.second - cy);
    if (dist < chosen_dist) {
      chosen_dist = dist;
      chosen = t;
    }
  }

  ScoreMle out;
  out.grid_points = rows * cols;
  out.tied_grid_points = tied.size();
  out.grid_p_a = chosen.first;
  out.grid_p_b = chosen.second;
  out.grid_log_likelihood = ll_at(chosen.first, chosen.second);
  const double lo = axis.front();
  const double hi = axis.back();
  auto at_edge = [&](double v) { return v <= lo || v >= hi; };
  out.on_boundary = at_edge(chosen.first) || (!opt.no_server && at_edge(chosen.second));

  double x = chosen.first;
  double y = chosen.second;
  const double step = opt.grid.step;
  for (int sweep = 0; sweep < opt.refine_sweeps; ++sweep) {
    x = detail::golden_section_max(
        [&](double v) { return ll_at(v, opt.no_server ? 1.0 - v : y); }, std::max(lo, x - step),
        std::min(hi, x + step), x);
    if (opt.no_server) {
      y = 1.0 - x;
      continue;
    }
    y = detail::golden_section_max([&](double v) { return ll_at(x, v); }, std::max(lo, y - step),
                                   std::min(hi, y + step), y);
  }
  out.p_a = x;
  out.p_b = y;
  out.log_likelihood = ll_at(x, y);
  return out;
}

}  // namespace ttprob
