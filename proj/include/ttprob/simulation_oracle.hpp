#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <thread>
#include <utility>
#include <vector>

#include "ttprob/scoring.hpp"
#include "ttprob/serve_schedule.hpp"

namespace ttprob {

// ---------------------------------------------------------------------------
// Random numbers
//
// xoshiro256** (Blackman & Vigna) seeded through splitmix64. Uniforms take the
// top 53 bits, so bernoulli(0) never fires and bernoulli(1) always does.
// Chunk k of a run with seed s uses the stream seeded with
// splitmix64_mix(s ^ splitmix64_mix(k + 1)).
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t x = seed;
    for (auto& word : s_) {
      word = splitmix64_mix(x);
      x += 0x9E3779B97F4A7C15ULL;
    }
  }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

inline std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) noexcept {
  return splitmix64_mix(seed ^ splitmix64_mix(chunk + 1));
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

struct SimConfig {
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  ScoringSystem system;
  RallyModel model = RallyModel::no_server(0.5);
  Player first_server = Player::A;
  int rally_cap = 1'000'000;  // per set
  unsigned threads = 0;       // 0: hardware concurrency
};

struct ServeTally {
  std::uint64_t own_serve_wins = 0;
  std::uint64_t own_serves = 0;
};

// Counts only, so merging chunk summaries is exact and order-free.
struct SimSummary {
  std::uint64_t trials = 0;
  std::uint64_t wins_a = 0;
  std::map<int, std::uint64_t> duration_histogram;
  // Final set score for simulate_set, sets won (A, B) for simulate_match.
  std::map<std::pair<int, int>, std::uint64_t> final_score_histogram;
  ServeTally a;
  ServeTally b;

  double win_rate_a() const noexcept {
    return trials == 0 ? 0.0 : static_cast<double>(wins_a) / static_cast<double>(trials);
  }

  double mean_duration() const noexcept {
    long double s = 0.0L;
    for (const auto& [d, c] : duration_histogram) s += static_cast<long double>(d) * c;
    return trials == 0 ? 0.0 : static_cast<double>(s / trials);
  }

  double duration_variance() const noexcept {
    if (trials == 0) return 0.0;
    const long double mu = mean_duration();
    long double s = 0.0L;
    for (const auto& [d, c] : duration_histogram) s += (d - mu) * (d - mu) * c;
    return static_cast<double>(s / trials);
  }

  void merge(const SimSummary& o) {
    trials += o.trials;
    wins_a += o.wins_a;
    for (const auto& [d, c] : o.duration_histogram) duration_histogram[d] += c;
    for (const auto& [k, c] : o.final_score_histogram) final_score_histogram[k] += c;
    a.own_serve_wins += o.a.own_serve_wins;
    a.own_serves += o.a.own_serves;
    b.own_serve_wins += o.b.own_serve_wins;
    b.own_serves += o.b.own_serves;
  }
};

namespace detail {

inline constexpr std::uint64_t kChunkTrials = 1 << 15;

struct PlayedSet {
  Player winner;
  int score_a;
  int score_b;
};

// Plays one set rally by rally under the serve rotation and tie alternation.
inline PlayedSet play_set(const ScoringSystem& sys, const RallyModel& model, Player first,
                          int rally_cap, Xoshiro256& rng, SimSummary& tally) {
  int a = 0;
  int b = 0;
  for (int rally = 1;; ++rally) {
    if (rally > rally_cap) throw DomainError("rally cap exceeded; the set does not terminate");
    const Player server = scheduled_server(rally, sys, first);
    const bool a_scores = rng.bernoulli(model.a_wins_rally(server));
    ServeTally& st = server == Player::A ? tally.a : tally.b;
    ++st.own_serves;
    if (a_scores == (server == Player::A)) ++st.own_serve_wins;
    (a_scores ? a : b) += 1;
    if (std::max(a, b) >= sys.n && std::abs(a - b) >= 2) {
      return {a > b ? Player::A : Player::B, a, b};
    }
  }
}

template <class TrialFn>
SimSummary run_chunked(const SimConfig& cfg, TrialFn trial) {
  if (cfg.trials < 1) throw InvalidArgument("trials must be >= 1");
  validate_system(cfg.system);
  const std::uint64_t chunks = (cfg.trials + kChunkTrials - 1) / kChunkTrials;
  auto run_chunk = [&](std::uint64_t chunk) {
    SimSummary s;
    Xoshiro256 rng(chunk_seed(cfg.seed, chunk));
    const std::uint64_t begin = chunk * kChunkTrials;
    const std::uint64_t end = std::min(cfg.trials, begin + kChunkTrials);
    for (std::uint64_t i = begin; i < end; ++i) trial(rng, s);
    return s;
  };
  unsigned workers = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
  std::vector<SimSummary> parts(chunks);
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) parts[c] = run_chunk(c);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::uint64_t c = w; c < chunks; c += workers) parts[c] = run_chunk(c);
      }));
    }
    for (auto& j : jobs) j.get();
  }
  SimSummary total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace detail

/// Monte Carlo over independent sets opened by cfg.first_server.
inline SimSummary simulate_set(const SimConfig& cfg) {
  return detail::run_chunked(cfg, [&](Xoshiro256& rng, SimSummary& s) {
    const detail::PlayedSet r =
        detail::play_set(cfg.system, cfg.model, cfg.first_server, cfg.rally_cap, rng, s);
    ++s.trials;
    if (r.winner == Player::A) ++s.wins_a;
    ++s.duration_histogram[r.score_a + r.score_b];
    ++s.final_score_histogram[{r.score_a, r.score_b}];
  });
}

/// Monte Carlo over matches: first to G sets, set openers alternating.
inline SimSummary simulate_match(const SimConfig& cfg) {
  return detail::run_chunked(cfg, [&](Xoshiro256& rng, SimSummary& s) {
    int sets_a = 0;
    int sets_b = 0;
    int rallies = 0;
    for (int index = 0; sets_a < cfg.system.G && sets_b < cfg.system.G; ++index) {
      const Player opener = index % 2 == 0 ? cfg.first_server : other(cfg.first_server);
      const detail::PlayedSet r = detail::play_set(cfg.system, cfg.model, opener, cfg.rally_cap, rng, s);
      rallies += r.score_a + r.score_b;
      (r.winner == Player::A ? sets_a : sets_b) += 1;
    }
    ++s.trials;
    if (sets_a == cfg.system.G) ++s.wins_a;
    ++s.duration_histogram[rallies];
    ++s.final_score_histogram[{sets_a, sets_b}];
  });
}

// ---------------------------------------------------------------------------
// Exact dynamic program over score states
// ---------------------------------------------------------------------------

// Forward reach probabilities split by last scorer and backward win
// probabilities, driven only by the per-rally serve rule. The tie is solved as
// a three-state first-step system (level, A ahead, B ahead).
class DpSetTable {
 public:
  DpSetTable(const ScoringSystem& sys, const RallyModel& model, Player first)
      : n_(sys.n), side_(static_cast<std::size_t>(sys.n + 1)) {
    validate_system(sys);
    reach_a_.assign(side_ * side_, 0.0);
    reach_b_.assign(side_ * side_, 0.0);
    win_.assign(side_ * side_, 0.0);
    forward(sys, model, first);
    solve_tie(sys, model, first);
    backward(sys, model, first);
  }

  /// P[the set passes through (alpha, beta) with `last` scoring last].
  double reach(int alpha, int beta, Player last) const {
    check(alpha, beta);
    return (last == Player::A ? reach_a_ : reach_b_)[at(alpha, beta)];
  }

  double reach_total(int alpha, int beta) const {
    if (alpha == 0 && beta == 0) return 1.0;
    return reach(alpha, beta, Player::A) + reach(alpha, beta, Player::B);
  }

  /// P[A wins | live pre-tie state (alpha, beta)], including (n-1, n-1).
  double win_from(int alpha, int beta) const {
    check(alpha, beta);
    if (alpha > n_ - 1 || beta > n_ - 1) throw InvalidArgument("win_from needs a live pre-tie state");
    if (tie_unresolved_ && reach_tie_from(alpha, beta)) {
      throw DomainError("tie never resolves: every post-tie pair is split");
    }
    return win_[at(alpha, beta)];
  }

  double tie_level_win() const noexcept { return tie_level_; }

  /// Largest |live + absorbed - 1| over rally counts 0..2(n-1).
  double max_mass_defect() const noexcept { return mass_defect_; }

 private:
  std::size_t at(int a, int b) const noexcept { return static_cast<std::size_t>(a) * side_ + b; }

  void check(int a, int b) const {
    if (a < 0 || b < 0 || a > n_ || b > n_) throw InvalidArgument("score outside the DP table");
  }

  bool reach_tie_from(int a, int b) const noexcept { return can_tie_[at(a, b)]; }

  void forward(const ScoringSystem& sys, const RallyModel& model, Player first) {
    double absorbed = 0.0;
    for (int t = 0; t <= 2 * n_ - 2; ++t) {
      double live = 0.0;
      for (int a = std::max(0, t - (n_ - 1)); a <= std::min(n_ - 1, t); ++a) {
        live += (a == 0 && t == 0) ? 1.0 : reach_a_[at(a, t - a)] + reach_b_[at(a, t - a)];
      }
      mass_defect_ = std::max(mass_defect_, std::abs(live + absorbed - 1.0));
      if (t == 2 * n_ - 2) break;
      const double p = model.a_wins_rally(server_of_rally(t + 1, sys, first));
      for (int a = std::max(0, t - (n_ - 1)); a <= std::min(n_ - 1, t); ++a) {
        const int b = t - a;
        const double here = (a == 0 && b == 0) ? 1.0 : reach_a_[at(a, b)] + reach_b_[at(a, b)];
        reach_a_[at(a + 1, b)] += here * p;
        reach_b_[at(a, b + 1)] += here * (1.0 - p);
        if (a + 1 == n_) absorbed += here * p;
        if (b + 1 == n_) absorbed += here * (1.0 - p);
      }
    }
  }

  void solve_tie(const ScoringSystem& sys, const RallyModel& model, Player first) {
    const int opener_rally = sys.tie_rally_count() + 1;
    const double px = model.a_wins_rally(server_of_rally(opener_rally, sys, first, sys.tie_rally_count()));
    const double py =
        model.a_wins_rally(server_of_rally(opener_rally + 1, sys, first, sys.tie_rally_count()));
    // level = px * ahead + (1 - px) * behind, ahead = py + (1 - py) level, behind = py * level
    const double denom = 1.0 - px * (1.0 - py) - (1.0 - px) * py;
    if (denom == 0.0) {
      tie_unresolved_ = true;
      tie_level_ = 0.0;
    } else {
      tie_level_ = px * py / denom;
    }
  }

  void backward(const ScoringSystem& sys, const RallyModel& model, Player first) {
    can_tie_.assign(side_ * side_, false);
    for (int b = 0; b <= n_ - 2; ++b) win_[at(n_, b)] = 1.0;
    win_[at(n_ - 1, n_ - 1)] = tie_level_;
    can_tie_[at(n_ - 1, n_ - 1)] = true;
    for (int t = 2 * n_ - 3; t >= 0; --t) {
      const double p = model.a_wins_rally(server_of_rally(t + 1, sys, first));
      for (int a = std::max(0, t - (n_ - 1)); a <= std::min(n_ - 1, t); ++a) {
        const int b = t - a;
        win_[at(a, b)] = p * win_[at(a + 1, b)] + (1.0 - p) * win_[at(a, b + 1)];
        can_tie_[at(a, b)] = (p > 0.0 && can_tie_[at(a + 1, b)]) || (p < 1.0 && can_tie_[at(a, b + 1)]);
      }
    }
  }

  int n_;
  std::size_t side_;
  std::vector<double> reach_a_;
  std::vector<double> reach_b_;
  std::vector<double> win_;
  std::vector<bool> can_tie_;
  double tie_level_ = 0.0;
  bool tie_unresolved_ = false;
  double mass_defect_ = 0.0;
};

inline DpSetTable dp_set_table(const ScoringSystem& sys, const RallyModel& model, Player first) {
  return DpSetTable(sys, model, first);
}

}  // namespace ttprob
