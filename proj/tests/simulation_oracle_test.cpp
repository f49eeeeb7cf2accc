#include "ttprob/simulation_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ttprob/match_analytics.hpp"
#include "ttprob/set_analytics.hpp"

namespace ttprob {
namespace {

SimConfig config(ScoringSystem sys, RallyModel model, std::uint64_t trials, std::uint64_t seed) {
  SimConfig c;
  c.system = sys;
  c.model = model;
  c.trials = trials;
  c.seed = seed;
  return c;
}

bool same(const SimSummary& x, const SimSummary& y) {
  return x.trials == y.trials && x.wins_a == y.wins_a && x.duration_histogram == y.duration_histogram &&
         x.final_score_histogram == y.final_score_histogram && x.a.own_serves == y.a.own_serves &&
         x.a.own_serve_wins == y.a.own_serve_wins && x.b.own_serves == y.b.own_serves &&
         x.b.own_serve_wins == y.b.own_serve_wins;
}

TEST(Xoshiro, UniformsInUnitInterval) {
  Xoshiro256 rng(7);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  constexpr int kDraws = 200'000;
  for (int i = 0; i < kDraws; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / kDraws, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / kDraws));
  Xoshiro256 a(99), b(99), c(100);
  EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(a.next(), c.next());
  EXPECT_NE(chunk_seed(1, 0), chunk_seed(1, 1));
}

TEST(SimulateSet, DeterministicPerSeedAndThreadCount) {
  auto cfg = config({2, 11, 1}, RallyModel::server(0.55, 0.5), 100'000, 42);
  cfg.threads = 1;
  const auto one = simulate_set(cfg);
  cfg.threads = 3;
  const auto three = simulate_set(cfg);
  EXPECT_TRUE(same(one, three));
  EXPECT_TRUE(same(one, simulate_set(cfg)));
  cfg.seed = 43;
  EXPECT_FALSE(same(one, simulate_set(cfg)));
}

TEST(SimulateSet, SummaryConsistency) {
  const auto s = simulate_set(config({5, 21, 1}, RallyModel::server(0.4, 0.6), 20'000, 1));
  EXPECT_EQ(s.trials, 20'000u);
  EXPECT_LE(s.wins_a, s.trials);
  EXPECT_LE(s.a.own_serve_wins, s.a.own_serves);
  EXPECT_LE(s.b.own_serve_wins, s.b.own_serves);
  std::uint64_t count = 0, rallies = 0;
  for (const auto& [d, c] : s.duration_histogram) {
    count += c;
    rallies += static_cast<std::uint64_t>(d) * c;
  }
  EXPECT_EQ(count, s.trials);
  EXPECT_EQ(rallies, s.a.own_serves + s.b.own_serves);
}

TEST(SimulateSet, WhitewashIsExact) {
  const auto s = simulate_set(config({5, 21, 1}, RallyModel::server(1.0, 0.0), 5'000, 3));
  EXPECT_EQ(s.wins_a, 5'000u);
  ASSERT_EQ(s.duration_histogram.size(), 1u);
  EXPECT_EQ(s.duration_histogram.begin()->first, 21);
  EXPECT_EQ(s.mean_duration(), 21.0);
}

TEST(SimulateSet, RallyCapStopsStuckTies) {
  auto cfg = config({1, 2, 1}, RallyModel::server(1.0, 1.0), 10, 5);
  cfg.rally_cap = 1000;
  EXPECT_THROW(simulate_set(cfg), DomainError);
}

TEST(SimulateSet, AgreesWithExactEngine) {
  const auto model = RallyModel::server(0.3, 0.2);
  constexpr std::uint64_t kTrials = 200'000;
  const auto s = simulate_set(config({5, 21, 1}, model, kTrials, 11));
  const double p = set_win_probs({5, 21, 1}, model, Player::A).a;
  EXPECT_NEAR(s.win_rate_a(), p, 3.0 * std::sqrt(p * (1 - p) / kTrials));
  const auto mom = duration_moments({5, 21, 1}, model, Player::A);
  EXPECT_NEAR(s.mean_duration(), mom.mean, 3.0 * std::sqrt(mom.variance / kTrials));
}

TEST(SimulateSet, ServeTalliesConverge) {
  const auto s = simulate_set(config({2, 11, 1}, RallyModel::server(0.62, 0.47), 50'000, 8));
  const double ra = static_cast<double>(s.a.own_serve_wins) / s.a.own_serves;
  const double rb = static_cast<double>(s.b.own_serve_wins) / s.b.own_serves;
  EXPECT_NEAR(ra, 0.62, 3.0 * std::sqrt(0.62 * 0.38 / s.a.own_serves));
  EXPECT_NEAR(rb, 0.47, 3.0 * std::sqrt(0.47 * 0.53 / s.b.own_serves));
}

TEST(SimulateMatch, WhitewashAndHistogram) {
  const auto s = simulate_match(config({2, 11, 3}, RallyModel::server(1.0, 0.0), 1'000, 2));
  EXPECT_EQ(s.wins_a, 1'000u);
  EXPECT_EQ(s.duration_histogram.at(33), 1'000u);
  EXPECT_EQ(s.final_score_histogram.at({3, 0}), 1'000u);
}

TEST(SimulateMatch, SingleSetMatchesSetSimulation) {
  const auto cfg = config({2, 11, 1}, RallyModel::server(0.55, 0.45), 30'000, 77);
  const auto match = simulate_match(cfg);
  const auto set = simulate_set(cfg);
  EXPECT_EQ(match.wins_a, set.wins_a);
  EXPECT_EQ(match.duration_histogram, set.duration_histogram);
}

TEST(SimulateMatch, AgreesWithExactEngine) {
  const auto model = RallyModel::server(0.5, 0.5);
  constexpr std::uint64_t kTrials = 40'000;
  const auto s = simulate_match(config({5, 21, 3}, model, kTrials, 12));
  const auto mom = match_duration_moments({{5, 21, 3}, model, Player::A});
  EXPECT_NEAR(s.mean_duration(), mom.mean, 3.0 * std::sqrt(mom.variance / kTrials));
  EXPECT_NEAR(s.win_rate_a(), 0.5, 3.0 * std::sqrt(0.25 / kTrials));
}

TEST(DpSetTable, FirstRally) {
  for (int m : {1, 2, 5}) {
    const auto dp = dp_set_table({m, 11, 1}, RallyModel::server(0.63, 0.2), Player::A);
    EXPECT_DOUBLE_EQ(dp.reach(1, 0, Player::A), 0.63);
    EXPECT_DOUBLE_EQ(dp.reach(0, 1, Player::B), 0.37);
    EXPECT_EQ(dp.reach(1, 0, Player::B), 0.0);
  }
}

TEST(DpSetTable, MassConservation) {
  for (int m : {1, 2, 5}) {
    for (int n : {2, 3, 11, 21}) {
      const auto dp = dp_set_table({m, n, 1}, RallyModel::server(0.71, 0.36), Player::B);
      EXPECT_LT(dp.max_mass_defect(), 1e-12);
    }
  }
}

TEST(DpSetTable, ReachSplitEqualsScoreProbability) {
  for (int m : {1, 2, 5}) {
    for (int i = 1; i <= 4; ++i) {
      for (int k = 1; k <= 4; ++k) {
        const auto model = RallyModel::server(0.2 * i, 0.2 * k);
        for (Player f : {Player::A, Player::B}) {
          const auto dp = dp_set_table({m, 26, 1}, model, f);
          for (int a = 0; a <= 25; ++a) {
            for (int b = 0; b <= 25; ++b) {
              if (a > 0) {
                EXPECT_NEAR(dp.reach(a, b, Player::A), score_prob({a, b, Player::A, f}, model, m), 1e-12);
              }
              if (b > 0) {
                EXPECT_NEAR(dp.reach(a, b, Player::B), score_prob({a, b, Player::B, f}, model, m), 1e-12);
              }
            }
          }
        }
      }
    }
  }
}

TEST(DpSetTable, BackwardValueEqualsSetWinProbability) {
  for (int m : {1, 2, 5}) {
    for (int n : {2, 3, 11, 21}) {
      for (int i = 1; i <= 9; ++i) {
        for (int k = 1; k <= 9; ++k) {
          const auto model = RallyModel::server(i / 10.0, k / 10.0);
          const auto dp = dp_set_table({m, n, 1}, model, Player::A);
          EXPECT_NEAR(dp.win_from(0, 0), set_win_probs({m, n, 1}, model, Player::A).a, 1e-10);
        }
      }
    }
  }
}

TEST(DpSetTable, StuckTieReportedOnlyWhenReachable) {
  const auto dp = dp_set_table({1, 2, 1}, RallyModel::server(1.0, 1.0), Player::A);
  EXPECT_THROW(dp.win_from(0, 0), DomainError);
  const auto ok = dp_set_table({5, 3, 1}, RallyModel::server(1.0, 1.0), Player::A);
  EXPECT_EQ(ok.win_from(0, 0), 1.0);
  EXPECT_THROW(ok.reach(30, 0, Player::A), InvalidArgument);
}

}  // namespace
}  // namespace ttprob
