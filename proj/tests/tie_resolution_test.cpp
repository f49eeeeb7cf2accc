#include "ttprob/tie_resolution.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ttprob/simulation_oracle.hpp"

namespace ttprob {
namespace {

TEST(TieParameters, PartitionOfOnePair) {
  for (int i = 0; i <= 20; ++i) {
    for (int k = 0; k <= 20; ++k) {
      const TieParameters t(RallyModel::server(i / 20.0, k / 20.0));
      EXPECT_NEAR(t.win_pair_a + t.win_pair_b + t.continue_pair, 1.0, 4e-16);
      const bool stuck_model = (i == 0 && k == 0) || (i == 20 && k == 20);
      EXPECT_EQ(t.stuck(), stuck_model);
    }
  }
}

TEST(TieWinProbs, Examples) {
  auto w = tie_win_probs(RallyModel::no_server(0.5));
  EXPECT_DOUBLE_EQ(w.first, 0.5);
  EXPECT_DOUBLE_EQ(w.second, 0.5);
  w = tie_win_probs(RallyModel::no_server(0.6));
  EXPECT_NEAR(w.first, 0.36 / 0.52, 1e-15);
  EXPECT_NEAR(w.second, 0.16 / 0.52, 1e-15);
  w = tie_win_probs(RallyModel::server(1.0, 0.0));
  EXPECT_EQ(w.first, 1.0);
  EXPECT_EQ(w.second, 0.0);
}

// Independent playouts: rally by rally with alternating serve, until one side
// leads by two.
TEST(TieWinProbs, AgreesWithTiePlayouts) {
  constexpr int kPlayouts = 1'000'000;
  const auto model = RallyModel::no_server(0.6);
  Xoshiro256 rng(20261016);
  long a_wins = 0;
  long long rallies = 0;
  for (int i = 0; i < kPlayouts; ++i) {
    int lead = 0;
    Player srv = Player::A;
    while (std::abs(lead) < 2) {
      lead += rng.bernoulli(model.a_wins_rally(srv)) ? 1 : -1;
      srv = other(srv);
      ++rallies;
    }
    if (lead > 0) ++a_wins;
  }
  const double p = tie_win_probs(model).first;
  const double rate = static_cast<double>(a_wins) / kPlayouts;
  EXPECT_NEAR(rate, p, 3.0 * std::sqrt(p * (1 - p) / kPlayouts));
  const auto mom = tie_extra_moments(model);
  const double mean = static_cast<double>(rallies) / kPlayouts;
  EXPECT_NEAR(mom.mean, 2.0 / 0.52, 1e-14);
  EXPECT_NEAR(mean, mom.mean, 3.0 * std::sqrt(mom.variance / kPlayouts));
}

TEST(TieWinProbs, SumToOneOnGrid) {
  for (int i = 0; i <= 20; ++i) {
    for (int k = 0; k <= 20; ++k) {
      const auto model = RallyModel::server(i / 20.0, k / 20.0);
      if (TieParameters(model).stuck()) {
        EXPECT_THROW(tie_win_probs(model), DomainError);
        continue;
      }
      const auto w = tie_win_probs(model);
      EXPECT_NEAR(w.first + w.second, 1.0, 1e-12);
    }
    const double p = i / 20.0;
    const auto w = tie_win_probs(RallyModel::no_server(p));
    EXPECT_EQ(w.first, p * p / (1.0 - 2.0 * p * (1.0 - p)));
  }
}

TEST(TieWinProbs, StuckTieIsAnError) {
  EXPECT_THROW(tie_win_probs(RallyModel::server(1.0, 1.0)), DomainError);
  EXPECT_THROW(tie_extra_moments(RallyModel::server(0.0, 0.0)), DomainError);
  EXPECT_THROW(tie_extra_pmf(RallyModel::server(1.0, 1.0)), DomainError);
}

TEST(TieExtraDurationPmf, Examples) {
  EXPECT_DOUBLE_EQ(tie_extra_duration_pmf(RallyModel::no_server(0.5), 1), 0.5);
  EXPECT_DOUBLE_EQ(tie_extra_duration_pmf(RallyModel::no_server(0.5), 3), 0.125);
  EXPECT_NEAR(tie_extra_duration_pmf(RallyModel::server(0.6, 0.4), 2), 0.2496, 1e-15);
  EXPECT_THROW(tie_extra_duration_pmf(RallyModel::no_server(0.5), 0), InvalidArgument);
}

// Four post-tie rallies, served A, B, A, B: the set ends at rally 4 exactly when
// the first pair splits and the second does not.
TEST(TieExtraDurationPmf, MatchesFourRallyEnumeration) {
  const double pa = 0.6, pb = 0.4;
  double ends_at_four = 0.0;
  for (int mask = 0; mask < 16; ++mask) {
    double prob = 1.0;
    int lead = 0;
    int ended_at = 0;
    for (int r = 0; r < 4 && ended_at == 0; ++r) {
      const double p = r % 2 == 0 ? pa : 1.0 - pb;
      const bool a = (mask >> r) & 1;
      prob *= a ? p : 1.0 - p;
      lead += a ? 1 : -1;
      if (std::abs(lead) == 2) ended_at = r + 1;
    }
    if (ended_at == 4) ends_at_four += prob;
  }
  EXPECT_NEAR(tie_extra_duration_pmf(RallyModel::server(pa, pb), 2), ends_at_four, 1e-15);
}

TEST(TieExtraMoments, Examples) {
  auto m = tie_extra_moments(RallyModel::no_server(0.5));
  EXPECT_DOUBLE_EQ(m.mean, 4.0);
  EXPECT_DOUBLE_EQ(m.variance, 8.0);
  m = tie_extra_moments(RallyModel::server(1.0, 0.0));
  EXPECT_EQ(m.mean, 2.0);
  EXPECT_EQ(m.variance, 0.0);
}

TEST(TieExtraMoments, MatchTruncatedPmf) {
  for (int i = 1; i <= 19; i += 2) {
    for (int k = 1; k <= 19; k += 3) {
      const auto model = RallyModel::server(i / 20.0, k / 20.0);
      const auto pmf = tie_extra_pmf(model, 1e-14);
      const auto m = tie_extra_moments(model);
      EXPECT_NEAR(pmf.truncated_mean(), m.mean, 1e-10 * std::max(1.0, m.mean));
      EXPECT_NEAR(pmf.truncated_variance(), m.variance, 1e-10 * std::max(1.0, m.variance));
    }
  }
}

TEST(TieExtraPmf, ShapeAndTail) {
  const auto model = RallyModel::server(0.7, 0.45);
  const TieParameters t(model);
  const auto pmf = tie_extra_pmf(model);
  EXPECT_EQ(pmf.offset, 2);
  const int pairs = (pmf.max_value()) / 2;
  EXPECT_NEAR(pmf.tail, std::pow(t.continue_pair, pairs), 1e-15);
  EXPECT_LT(pmf.tail, kDefaultTruncation);
  EXPECT_NEAR(pmf.stored_mass() + pmf.tail, 1.0, 1e-12);
  for (int d = 3; d <= pmf.max_value(); d += 2) EXPECT_EQ(pmf.at(d), 0.0);
  for (int l = 1; l <= pairs; ++l) EXPECT_NEAR(pmf.at(2 * l), tie_extra_duration_pmf(model, l), 1e-16);
}

}  // namespace
}  // namespace ttprob
