#pragma once

#include <optional>

#include "ttprob/scoring.hpp"

namespace ttprob {

// Decomposition of a rally prefix of an A-set into complete service turns:
// total = K*m + R, with A owning ceil(K/2) turns and B floor(K/2), and the R
// trailing serves belonging to A when K is even.
struct ServeDecomposition {
  int K = 0;
  int R = 0;
  int k1 = 0;
  int k2 = 0;
  Player trailing_server = Player::A;

  /// Serves by A (resp. B) among the first K*m + R rallies.
  constexpr int serves_by_a(int m) const noexcept { return k1 * m + (K % 2 == 0 ? R : 0); }
  constexpr int serves_by_b(int m) const noexcept { return k2 * m + (K % 2 == 1 ? R : 0); }
};

inline ServeDecomposition decompose(int total_rallies, int m) {
  if (total_rallies < 0) throw InvalidArgument("rally count must be non-negative");
  if (m < 1) throw InvalidArgument("m must be >= 1");
  ServeDecomposition d;
  d.K = total_rallies / m;
  d.R = total_rallies % m;
  d.k1 = (d.K + 1) / 2;
  d.k2 = d.K / 2;
  d.trailing_server = d.K % 2 == 0 ? Player::A : Player::B;
  return d;
}

/// Server of the 1-based rally `rally_index` in a set opened by `first_server`.
///
/// Before the tie the serve changes hands every m rallies. When
/// `tie_reached_after` is given (it must be 2(n-1)), rallies after it alternate
/// strictly, starting with whoever the m-rotation would have picked for the
/// first post-tie rally.
inline Player server_of_rally(int rally_index, const ScoringSystem& sys, Player first_server,
                              std::optional<int> tie_reached_after = std::nullopt) {
  if (rally_index < 1) throw InvalidArgument("rally index is 1-based; 0 is not a rally");
  if (sys.m < 1) throw InvalidArgument("m must be >= 1");
  auto rotation = [&](int idx) {
    const int turn = (idx - 1) / sys.m;
    return turn % 2 == 0 ? first_server : other(first_server);
  };
  if (!tie_reached_after) return rotation(rally_index);
  const int tie_at = *tie_reached_after;
  if (tie_at != sys.tie_rally_count()) {
    throw InvalidArgument("tie_reached_after must equal 2(n-1)");
  }
  if (rally_index <= tie_at) return rotation(rally_index);
  const Player opener = rotation(tie_at + 1);
  return (rally_index - tie_at - 1) % 2 == 0 ? opener : other(opener);
}

/// Server of rally `rally_index` when play may have reached the tie; the tie
/// rule applies automatically once the index passes 2(n-1).
inline Player scheduled_server(int rally_index, const ScoringSystem& sys, Player first_server) {
  if (rally_index > sys.tie_rally_count()) {
    return server_of_rally(rally_index, sys, first_server, sys.tie_rally_count());
  }
  return server_of_rally(rally_index, sys, first_server);
}

}  // namespace ttprob
