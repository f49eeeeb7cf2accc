#pragma once

// Brute-force oracles for the test suites. Nothing here calls the library's
// combinatorial or DP code: the serve rule is re-derived from the rules of
// play and every probability comes from walking explicit rally sequences.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <tuple>
#include <vector>

namespace oracle {

// 0 = A, 1 = B.
inline int server(int rally, int m, int n, int first) {
  const int tie_at = 2 * (n - 1);
  auto rot = [&](int r) { return ((r - 1) / m) % 2 == 0 ? first : 1 - first; };
  if (rally <= tie_at) return rot(rally);
  const int opener = rot(tie_at + 1);
  return (rally - tie_at - 1) % 2 == 0 ? opener : 1 - opener;
}

inline double a_wins(int srv, double pa, double pb) { return srv == 0 ? pa : 1.0 - pb; }

// P[(alpha, beta, last scorer, A's own-serve points)] after `t` rallies of the
// m-rotation, summed over all 2^t sequences. Key: (alpha, beta, last, j).
inline std::map<std::tuple<int, int, int, int>, double> prefix_events(int t, int m, int first, double pa,
                                                                        double pb) {
  std::map<std::tuple<int, int, int, int>, double> out;
  for (std::uint32_t mask = 0; mask < (1u << t); ++mask) {
    double prob = 1.0;
    int a = 0, b = 0, j = 0, last = 0;
    for (int r = 1; r <= t; ++r) {
      const int srv = ((r - 1) / m) % 2 == 0 ? first : 1 - first;
      const bool a_scores = (mask >> (r - 1)) & 1u;
      const double pw = a_wins(srv, pa, pb);
      prob *= a_scores ? pw : 1.0 - pw;
      if (a_scores) {
        ++a;
        if (srv == 0) ++j;
        last = 0;
      } else {
        ++b;
        last = 1;
      }
    }
    out[{a, b, last, j}] += prob;
  }
  return out;
}

struct SetEnumeration {
  std::map<std::pair<int, int>, double> final_scores;  // (score_a, score_b)
  std::map<int, double> durations;
  double a_wins = 0.0;
  double live_at_cutoff = 0.0;  // mass still playing after `depth` rallies
};

// Walks every rally sequence of one set up to `depth` rallies. When
// `geometric_tail` is set, live mass at the cutoff (always a level tie when
// depth is even and past the tie) is continued with the pair-level closed form.
inline SetEnumeration enumerate_set(int m, int n, int first, double pa, double pb, int depth,
                                    bool geometric_tail, int tail_pairs = 400) {
  SetEnumeration e;
  std::function<void(int, int, int, double)> walk = [&](int a, int b, int rally, double prob) {
    if (prob == 0.0) return;
    if (std::max(a, b) >= n && std::abs(a - b) >= 2) {
      e.final_scores[{a, b}] += prob;
      e.durations[a + b] += prob;
      if (a > b) e.a_wins += prob;
      return;
    }
    if (rally > depth) {
      e.live_at_cutoff += prob;
      if (geometric_tail) {
        // Level tie: the next two rallies are served by both players.
        const double x = a_wins(server(rally, m, n, first), pa, pb);
        const double y = a_wins(server(rally + 1, m, n, first), pa, pb);
        const double win_a = x * y;
        const double win_b = (1 - x) * (1 - y);
        const double split = 1.0 - win_a - win_b;
        double level = prob;
        for (int k = 1; k <= tail_pairs; ++k) {
          e.final_scores[{a + k + 1, b + k - 1}] += level * win_a;
          e.final_scores[{a + k - 1, b + k + 1}] += level * win_b;
          e.durations[a + b + 2 * k] += level * (win_a + win_b);
          e.a_wins += level * win_a;
          level *= split;
        }
      }
      return;
    }
    const double p = a_wins(server(rally, m, n, first), pa, pb);
    walk(a + 1, b, rally + 1, prob * p);
    walk(a, b + 1, rally + 1, prob * (1.0 - p));
  };
  walk(0, 0, 1, 1.0);
  return e;
}

// Whole matches, first to G sets with alternating set openers, up to `depth`
// total rallies. Returns the rally-count law of finished matches.
inline std::map<int, double> enumerate_match(int m, int n, int G, int first, double pa, double pb,
                                             int depth, double* live_at_cutoff = nullptr) {
  std::map<int, double> out;
  double live = 0.0;
  std::function<void(int, int, int, int, int, int, double)> walk =
      [&](int sets_a, int sets_b, int a, int b, int rally_in_set, int total, double prob) {
        if (prob == 0.0) return;
        if (std::max(a, b) >= n && std::abs(a - b) >= 2) {
          (a > b ? sets_a : sets_b) += 1;
          if (sets_a == G || sets_b == G) {
            out[total] += prob;
            return;
          }
          a = b = 0;
          rally_in_set = 1;
        }
        if (total >= depth) {
          live += prob;
          return;
        }
        const int set_index = sets_a + sets_b;
        const int opener = set_index % 2 == 0 ? first : 1 - first;
        const double p = a_wins(server(rally_in_set, m, n, opener), pa, pb);
        walk(sets_a, sets_b, a + 1, b, rally_in_set + 1, total + 1, prob * p);
        walk(sets_a, sets_b, a, b + 1, rally_in_set + 1, total + 1, prob * (1.0 - p));
      };
  walk(0, 0, 0, 0, 1, 0, 1.0);
  if (live_at_cutoff) *live_at_cutoff = live;
  return out;
}

// P[first-to-G race won] by listing every set-winner sequence explicitly.
inline double race_by_sequences(int G, const std::function<double(int)>& p_set_won_at_index) {
  double total = 0.0;
  std::function<void(int, int, double)> walk = [&](int wa, int wb, double prob) {
    if (wa == G) {
      total += prob;
      return;
    }
    if (wb == G) return;
    const double q = p_set_won_at_index(wa + wb);
    walk(wa + 1, wb, prob * q);
    walk(wa, wb + 1, prob * (1.0 - q));
  };
  walk(0, 0, 1.0);
  return total;
}

}  // namespace oracle
