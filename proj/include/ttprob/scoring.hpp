#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ttprob {

/// Bad parameters: out-of-range probabilities, malformed systems or states.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Well-formed inputs for which the requested quantity does not exist
/// (a tie that never resolves, a set that is already decided, no data).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Player { A, B };

constexpr Player other(Player p) noexcept { return p == Player::A ? Player::B : Player::A; }

constexpr char to_char(Player p) noexcept { return p == Player::A ? 'A' : 'B'; }

inline Player player_from_string(const std::string& s) {
  if (s == "A" || s == "a") return Player::A;
  if (s == "B" || s == "b") return Player::B;
  throw InvalidArgument("player must be A or B, got '" + s + "'");
}

/// The (m, n, G) rule triple: m serves per turn, n points per set, G sets per match.
struct ScoringSystem {
  int m = 2;
  int n = 11;
  int G = 1;

  constexpr bool m_divides_n_minus_1() const noexcept { return m > 0 && (n - 1) % m == 0; }

  /// Rally count at which the score (n-1, n-1) is reached.
  constexpr int tie_rally_count() const noexcept { return 2 * (n - 1); }

  friend constexpr bool operator==(const ScoringSystem&, const ScoringSystem&) = default;
};

enum class ModelKind { Server, NoServer };

// Rally model. p_a is the probability A wins a rally A serves, p_b the probability
// B wins a rally B serves. A no-server model with strength p stores p_a = p,
// p_b = 1 - p.
class RallyModel {
 public:
  static RallyModel server(double p_a, double p_b) {
    check_probability(p_a, "p_a");
    check_probability(p_b, "p_b");
    return RallyModel(ModelKind::Server, p_a, p_b);
  }

  static RallyModel no_server(double p) {
    check_probability(p, "p");
    return RallyModel(ModelKind::NoServer, p, 1.0 - p);
  }

  ModelKind kind() const noexcept { return kind_; }
  double p_a() const noexcept { return p_a_; }
  double p_b() const noexcept { return p_b_; }

  /// Probability that A wins a rally served by `server`.
  double a_wins_rally(Player server) const noexcept {
    return server == Player::A ? p_a_ : 1.0 - p_b_;
  }

  bool is_degenerate() const noexcept {
    return p_a_ == 0.0 || p_a_ == 1.0 || p_b_ == 0.0 || p_b_ == 1.0;
  }

  friend bool operator==(const RallyModel&, const RallyModel&) = default;

 private:
  RallyModel(ModelKind kind, double p_a, double p_b) : kind_(kind), p_a_(p_a), p_b_(p_b) {}

  static void check_probability(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument(std::string(name) + " must lie in [0, 1], got " + std::to_string(v));
    }
  }

  ModelKind kind_;
  double p_a_;
  double p_b_;
};

/// The model as seen from B's side: (p_a, p_b) -> (p_b, p_a).
inline RallyModel swap_roles(const RallyModel& model) {
  if (model.kind() == ModelKind::NoServer) return RallyModel::no_server(model.p_b());
  return RallyModel::server(model.p_b(), model.p_a());
}

enum class Phase { PreTie, Tie };

struct ScoreState {
  int alpha = 0;
  int beta = 0;
  Phase phase = Phase::PreTie;

  friend constexpr bool operator==(const ScoreState&, const ScoreState&) = default;
};

enum class StateStatus { Live, Terminal, Invalid };

/// Classifies a state against a system. Live states are those from which play continues.
inline StateStatus classify(const ScoreState& s, const ScoringSystem& sys) {
  const int n = sys.n;
  if (s.alpha < 0 || s.beta < 0) return StateStatus::Invalid;
  if (s.phase == Phase::PreTie) {
    if (s.alpha <= n - 1 && s.beta <= n - 1) return StateStatus::Live;
    if ((s.alpha == n && s.beta <= n - 2) || (s.beta == n && s.alpha <= n - 2)) {
      return StateStatus::Terminal;
    }
    return StateStatus::Invalid;
  }
  if (s.alpha < n - 1 || s.beta < n - 1) return StateStatus::Invalid;
  const int lead = s.alpha - s.beta;
  if (lead >= -1 && lead <= 1) return StateStatus::Live;
  if (lead == 2 || lead == -2) return StateStatus::Terminal;
  return StateStatus::Invalid;
}

struct ValidationReport {
  std::vector<std::string> warnings;

  bool ok() const noexcept { return true; }
  bool has_warnings() const noexcept { return !warnings.empty(); }
};

inline void validate_system(const ScoringSystem& sys) {
  if (sys.m < 1) throw InvalidArgument("m must be >= 1, got " + std::to_string(sys.m));
  if (sys.n < 2) throw InvalidArgument("n must be >= 2, got " + std::to_string(sys.n));
  if (sys.G < 1) throw InvalidArgument("G must be >= 1, got " + std::to_string(sys.G));
}

/// Throws InvalidArgument on malformed systems; soft problems come back as warnings.
/// Model probabilities are range-checked at construction.
inline ValidationReport validate(const ScoringSystem& sys, const RallyModel& model) {
  validate_system(sys);
  ValidationReport report;
  if (!sys.m_divides_n_minus_1()) {
    report.warnings.push_back("(n-1) is not a multiple of m: set-win probabilities depend on the first server");
  }
  if (model.is_degenerate()) {
    report.warnings.push_back("degenerate model: a rally probability is exactly 0 or 1");
  }
  return report;
}

}  // namespace ttprob
