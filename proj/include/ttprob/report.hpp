#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <locale>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ttprob/estimation.hpp"
#include "ttprob/grid.hpp"
#include "ttprob/match_analytics.hpp"
#include "ttprob/set_analytics.hpp"
#include "ttprob/simulation_oracle.hpp"

namespace ttprob::report {

using Json = nlohmann::ordered_json;

enum class Format { Csv, JsonLines };

// Everything a single CLI invocation depends on. It is echoed at the top of
// every output so a file carries the command that reproduces it.
struct RunConfig {
  std::string command;
  ScoringSystem system{2, 11, 1};
  std::optional<double> p_a;
  std::optional<double> p_b;
  std::optional<double> p;
  bool no_server = false;
  Player first_server = Player::A;
  std::optional<GridSpec> grid;
  std::optional<ScoringSystem> old_system;
  std::optional<ScoringSystem> new_system;
  bool match = false;
  Format format = Format::Csv;
  std::uint64_t seed = 0;
  std::uint64_t trials = 100000;
  double truncation = kDefaultTruncation;
  int precision = 6;
  std::string input;
};

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

/// Locale-independent shortest-of-%g rendering with `precision` significant digits.
inline std::string format_number(double v, int precision) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

/// Shortest text that reads back as exactly `v`.
inline std::string format_exact(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double rounded(double v, int precision) {
  const std::string s = format_number(v, precision);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

inline std::string system_string(const ScoringSystem& s) {
  return std::to_string(s.m) + "," + std::to_string(s.n) + "," + std::to_string(s.G);
}

inline std::string grid_string(const GridSpec& g) {
  return format_exact(g.lo) + ":" + format_exact(g.hi) + ":" + format_exact(g.step);
}

/// Parses "m,n,G".
inline ScoringSystem parse_system(const std::string& text) {
  ScoringSystem s;
  char c1 = 0;
  char c2 = 0;
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  if (!(in >> s.m >> c1 >> s.n >> c2 >> s.G) || c1 != ',' || c2 != ',' || !in.eof()) {
    throw InvalidArgument("system must be written m,n,G, got '" + text + "'");
  }
  validate_system(s);
  return s;
}

/// Parses "lo:hi:step", or a bare "step" meaning step:1-step:step.
inline GridSpec parse_grid(const std::string& text) {
  auto number = [&](std::string_view part) {
    double v = 0.0;
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (res.ec != std::errc{} || res.ptr != part.data() + part.size()) {
      throw InvalidArgument("bad grid specification '" + text + "'");
    }
    return v;
  };
  const auto first = text.find(':');
  GridSpec g;
  if (first == std::string::npos) {
    g.step = number(text);
    g.lo = g.step;
    g.hi = 1.0 - g.step;
  } else {
    const auto second = text.find(':', first + 1);
    if (second == std::string::npos) throw InvalidArgument("grid must be lo:hi:step, got '" + text + "'");
    const std::string_view sv(text);
    g.lo = number(sv.substr(0, first));
    g.hi = number(sv.substr(first + 1, second - first - 1));
    g.step = number(sv.substr(second + 1));
  }
  g.values();  // validates
  return g;
}

inline std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> e;
  auto opt = [&](const std::optional<double>& v) { return v ? format_exact(*v) : std::string("-"); };
  e.emplace_back("command", c.command);
  e.emplace_back("system", system_string(c.system));
  e.emplace_back("pa", opt(c.p_a));
  e.emplace_back("pb", opt(c.p_b));
  e.emplace_back("p", opt(c.p));
  e.emplace_back("no_server", c.no_server ? "true" : "false");
  e.emplace_back("first_server", std::string(1, to_char(c.first_server)));
  e.emplace_back("grid", c.grid ? grid_string(*c.grid) : "-");
  e.emplace_back("old", c.old_system ? system_string(*c.old_system) : "-");
  e.emplace_back("new", c.new_system ? system_string(*c.new_system) : "-");
  e.emplace_back("match", c.match ? "true" : "false");
  e.emplace_back("format", c.format == Format::Csv ? "csv" : "jsonl");
  e.emplace_back("seed", std::to_string(c.seed));
  e.emplace_back("trials", std::to_string(c.trials));
  e.emplace_back("truncation", format_exact(c.truncation));
  e.emplace_back("precision", std::to_string(c.precision));
  e.emplace_back("input", c.input.empty() ? "-" : c.input);
  return e;
}

inline Json config_json(const RunConfig& c) {
  Json j = Json::object();
  for (const auto& [k, v] : config_entries(c)) j[k] = v;
  return j;
}

// A table of numeric cells (or short labels) rendered as CSV or JSON lines.
class Table {
 public:
  using Cell = std::variant<double, std::string>;

  Table(const RunConfig& cfg, std::vector<std::string> columns)
      : cfg_(cfg), columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row) { rows_.push_back(std::move(row)); }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

  std::string render() const {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    if (cfg_.format == Format::Csv) {
      out << "# ttprob " << cfg_.command << '\n';
      for (const auto& [k, v] : config_entries(cfg_)) out << "# " << k << '=' << v << '\n';
      for (const auto& w : warnings_) out << "# warning: " << w << '\n';
      for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
      out << '\n';
      for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (i) out << ',';
          if (const auto* d = std::get_if<double>(&row[i])) {
            out << format_number(*d, cfg_.precision);
          } else {
            out << std::get<std::string>(row[i]);
          }
        }
        out << '\n';
      }
      return out.str();
    }
    Json head = Json::object();
    head["run_config"] = config_json(cfg_);
    head["warnings"] = warnings_;
    out << head.dump() << '\n';
    for (const auto& row : rows_) {
      Json j = Json::object();
      for (std::size_t i = 0; i < row.size() && i < columns_.size(); ++i) {
        if (const auto* d = std::get_if<double>(&row[i])) {
          j[columns_[i]] = rounded(*d, cfg_.precision);
        } else if (std::get<std::string>(row[i]).empty()) {
          j[columns_[i]] = nullptr;
        } else {
          j[columns_[i]] = std::get<std::string>(row[i]);
        }
      }
      out << j.dump() << '\n';
    }
    return out.str();
  }

 private:
  const RunConfig& cfg_;
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::string> warnings_;
};

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace detail {

inline RallyModel single_model(const RunConfig& c) {
  if (c.no_server || c.p) {
    if (!c.p) throw InvalidArgument("--no-server needs --p");
    return RallyModel::no_server(*c.p);
  }
  if (!c.p_a || !c.p_b) throw InvalidArgument("need --pa and --pb (or --no-server --p)");
  return RallyModel::server(*c.p_a, *c.p_b);
}

// Models for a sweep. With a grid: the no-server line over p, a p_a line at
// fixed --pb, a p_b line at fixed --pa, or the full (p_a, p_b) square.
inline std::vector<RallyModel> sweep_models(const RunConfig& c) {
  if (!c.grid) return {single_model(c)};
  const std::vector<double> axis = c.grid->values();
  std::vector<RallyModel> models;
  if (c.no_server) {
    for (double p : axis) models.push_back(RallyModel::no_server(p));
  } else if (c.p_b && !c.p_a) {
    for (double pa : axis) models.push_back(RallyModel::server(pa, *c.p_b));
  } else if (c.p_a && !c.p_b) {
    for (double pb : axis) models.push_back(RallyModel::server(*c.p_a, pb));
  } else if (!c.p_a && !c.p_b) {
    for (double pa : axis) {
      for (double pb : axis) models.push_back(RallyModel::server(pa, pb));
    }
  } else {
    throw InvalidArgument("--grid sweeps p_a and/or p_b; do not fix both --pa and --pb");
  }
  return models;
}

inline void add_validation_warnings(Table& t, const ScoringSystem& sys,
                                    const std::vector<RallyModel>& models) {
  bool degenerate = false;
  for (const auto& m : models) degenerate = degenerate || m.is_degenerate();
  const RallyModel probe = models.empty() ? RallyModel::no_server(0.5) : models.front();
  for (const auto& w : validate(sys, probe).warnings) {
    if (w.rfind("degenerate", 0) != 0) t.add_warning(w);
  }
  if (degenerate) t.add_warning("degenerate model: a rally probability is exactly 0 or 1");
}

}  // namespace detail

/// set-prob / match-prob rows: p_a, p_b, win_prob, mean_duration, var_duration.
inline std::string cmd_prob(const RunConfig& c) {
  validate_system(c.system);
  const auto models = detail::sweep_models(c);
  Table t(c, {"p_a", "p_b", "win_prob", "mean_duration", "var_duration"});
  detail::add_validation_warnings(t, c.system, models);
  for (const auto& model : models) {
    double win = 0.0;
    Moments mom;
    if (c.match) {
      const MatchQuery q{c.system, model, c.first_server};
      win = match_win_prob(q);
      mom = match_duration_moments(q);
    } else {
      win = set_win_probs(c.system, model, c.first_server).a;
      mom = duration_moments(c.system, model, c.first_server);
    }
    t.add_row({model.p_a(), model.p_b(), win, mom.mean, mom.variance});
  }
  return t.render();
}

/// Final-score pmf rows plus a tail footer.
inline std::string cmd_score_dist(const RunConfig& c) {
  validate_system(c.system);
  const RallyModel model = detail::single_model(c);
  const FinalScorePmf pmf = final_score_distribution(c.system, model, c.first_server, c.truncation);
  Table t(c, {"winner", "score_a", "score_b", "loser_points", "probability"});
  detail::add_validation_warnings(t, c.system, {model});
  for (std::size_t k = 0; k < pmf.a_wins.size(); ++k) {
    const int loser = static_cast<int>(k);
    const double w = pmf.winner_points(loser);
    t.add_row({std::string("A"), w, static_cast<double>(loser), static_cast<double>(loser), pmf.a_wins[k]});
  }
  for (std::size_t k = 0; k < pmf.b_wins.size(); ++k) {
    const int loser = static_cast<int>(k);
    const double w = pmf.winner_points(loser);
    t.add_row({std::string("B"), static_cast<double>(loser), w, static_cast<double>(loser), pmf.b_wins[k]});
  }
  t.add_row({std::string("tail"), std::string(), std::string(), std::string(), pmf.tail()});
  return t.render();
}

/// Set (or, with --match, match) duration pmf rows plus a tail footer.
inline std::string cmd_duration_dist(const RunConfig& c) {
  validate_system(c.system);
  const RallyModel model = detail::single_model(c);
  const Pmf pmf = c.match ? match_duration_pmf({c.system, model, c.first_server}, c.truncation)
                          : duration_pmf(c.system, model, c.first_server, c.truncation);
  Table t(c, {"rallies", "probability"});
  detail::add_validation_warnings(t, c.system, {model});
  for (int d = 0; d <= pmf.max_value(); ++d) t.add_row({static_cast<double>(d), pmf.at(d)});
  t.add_row({std::string("tail"), pmf.tail});
  return t.render();
}

inline std::string cmd_compare(const RunConfig& c) {
  if (!c.old_system || !c.new_system) throw InvalidArgument("compare needs --old and --new");
  const auto models = detail::sweep_models(c);
  const auto rows = compare_systems(*c.old_system, *c.new_system, models, c.first_server);
  Table t(c, {"p_a", "p_b", "win_prob_old", "win_prob_new", "mean_old", "mean_new", "std_old", "std_new",
              "ratio_mean", "ratio_std"});
  detail::add_validation_warnings(t, *c.old_system, models);
  detail::add_validation_warnings(t, *c.new_system, models);
  for (const auto& r : rows) {
    t.add_row({r.model.p_a(), r.model.p_b(), r.win_prob_old, r.win_prob_new, r.mean_old, r.mean_new,
               r.std_old, r.std_new, r.ratio_mean, r.ratio_std});
  }
  return t.render();
}

inline Json summary_json(const SimSummary& s, int precision) {
  Json j = Json::object();
  const double rate = s.win_rate_a();
  j["trials"] = s.trials;
  j["wins_a"] = s.wins_a;
  j["win_rate_a"] = rounded(rate, precision);
  j["win_rate_se"] = rounded(std::sqrt(rate * (1.0 - rate) / static_cast<double>(s.trials)), precision);
  j["mean_duration"] = rounded(s.mean_duration(), precision);
  j["duration_variance"] = rounded(s.duration_variance(), precision);
  Json hist = Json::object();
  for (const auto& [d, count] : s.duration_histogram) hist[std::to_string(d)] = count;
  j["duration_histogram"] = hist;
  Json scores = Json::array();
  for (const auto& [score, count] : s.final_score_histogram) {
    scores.push_back({{"score_a", score.first}, {"score_b", score.second}, {"count", count}});
  }
  j["final_score_histogram"] = scores;
  j["serve_tallies"] = {
      {"A", {{"own_serve_wins", s.a.own_serve_wins}, {"own_serves", s.a.own_serves}}},
      {"B", {{"own_serve_wins", s.b.own_serve_wins}, {"own_serves", s.b.own_serves}}}};
  return j;
}

inline std::string cmd_simulate(const RunConfig& c) {
  validate_system(c.system);
  const RallyModel model = detail::single_model(c);
  SimConfig sim;
  sim.trials = c.trials;
  sim.seed = c.seed;
  sim.system = c.system;
  sim.model = model;
  sim.first_server = c.first_server;
  const SimSummary s = c.match ? simulate_match(sim) : simulate_set(sim);
  Json j = Json::object();
  j["run_config"] = config_json(c);
  j["warnings"] = validate(c.system, model).warnings;
  j["mode"] = c.match ? "match" : "set";
  j["summary"] = summary_json(s, c.precision);
  return j.dump(2) + "\n";
}

// One line of an observation file.
struct ObservationRecord {
  ScoreObservation score;
  std::optional<ServeCountData> tallies;
};

/// Reads JSON lines {m, n, first_server, score_a, score_b[, a_sw, a_s, b_sw, b_s]}.
/// Blank lines and lines starting with '#' are skipped.
inline std::vector<ObservationRecord> parse_observations(std::istream& in) {
  std::vector<ObservationRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      const Json j = Json::parse(line);
      ObservationRecord r;
      r.score.system = {j.at("m").get<int>(), j.at("n").get<int>(), 1};
      r.score.first_server = player_from_string(j.at("first_server").get<std::string>());
      r.score.score_a = j.at("score_a").get<int>();
      r.score.score_b = j.at("score_b").get<int>();
      const bool has_any = j.contains("a_sw") || j.contains("a_s") || j.contains("b_sw") || j.contains("b_s");
      if (has_any) {
        r.tallies = ServeCountData{j.at("a_sw").get<std::uint64_t>(), j.at("a_s").get<std::uint64_t>(),
                                   j.at("b_sw").get<std::uint64_t>(), j.at("b_s").get<std::uint64_t>()};
      }
      out.push_back(r);
    } catch (const Json::exception& e) {
      throw InvalidArgument("observation line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (out.empty()) throw InvalidArgument("observation file has no records");
  return out;
}

/// Serve-count estimate when every record carries tallies, score likelihood otherwise.
inline std::string cmd_estimate(const RunConfig& c, std::istream& input) {
  const auto records = parse_observations(input);
  bool all_tallies = true;
  for (const auto& r : records) all_tallies = all_tallies && r.tallies.has_value();
  Json j = Json::object();
  j["run_config"] = config_json(c);
  j["observations"] = records.size();
  const int prec = c.precision;
  if (all_tallies) {
    ServeCountData pooled;
    for (const auto& r : records) {
      pooled.a_own_serve_wins += r.tallies->a_own_serve_wins;
      pooled.a_own_serves += r.tallies->a_own_serves;
      pooled.b_own_serve_wins += r.tallies->b_own_serve_wins;
      pooled.b_own_serves += r.tallies->b_own_serves;
    }
    const ServeCountEstimate e = mle_serve_counts(pooled);
    j["estimator"] = "serve_counts";
    j["p_a"] = rounded(e.p_a, prec);
    j["p_b"] = rounded(e.p_b, prec);
    j["se_a"] = rounded(e.se_a, prec);
    j["se_b"] = rounded(e.se_b, prec);
    j["on_boundary"] = e.on_boundary;
    j["warnings"] = e.warnings;
  } else {
    std::vector<ScoreObservation> obs;
    for (const auto& r : records) obs.push_back(r.score);
    ScoreMleOptions opt;
    if (c.grid) opt.grid = *c.grid;
    opt.no_server = c.no_server;
    const ScoreMle e = mle_from_scores(obs, opt);
    j["estimator"] = "score_likelihood";
    j["p_a"] = rounded(e.p_a, prec);
    j["p_b"] = rounded(e.p_b, prec);
    j["log_likelihood"] = rounded(e.log_likelihood, prec);
    j["grid_p_a"] = rounded(e.grid_p_a, prec);
    j["grid_p_b"] = rounded(e.grid_p_b, prec);
    j["grid_log_likelihood"] = rounded(e.grid_log_likelihood, prec);
    j["grid_points"] = e.grid_points;
    j["tied_grid_points"] = e.tied_grid_points;
    j["on_boundary"] = e.on_boundary;
  }
  return j.dump(2) + "\n";
}

/// Dispatches on c.command. `estimate` reads c.input.
inline std::string run(const RunConfig& c) {
  if (c.precision < 1 || c.precision > 17) throw InvalidArgument("precision must be in 1..17");
  if (!(c.truncation > 0.0 && c.truncation < 1.0)) throw InvalidArgument("truncation must be in (0, 1)");
  if (c.command == "set-prob") return cmd_prob(c);
  if (c.command == "match-prob") {
    RunConfig m = c;
    m.match = true;
    return cmd_prob(m);
  }
  if (c.command == "score-dist") return cmd_score_dist(c);
  if (c.command == "duration-dist") return cmd_duration_dist(c);
  if (c.command == "compare") return cmd_compare(c);
  if (c.command == "simulate") return cmd_simulate(c);
  if (c.command == "estimate") {
    std::ifstream in(c.input);
    if (!in) throw InvalidArgument("cannot open observation file '" + c.input + "'");
    return cmd_estimate(c, in);
  }
  throw InvalidArgument("unknown command '" + c.command + "'");
}

}  // namespace ttprob::report
