// ttprob: exact set/match probabilities, duration laws, system comparison,
// simulation and strength estimation for (m, n, G) rally scoring.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ttprob/report.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

// Writes through a sibling temporary so a failed run never leaves a partial file.
void write_output(const std::string& body, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ttprob::InvalidArgument("cannot write '" + path + "'");
    out << body;
    if (!out.flush()) throw ttprob::InvalidArgument("cannot write '" + path + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

int main(int argc, char** argv) {
  using ttprob::report::RunConfig;
  CLI::App app{"Exact probabilities for (m, n, G) rally scoring systems"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string first = "A";
  std::string grid;
  std::string old_sys;
  std::string new_sys;
  std::string format = "csv";
  std::string out_path;
  double pa = 0.0;
  double pb = 0.0;
  double p = 0.0;

  auto add_system = [&](CLI::App* sub, bool with_g) {
    sub->add_option("--m", cfg.system.m, "serves per turn")->capture_default_str();
    sub->add_option("--n", cfg.system.n, "points to win a set")->capture_default_str();
    if (with_g) sub->add_option("--G", cfg.system.G, "sets to win a match")->capture_default_str();
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--pa", pa, "P[A wins a rally A serves]");
    sub->add_option("--pb", pb, "P[B wins a rally B serves]");
    sub->add_option("--p", p, "no-server strength of A");
    sub->add_flag("--no-server", cfg.no_server, "use the no-server model");
    sub->add_option("--first", first, "first server, A or B")->capture_default_str();
  };
  auto add_output = [&](CLI::App* sub, bool tabular) {
    if (tabular) {
      sub->add_option("--format", format, "csv or jsonl")
          ->check(CLI::IsMember({"csv", "jsonl"}))
          ->capture_default_str();
    }
    sub->add_option("--out", out_path, "output path (default stdout)");
    sub->add_option("--precision", cfg.precision, "significant digits")->capture_default_str();
  };

  auto* set_prob = app.add_subcommand("set-prob", "set-win probability and duration moments");
  add_system(set_prob, false);
  add_model(set_prob);
  set_prob->add_option("--grid", grid, "sweep: lo:hi:step, or step for step..1-step");
  add_output(set_prob, true);

  auto* match_prob = app.add_subcommand("match-prob", "match-win probability and duration moments");
  add_system(match_prob, true);
  add_model(match_prob);
  match_prob->add_option("--grid", grid, "sweep: lo:hi:step, or step for step..1-step");
  add_output(match_prob, true);

  auto* score_dist = app.add_subcommand("score-dist", "final-score distribution of a set");
  add_system(score_dist, false);
  add_model(score_dist);
  score_dist->add_option("--truncation", cfg.truncation, "tie tail mass threshold");
  add_output(score_dist, true);

  auto* duration_dist = app.add_subcommand("duration-dist", "rally-count distribution of a set or match");
  add_system(duration_dist, true);
  add_model(duration_dist);
  duration_dist->add_flag("--match", cfg.match, "whole match instead of one set");
  duration_dist->add_option("--truncation", cfg.truncation, "tie tail mass threshold");
  add_output(duration_dist, true);

  auto* compare = app.add_subcommand("compare", "old-over-new duration ratios of two systems");
  compare->add_option("--old", old_sys, "old system m,n,G")->required();
  compare->add_option("--new", new_sys, "new system m,n,G")->required();
  add_model(compare);
  compare->add_option("--grid", grid, "sweep: lo:hi:step, or step for step..1-step");
  add_output(compare, true);

  auto* simulate = app.add_subcommand("simulate", "seeded Monte Carlo of sets or matches");
  add_system(simulate, true);
  add_model(simulate);
  simulate->add_option("--trials", cfg.trials, "number of sets or matches")->capture_default_str();
  simulate->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  simulate->add_flag("--match", cfg.match, "simulate whole matches");
  add_output(simulate, false);

  auto* estimate = app.add_subcommand("estimate", "estimate (p_a, p_b) from an observation file");
  estimate->add_option("--input", cfg.input, "JSON-lines observation file")->required();
  estimate->add_flag("--no-server", cfg.no_server, "restrict to the no-server model");
  estimate->add_option("--grid", grid, "likelihood search grid lo:hi:step");
  add_output(estimate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    cfg.command = chosen->get_name();
    auto given = [chosen](const std::string& name) {
      const CLI::Option* opt = chosen->get_option_no_throw(name);
      return opt != nullptr && opt->count() > 0;
    };
    if (given("--pa")) cfg.p_a = pa;
    if (given("--pb")) cfg.p_b = pb;
    if (given("--p")) cfg.p = p;
    if (given("--first")) cfg.first_server = ttprob::player_from_string(first);
    if (!grid.empty()) cfg.grid = ttprob::report::parse_grid(grid);
    if (!old_sys.empty()) cfg.old_system = ttprob::report::parse_system(old_sys);
    if (!new_sys.empty()) cfg.new_system = ttprob::report::parse_system(new_sys);
    cfg.format = format == "jsonl" ? ttprob::report::Format::JsonLines : ttprob::report::Format::Csv;
    if (cfg.command != "compare" && cfg.command != "estimate") ttprob::validate_system(cfg.system);
    write_output(ttprob::report::run(cfg), out_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return 0;
}
