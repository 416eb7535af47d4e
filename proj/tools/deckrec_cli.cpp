#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "deckrec/pipeline.hpp"
#include "deckrec/report.hpp"

using namespace deckrec;

int main(int argc, char** argv) {
  CLI::App app{"Deck transformation recovery for parametric polynomial systems"};
  std::string command;
  RunConfig cfg;
  std::size_t expected = 0;
  bool json_stdout = false;

  app.add_option("command", command, "analyze | monodromy | scalings | interpolate | verify")->required();
  app.add_option("--system", cfg.system_path, "System file")->required();
  app.add_option("--seed-pair", cfg.seed_path, "Seed file 'x: ...; p: ...'");
  app.add_option("--formulas", cfg.formulas_path, "Formulas file for verify");
  app.add_option("--rng-seed", cfg.rng_seed, "Random seed")->capture_default_str();
  app.add_option("--degree-bound", cfg.degree_bound, "Total degree bound D*")->capture_default_str();
  app.add_flag("--param-dependent", cfg.parameter_dependent, "Allow parameters in formulas");
  app.add_flag("--graded", cfg.graded, "Grade monomials by scaling symmetries");
  app.add_option("--expected-degree", expected, "Known fiber degree");
  app.add_option("--threads", cfg.threads, "Path tracking threads")->capture_default_str();
  app.add_option("--out", cfg.output_path, "Write the JSON report here");
  app.add_flag("--json", json_stdout, "Print JSON instead of text");
  app.add_flag("--timings", cfg.timings, "Include stage timings in JSON");
  app.add_option("--verify-trials", cfg.verify_trials, "Fresh fibers for verification")->capture_default_str();
  app.add_option("--tol-newton", cfg.monodromy.tracker.newton_tol)->capture_default_str();
  app.add_option("--tol-path", cfg.monodromy.tracker.path_tol)->capture_default_str();
  app.add_option("--tol-rank", cfg.interp.rank_tol)->capture_default_str();
  app.add_option("--tol-truncate", cfg.interp.truncate_tol)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  System system;
  std::optional<SeedPair> seed;
  std::optional<DeckMap> formulas;
  try {
    const auto cmd = parse_command(command);
    if (!cmd) throw Error("unknown command '" + command + "'");
    cfg.command = *cmd;
    if (expected > 0) cfg.expected_degree = expected;
    cfg.validate();
    system = parse_system(read_file(cfg.system_path));
    if (cfg.seed_path) seed = parse_seed_pair(read_file(*cfg.seed_path), system.n(), system.m());
    if (cfg.command == Command::verify) {
      if (!cfg.formulas_path) throw Error("verify needs --formulas");
      formulas = parse_formulas(read_file(*cfg.formulas_path), system);
    }
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }

  const Analysis an = run_pipeline(system, seed, cfg, formulas);
  const std::string js = to_json(an, cfg.timings).dump(2) + "\n";
  if (cfg.output_path) {
    std::ofstream out(*cfg.output_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << *cfg.output_path << "\n";
      return 2;
    }
    out << js;
  }
  std::cout << (json_stdout ? js : to_text(an));
  return an.ok() ? 0 : 1;
}
