#pragma once

// End-to-end orchestration: monodromy, group diagnostics, scaling detection,
// interpolation and verification, collected into one Analysis record.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deckrec/interp.hpp"
#include "deckrec/monodromy.hpp"
#include "deckrec/permgrp.hpp"
#include "deckrec/scaling.hpp"

namespace deckrec {

enum class Command { analyze, monodromy, scalings, interpolate, verify };

const char* to_string(Command c);
std::optional<Command> parse_command(const std::string& s);

struct RunConfig {
  Command command = Command::analyze;
  std::string system_path;
  std::optional<std::string> seed_path;
  std::optional<std::string> formulas_path;
  std::optional<std::string> output_path;
  std::uint64_t rng_seed = 1;
  int degree_bound = 3;
  bool parameter_dependent = false;
  bool graded = false;
  std::optional<std::size_t> expected_degree;
  int threads = 1;
  bool timings = false;
  std::size_t verify_trials = 10;
  std::uint64_t order_cap = 1000000;

  MonodromyConfig monodromy;
  InterpConfig interp;
  VerifyConfig verify;

  void validate() const;
};

struct GroupDiagnostics {
  bool transitive = false;
  std::optional<std::uint64_t> order;  // nullopt: exceeds cap
  std::uint64_t order_cap = 0;
  std::vector<Partition> block_systems;
  std::vector<Permutation> centralizer;
  GroupInvariants deck_group;
};

struct ScalingAnalysis {
  IntegerMatrix exponent_matrix;
  SnfDecomposition snf;
  bool snf_verified = false;
  ScalingLattice lattice;
  std::optional<DiscreteScalingReport> discrete;
};

struct VerifiedDeckMap {
  DeckMap map;
  VerifyReport verification;
};

struct Analysis {
  Command command = Command::analyze;
  System system;
  std::optional<SeedPair> seed;
  std::optional<MonodromyResult> monodromy;
  std::optional<GroupDiagnostics> group;
  std::optional<ScalingAnalysis> scaling;
  std::optional<InterpStats> interp_stats;
  std::vector<VerifiedDeckMap> deck_maps;
  bool interpolation_skipped = false;
  std::vector<std::string> warnings;
  std::map<std::string, double> timings;  // seconds per stage

  std::optional<std::string> failed_stage;
  std::optional<std::string> failure;

  bool ok() const { return !failed_stage; }
};

/// Reads `x: <complex list>; p: <complex list>`.
SeedPair parse_seed_pair(const std::string& text, std::size_t n, std::size_t m);

/// Reads `name = expr;` lines; unknowns without a line stay missing.
DeckMap parse_formulas(const std::string& text, const System& system);

/// Runs the stages selected by cfg.command. Stage failures are recorded in
/// the result rather than thrown.
Analysis run_pipeline(const System& system, const std::optional<SeedPair>& seed, const RunConfig& cfg,
                      const std::optional<DeckMap>& formulas = std::nullopt);

std::string read_file(const std::string& path);

}  // namespace deckrec
