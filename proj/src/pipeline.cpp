#include "deckrec/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

namespace deckrec {

const char* to_string(Command c) {
  switch (c) {
    case Command::analyze: return "analyze";
    case Command::monodromy: return "monodromy";
    case Command::scalings: return "scalings";
    case Command::interpolate: return "interpolate";
    case Command::verify: return "verify";
  }
  return "unknown";
}

std::optional<Command> parse_command(const std::string& s) {
  for (Command c : {Command::analyze, Command::monodromy, Command::scalings, Command::interpolate, Command::verify})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

void RunConfig::validate() const {
  if (degree_bound < 1) throw Error("degree bound must be at least 1");
  if (threads < 1) throw Error("thread count must be positive");
  monodromy.tracker.validate();
  if (!(interp.rank_tol > 0 && interp.truncate_tol > 0 && interp.pivot_tol > 0))
    throw Error("interpolation tolerances must be positive");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string strip_comments(const std::string& text) {
  std::string out;
  bool comment = false;
  for (char c : text) {
    if (c == '#') comment = true;
    if (c == '\n') comment = false;
    if (!comment) out += c;
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

VectorXc parse_complex_list(const std::string& text) {
  std::vector<Complex> vals;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    vals.push_back(parse_complex(item));
  }
  VectorXc v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

SeedPair parse_seed_pair(const std::string& text, std::size_t n, std::size_t m) {
  std::optional<VectorXc> x, p;
  std::istringstream in(strip_comments(text));
  std::string section;
  while (std::getline(in, section, ';')) {
    section = trim(section);
    if (section.empty()) continue;
    const auto colon = section.find(':');
    if (colon == std::string::npos) throw Error("seed section without ':'");
    const std::string key = trim(section.substr(0, colon));
    const VectorXc vals = parse_complex_list(section.substr(colon + 1));
    if (key == "x")
      x = vals;
    else if (key == "p")
      p = vals;
    else
      throw Error("unknown seed section '" + key + "'");
  }
  if (!x || !p) throw Error("seed file needs both x and p sections");
  if (x->size() != static_cast<Eigen::Index>(n))
    throw Error("seed x has " + std::to_string(x->size()) + " entries, expected " + std::to_string(n));
  if (p->size() != static_cast<Eigen::Index>(m))
    throw Error("seed p has " + std::to_string(p->size()) + " entries, expected " + std::to_string(m));
  return {*x, *p};
}

DeckMap parse_formulas(const std::string& text, const System& system) {
  DeckMap dm;
  dm.coords.resize(system.n());
  const auto names = system.variable_names();
  std::istringstream in(strip_comments(text));
  std::string stmt;
  while (std::getline(in, stmt, ';')) {
    stmt = trim(stmt);
    if (stmt.empty()) continue;
    const auto eq = stmt.find('=');
    if (eq == std::string::npos) throw Error("formula without '=': " + stmt);
    const std::string name = trim(stmt.substr(0, eq));
    const auto idx = system.variable_index(name);
    if (!idx || *idx >= system.n()) throw Error("formula target '" + name + "' is not an unknown");
    if (dm.coords[*idx]) throw Error("duplicate formula for '" + name + "'");
    CoordinateFormula cf;
    cf.exact = parse_rational(stmt.substr(eq + 1), names);
    cf.formula = cf.exact->to_complex();
    cf.degree = cf.exact->degree();
    dm.coords[*idx] = std::move(cf);
  }
  return dm;
}

namespace {

std::vector<Permutation> nontrivial_elements(const std::vector<Permutation>& c) {
  std::vector<Permutation> out;
  for (const auto& s : c)
    if (!s.is_identity()) out.push_back(s);
  return out;
}

// Verifies and drops coordinates whose pairing error exceeds tolerance.
VerifiedDeckMap verify_and_prune(const System& system, DeckMap map, const MonodromyResult& mono,
                                 const ScalingLattice* lattice, const RunConfig& cfg, Rng& rng,
                                 std::vector<std::string>& warnings) {
  VerifyReport rep = verify_deck(system, map, mono, lattice, cfg.monodromy, cfg.verify, rng);
  if (!rep.pairing.passed) {
    bool dropped = false;
    for (std::size_t j = 0; j < map.coords.size(); ++j)
      if (map.coords[j] && !(rep.coordinate_worst[j] <= cfg.verify.pairing_tol)) {
        warnings.push_back("deck map " + map.permutation.cycle_string() + ": coordinate " + system.unknowns()[j] +
                           " failed held-out verification and was dropped");
        map.coords[j].reset();
        dropped = true;
      }
    if (dropped && map.missing_count() < map.coords.size())
      rep = verify_deck(system, map, mono, lattice, cfg.monodromy, cfg.verify, rng);
  }
  return {std::move(map), rep};
}

}  // namespace

Analysis run_pipeline(const System& system, const std::optional<SeedPair>& seed_in, const RunConfig& cfg_in,
                      const std::optional<DeckMap>& formulas) {
  RunConfig cfg = cfg_in;
  cfg.validate();
  cfg.monodromy.tracker.threads = cfg.threads;
  cfg.monodromy.expected_degree = cfg.expected_degree;
  cfg.verify.trials = cfg.verify_trials;

  Analysis an;
  an.command = cfg.command;
  an.system = system;
  Rng master(cfg.rng_seed);
  cfg.monodromy.rng_seed = master.next_seed();
  Rng scaling_rng(master.next_seed());
  Rng interp_rng(master.next_seed());
  Rng verify_rng(master.next_seed());

  std::string stage = "seed";
  try {
    if (seed_in)
      an.seed = seed_in;
    else
      an.seed = seed_from_linear_params(system, std::nullopt, master);

    stage = "monodromy";
    {
      Stopwatch sw;
      an.monodromy = run_monodromy(system, *an.seed, cfg.monodromy);
      an.timings["monodromy"] = sw.seconds();
    }
    const MonodromyResult& mono = *an.monodromy;
    if (!mono.complete)
      an.warnings.push_back("monodromy found " + std::to_string(mono.degree()) + " solutions, expected " +
                            std::to_string(*cfg.expected_degree));

    stage = "group";
    {
      Stopwatch sw;
      GroupDiagnostics g;
      const PermutationGroup G = mono.group();
      g.transitive = is_transitive(G);
      g.order_cap = std::max<std::uint64_t>(1000, std::min<std::uint64_t>(cfg.order_cap, 50000000 / mono.degree()));
      if (cfg.command != Command::interpolate && cfg.command != Command::verify)
        g.order = group_order_capped(G, g.order_cap);
      if (!g.transitive) throw Error("monodromy group is not transitive; the fiber may be incomplete");
      if (cfg.command != Command::interpolate && cfg.command != Command::verify) g.block_systems = minimal_block_systems(G);
      g.centralizer = centralizer_in_symmetric(G);
      g.deck_group = describe_group(g.centralizer);
      an.group = std::move(g);
      an.timings["group"] = sw.seconds();
    }
    const std::vector<Permutation> deck = nontrivial_elements(an.group->centralizer);

    if (cfg.command == Command::monodromy) return an;

    if (cfg.command == Command::verify) {
      stage = "verify";
      if (!formulas) throw Error("verify needs a formulas file");
      std::optional<ScalingLattice> lattice;
      try {
        lattice = scaling_lattice(system);
      } catch (const Error& e) {
        an.warnings.push_back(std::string("scaling lattice unavailable: ") + e.what());
      }
      DeckMap dm = *formulas;
      const auto perm = infer_permutation(dm, mono.base, 1e-6);
      if (!perm) throw Error("formulas do not map the base fiber onto itself");
      dm.permutation = *perm;
      Stopwatch sw;
      VerifyReport rep = verify_deck(system, dm, mono, lattice ? &*lattice : nullptr, cfg.monodromy, cfg.verify,
                                     verify_rng);
      an.timings["verify"] = sw.seconds();
      if (lattice) {
        ScalingAnalysis sa;
        sa.lattice = *lattice;
        an.scaling = std::move(sa);
      }
      an.deck_maps.push_back({std::move(dm), rep});
      if (!an.deck_maps.back().verification.passed()) {
        an.failed_stage = "verify";
        an.failure = "formulas failed verification";
      }
      return an;
    }

    const bool want_scaling = cfg.command == Command::scalings || cfg.graded;
    if (want_scaling) {
      stage = "scalings";
      Stopwatch sw;
      ScalingAnalysis sa;
      sa.exponent_matrix = exponent_difference_matrix(system);
      sa.snf = smith_normal_form(sa.exponent_matrix);
      sa.snf_verified = sa.snf.verify(sa.exponent_matrix);
      if (!sa.snf_verified) throw Error("Smith normal form failed verification");
      sa.lattice = extract_scaling_lattice(sa.snf, system.nvars());
      sa.discrete = commuting_discrete_scalings(sa.lattice, system, mono, deck, cfg.monodromy, scaling_rng);
      for (const auto& w : sa.discrete->warnings) an.warnings.push_back(w);
      an.scaling = std::move(sa);
      an.timings["scalings"] = sw.seconds();
    }
    if (cfg.command == Command::scalings) return an;

    if (deck.empty()) {
      an.interpolation_skipped = true;
      an.warnings.push_back("no nontrivial deck transformations");
      return an;
    }

    stage = "interpolation";
    InterpResult ir;
    {
      Stopwatch sw;
      if (cfg.graded)
        ir = interpolate_graded(system, mono, deck, an.scaling->discrete->commuting, cfg.degree_bound,
                                cfg.parameter_dependent, cfg.monodromy, cfg.interp, interp_rng);
      else
        ir = interpolate_dense(system, mono, deck, cfg.degree_bound, cfg.parameter_dependent, cfg.monodromy,
                               cfg.interp, interp_rng);
      an.timings["interpolation"] = sw.seconds();
    }
    an.interp_stats = ir.stats;
    for (const auto& w : ir.warnings) an.warnings.push_back(w);

    stage = "verification";
    {
      Stopwatch sw;
      const ScalingLattice* lattice = an.scaling ? &an.scaling->lattice : nullptr;
      for (auto& dm : ir.maps) {
        if (dm.missing_count() == dm.coords.size()) {
          an.deck_maps.push_back({std::move(dm), {}});
          continue;
        }
        an.deck_maps.push_back(verify_and_prune(system, std::move(dm), mono, lattice, cfg, verify_rng, an.warnings));
      }
      an.timings["verification"] = sw.seconds();
    }
  } catch (const std::exception& e) {
    an.failed_stage = stage;
    an.failure = e.what();
  }
  return an;
}

}  // namespace deckrec
