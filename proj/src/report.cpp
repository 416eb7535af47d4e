#include "deckrec/report.hpp"

#include <cmath>
#include <sstream>

namespace deckrec {

using nlohmann::json;

namespace {

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json vector_json(const VectorXc& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v[i]));
  return out;
}

json bigint_json(const BigInt& b) {
  if (b >= std::numeric_limits<long long>::min() && b <= std::numeric_limits<long long>::max())
    return static_cast<long long>(b);
  return b.str();
}

json matrix_json(const IntegerMatrix& M) {
  json rows = json::array();
  for (std::size_t i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < M.cols(); ++j) r.push_back(bigint_json(M(i, j)));
    rows.push_back(std::move(r));
  }
  return rows;
}

json lattice_json(const ScalingLattice& L) {
  json torsion = json::array();
  for (const auto& t : L.torsion) torsion.push_back({{"modulus", bigint_json(t.modulus)}, {"rows", matrix_json(t.rows)}});
  return {{"free_rank", L.free_rank()}, {"free", matrix_json(L.free)}, {"torsion", torsion}};
}

json perm_json(const Permutation& p) { return {{"cycles", p.cycle_string()}, {"images", p.images()}}; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json check_json(const CheckResult& c) {
  return {{"passed", c.passed}, {"applicable", c.applicable}, {"worst", number_or_null(c.worst)}};
}

json deck_json(const VerifiedDeckMap& vd, const System& sys) {
  const DeckMap& dm = vd.map;
  const auto names = sys.variable_names();
  json coords = json::array();
  json missing = json::array();
  for (std::size_t j = 0; j < dm.coords.size(); ++j) {
    const auto& name = sys.unknowns()[j];
    if (!dm.coords[j]) {
      missing.push_back(name);
      continue;
    }
    const auto& c = *dm.coords[j];
    coords.push_back({{"variable", name},
                      {"formula", dm.formula_string(j, names)},
                      {"exact", c.exact.has_value()},
                      {"degree", c.degree},
                      {"vandermonde_size", c.vandermonde_size},
                      {"nullspace_dim", c.nullspace_dim},
                      {"validation_error", c.validation_error},
                      {"constant_denominator", c.constant_denominator}});
  }
  const VerifyReport& v = vd.verification;
  json per = json::array();
  for (double w : v.coordinate_worst) per.push_back(number_or_null(w));
  return {{"permutation", perm_json(dm.permutation)},
          {"degree_bound", dm.degree_bound_used},
          {"complete", dm.complete()},
          {"coordinates", coords},
          {"missing", missing},
          {"verification",
           {{"passed", v.passed()},
            {"trials", v.trials},
            {"pairing", check_json(v.pairing)},
            {"fiber_preservation", check_json(v.fiber_preservation)},
            {"quasi_homogeneity", check_json(v.quasi_homogeneity)},
            {"coordinate_worst", per}}}};
}

std::string partition_string(const Partition& P) {
  std::string s;
  for (const auto& block : P) {
    s += "{";
    for (std::size_t i = 0; i < block.size(); ++i) s += (i ? "," : "") + std::to_string(block[i] + 1);
    s += "}";
  }
  return s;
}

}  // namespace

json to_json(const Analysis& an, bool include_timings) {
  const System& sys = an.system;
  json j;
  j["schema"] = report_schema;
  j["command"] = to_string(an.command);
  json eqs = json::array();
  for (const auto& f : sys.equations()) eqs.push_back(format_polynomial(f, sys.variable_names()));
  j["system"] = {{"unknowns", sys.unknowns()}, {"parameters", sys.parameters()}, {"equations", eqs}};
  j["status"] = an.ok() ? "ok" : "failed";
  if (an.failed_stage) j["failure"] = {{"stage", *an.failed_stage}, {"message", an.failure.value_or("")}};
  if (an.seed) j["seed"] = {{"x", vector_json(an.seed->x)}, {"p", vector_json(an.seed->p)}};

  if (an.monodromy) {
    const auto& m = *an.monodromy;
    json sols = json::array();
    for (const auto& s : m.base.solutions) sols.push_back(vector_json(s));
    json gens = json::array();
    for (const auto& p : m.permutations) gens.push_back(perm_json(p));
    j["fiber"] = {{"degree", m.degree()}, {"params", vector_json(m.base.params)}, {"solutions", sols}};
    j["monodromy"] = {{"loops", m.loop_count},
                      {"failed_paths", m.failed_paths},
                      {"complete", m.complete},
                      {"generators", gens}};
  }
  if (an.group) {
    const auto& g = *an.group;
    json blocks = json::array();
    for (const auto& P : g.block_systems) {
      json bj = json::array();
      for (const auto& b : P) {
        json one = json::array();
        for (int e : b) one.push_back(e + 1);
        bj.push_back(one);
      }
      blocks.push_back(bj);
    }
    json cent = json::array();
    for (const auto& s : g.centralizer) cent.push_back(perm_json(s));
    j["group"] = {{"transitive", g.transitive},
                  {"order", g.order ? json(*g.order) : json(nullptr)},
                  {"order_cap", g.order_cap},
                  {"block_systems", blocks},
                  {"decomposable", !g.block_systems.empty()},
                  {"centralizer", cent},
                  {"deck_group",
                   {{"order", g.deck_group.order},
                    {"abelian", g.deck_group.abelian},
                    {"element_orders", g.deck_group.element_orders},
                    {"description", g.deck_group.description}}}};
  }
  if (an.scaling) {
    const auto& s = *an.scaling;
    json sj = {{"lattice", lattice_json(s.lattice)}};
    if (s.snf.diagonal.size() || s.snf_verified) {
      json diag = json::array();
      for (const auto& d : s.snf.diagonal) diag.push_back(bigint_json(d));
      sj["snf"] = {{"diagonal", diag}, {"verified", s.snf_verified}};
    }
    if (s.discrete) {
      json cands = json::array();
      for (const auto& c : s.discrete->candidates)
        cands.push_back({{"u", c.u}, {"modulus", c.modulus}, {"verdict", to_string(c.verdict)}});
      sj["commuting"] = lattice_json(s.discrete->commuting);
      sj["candidates"] = cands;
      sj["enumeration_truncated"] = s.discrete->enumeration_truncated;
    }
    j["scaling"] = sj;
  }
  if (an.interp_stats) {
    const auto& st = *an.interp_stats;
    j["interpolation"] = {{"samples_drawn", st.samples_drawn},
                          {"largest_vandermonde", st.largest_vandermonde},
                          {"largest_class", st.largest_class},
                          {"class_count", st.class_count},
                          {"subproblems", st.subproblems}};
  }
  if (an.interpolation_skipped) j["interpolation"] = {{"skipped", true}, {"reason", "no nontrivial deck transformations"}};
  json decks = json::array();
  for (const auto& d : an.deck_maps) decks.push_back(deck_json(d, sys));
  j["deck_maps"] = decks;
  j["warnings"] = an.warnings;
  if (include_timings) j["timings"] = an.timings;
  return j;
}

std::string to_text(const Analysis& an) {
  std::ostringstream out;
  const System& sys = an.system;
  out << "system: " << sys.n() << " unknowns, " << sys.m() << " parameters\n";
  if (an.monodromy) {
    const auto& m = *an.monodromy;
    out << "fiber degree: " << m.degree() << (m.complete ? "" : " (incomplete)") << "\n";
    out << "monodromy: " << m.loop_count << " loops, " << m.failed_paths << " failed paths\n";
    for (const auto& p : m.permutations) out << "  " << p.cycle_string() << "\n";
  }
  if (an.group) {
    const auto& g = *an.group;
    out << "group: " << (g.transitive ? "transitive" : "not transitive") << ", order ";
    if (g.order)
      out << *g.order;
    else
      out << "> " << g.order_cap;
    out << "\n";
    out << "block systems: " << g.block_systems.size() << "\n";
    for (const auto& P : g.block_systems) out << "  " << partition_string(P) << "\n";
    out << "centralizer: order " << g.centralizer.size() << " (" << g.deck_group.description << ")\n";
  }
  if (an.scaling) {
    const auto& s = *an.scaling;
    out << "free scaling rank: " << s.lattice.free_rank() << "\n";
    for (const auto& t : s.lattice.torsion) out << "torsion Z" << t.modulus << " rank " << t.rows.rows() << "\n";
    if (s.discrete)
      for (const auto& t : s.discrete->commuting.torsion)
        out << "commuting Z" << t.modulus << " rank " << t.rows.rows() << "\n";
  }
  if (an.interpolation_skipped) out << "no nontrivial deck transformations\n";
  if (an.interp_stats) out << "largest Vandermonde: " << an.interp_stats->largest_vandermonde << "\n";
  const auto names = sys.variable_names();
  for (const auto& vd : an.deck_maps) {
    out << "deck map " << vd.map.permutation.cycle_string() << " ["
        << (vd.verification.passed() ? "verified" : "NOT verified") << "]\n";
    for (std::size_t j = 0; j < vd.map.coords.size(); ++j) {
      out << "  " << sys.unknowns()[j] << " -> ";
      if (vd.map.coords[j])
        out << vd.map.formula_string(j, names) << "\n";
      else
        out << "(missing)\n";
    }
  }
  for (const auto& w : an.warnings) out << "warning: " << w << "\n";
  if (an.failed_stage) out << "FAILED at " << *an.failed_stage << ": " << an.failure.value_or("") << "\n";
  return out.str();
}

}  // namespace deckrec
