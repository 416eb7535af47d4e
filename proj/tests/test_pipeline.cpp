#include <doctest.h>

#include "deckrec/report.hpp"
#include "test_support.hpp"

using namespace deckrec;
using deckrec::testing::load_seed;
using deckrec::testing::load_system;

TEST_CASE("seed file parsing") {
  const auto seed = parse_seed_pair("# comment\nx: 1, 2-3i;\np: 0.5i;\n", 2, 1);
  CHECK(seed.x[1] == Complex(2, -3));
  CHECK(seed.p[0] == Complex(0, 0.5));
  CHECK_THROWS_AS(parse_seed_pair("x: 1; p: 1;", 2, 1), Error);
  CHECK_THROWS_AS(parse_seed_pair("x: 1, 2;", 2, 1), Error);
  CHECK_THROWS_AS(parse_seed_pair("x: 1, 2; q: 3;", 2, 1), Error);
  CHECK_THROWS_AS(parse_seed_pair("x 1, 2; p: 3;", 2, 1), Error);
}

TEST_CASE("formula file parsing") {
  const System s = load_system("rational_swap");
  const DeckMap dm = parse_formulas("x = -p/(p + y);\n# keep y\n y = -2*p - y + 1;", s);
  REQUIRE(dm.complete());
  CHECK(dm.formula_string(1, s.variable_names()) == "-2*p - y + 1");
  const DeckMap partial = parse_formulas("y = y;", s);
  CHECK(partial.missing_count() == 1);
  CHECK_THROWS_AS(parse_formulas("p = x;", s), Error);
  CHECK_THROWS_AS(parse_formulas("x = 1; x = 2;", s), Error);
  CHECK_THROWS_AS(parse_formulas("x 1;", s), Error);
  CHECK_THROWS_AS(parse_formulas("x = z;", s), ParseError);
}

TEST_CASE("run configuration validation") {
  RunConfig cfg;
  cfg.degree_bound = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.degree_bound = 2;
  cfg.threads = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.threads = 1;
  cfg.interp.rank_tol = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(parse_command("verify") == Command::verify);
  CHECK_FALSE(parse_command("solve"));
}

TEST_CASE("analyze recovers 1/x") {
  const System s = load_system("reciprocal");
  RunConfig cfg;
  cfg.degree_bound = 1;
  const Analysis an = run_pipeline(s, std::nullopt, cfg);
  REQUIRE(an.ok());
  REQUIRE(an.deck_maps.size() == 1);
  CHECK(an.deck_maps[0].map.formula_string(0, s.variable_names()) == "1/x");
  CHECK(an.deck_maps[0].verification.passed());
  const auto text = to_text(an);
  CHECK(text.find("x -> 1/x") != std::string::npos);
  const auto j = to_json(an);
  CHECK(j["schema"] == report_schema);
  CHECK(j["group"]["centralizer"].size() == 2);
  CHECK(j["deck_maps"][0]["coordinates"][0]["formula"] == "1/x");
  CHECK_FALSE(j.contains("timings"));
  CHECK(to_json(an, true).contains("timings"));
}

TEST_CASE("reports are deterministic for a fixed rng seed") {
  const System s = load_system("sextic");
  RunConfig cfg;
  cfg.degree_bound = 1;
  cfg.rng_seed = 42;
  const auto a = to_json(run_pipeline(s, std::nullopt, cfg)).dump();
  cfg.threads = 4;
  const auto b = to_json(run_pipeline(s, std::nullopt, cfg)).dump();
  CHECK(a == b);
}

TEST_CASE("verify command accepts the deck map and rejects a wrong one") {
  const System s = load_system("reciprocal");
  RunConfig cfg;
  cfg.command = Command::verify;
  const Analysis good = run_pipeline(s, std::nullopt, cfg, parse_formulas("x = 1/x;", s));
  REQUIRE(good.ok());
  CHECK(good.deck_maps[0].verification.passed());
  const Analysis ident = run_pipeline(s, std::nullopt, cfg, parse_formulas("x = x;", s));
  CHECK(ident.ok());
  const Analysis bad = run_pipeline(s, std::nullopt, cfg, parse_formulas("x = -1/x;", s));
  CHECK_FALSE(bad.ok());
  CHECK(bad.failed_stage == "verify");
  const Analysis none = run_pipeline(s, std::nullopt, cfg);
  CHECK(none.failed_stage == "verify");
}

TEST_CASE("trivial centralizer skips interpolation") {
  const System s = parse_system("unknowns x; parameters a, b; equations x^3 + a*x + b;");
  const Analysis an = run_pipeline(s, std::nullopt, RunConfig{});
  REQUIRE(an.ok());
  CHECK(an.group->order == 6u);
  CHECK(an.interpolation_skipped);
  CHECK(an.deck_maps.empty());
  CHECK(to_text(an).find("no nontrivial deck transformations") != std::string::npos);
}

TEST_CASE("stage failures are reported, not thrown") {
  const System s = load_system("nonmember");
  RunConfig cfg;
  cfg.command = Command::monodromy;
  const Analysis an = run_pipeline(s, std::nullopt, cfg);
  CHECK(an.failed_stage == "seed");
  const auto j = to_json(an);
  CHECK(j["status"] == "failed");
  CHECK(j["failure"]["stage"] == "seed");
}

TEST_CASE("monodromy command reports the group only") {
  const System s = load_system("nonmember");
  RunConfig cfg;
  cfg.command = Command::monodromy;
  const Analysis an = run_pipeline(s, load_seed(s, "nonmember"), cfg);
  REQUIRE(an.ok());
  CHECK(an.monodromy->degree() == 6);
  CHECK(an.group->centralizer.size() == 6);
  CHECK_FALSE(an.group->deck_group.abelian);
  CHECK_FALSE(an.scaling);
}
