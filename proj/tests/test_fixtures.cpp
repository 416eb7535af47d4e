#include <doctest.h>

#include <filesystem>

#include "deckrec/scaling.hpp"
#include "test_support.hpp"

using namespace deckrec;
using deckrec::testing::fixture_path;
using deckrec::testing::load_seed;
using deckrec::testing::load_system;

namespace {

const std::vector<std::string> seeded = {"rational_swap", "nonmember",  "p3p_inhom", "p3p_qh", "5pp_inhom",
                                         "5pp_qh", "radial", "fourbar"};

std::vector<std::string> deck_files(const std::string& name) {
  std::vector<std::string> out;
  for (const auto& suffix : {".deck", ".deck1", ".deck2", ".deck3", ".deck4"})
    if (std::filesystem::exists(fixture_path(name + suffix))) out.push_back(name + suffix);
  return out;
}

}  // namespace

TEST_CASE("every fixture system parses") {
  for (const auto& entry : std::filesystem::directory_iterator(DECKREC_FIXTURE_DIR)) {
    if (entry.path().extension() != ".sys") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(parse_system(read_file(entry.path().string())));
  }
}

TEST_CASE("seeds solve their systems and deck formulas map them to solutions") {
  for (const auto& name : seeded) {
    CAPTURE(name);
    const System s = load_system(name);
    const SeedPair seed = load_seed(s, name);
    const CompiledSystem cs(s);
    CHECK(cs.residual(seed.x, seed.p) < 1e-9);
    const VectorXc pt = s.join(seed.x, seed.p);
    for (const auto& file : deck_files(name)) {
      CAPTURE(file);
      DeckMap dm = parse_formulas(read_file(fixture_path(file)), s);
      const DeckMap id = identity_deck_map(s);
      for (std::size_t j = 0; j < s.n(); ++j)
        if (!dm.coords[j]) dm.coords[j] = id.coords[j];
      VectorXc img(static_cast<Eigen::Index>(s.n()));
      for (std::size_t j = 0; j < s.n(); ++j) img[static_cast<Eigen::Index>(j)] = dm.evaluate(j, pt);
      CHECK(cs.residual(img, seed.p) < 1e-8);
      CHECK((img - seed.x).norm() > 1e-3);
    }
  }
}

TEST_CASE("free scalings of the fixtures are exact symmetries") {
  Rng rng(77);
  for (const auto& name : {"nonmember", "p3p_qh", "5pp_qh", "sextic"}) {
    CAPTURE(name);
    const System s = load_system(name);
    const ScalingLattice L = scaling_lattice(s);
    const VectorXc pt = rng.complex_normal_vector(static_cast<Eigen::Index>(s.nvars()));
    for (std::size_t r = 0; r < L.free_rank(); ++r)
      CHECK(quasi_homogeneity_defect(s, to_int_row(L.free.row(r)), rng.unit_complex() * 1.3, pt) < 1e-8);
    for (const auto& block : L.torsion)
      for (std::size_t r = 0; r < block.rows.rows(); ++r)
        CHECK(quasi_homogeneity_defect(s, to_int_row(block.rows.row(r)),
                                       primitive_root(static_cast<long long>(block.modulus)), pt) < 1e-8);
  }
}
