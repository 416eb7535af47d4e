#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "deckrec/permgrp.hpp"

using namespace deckrec;

namespace {

// Brute-force oracles over S_d for small d.

std::vector<Permutation> symmetric_group(std::size_t d) {
  std::vector<int> img(d);
  std::iota(img.begin(), img.end(), 0);
  std::vector<Permutation> out;
  do out.emplace_back(img);
  while (std::next_permutation(img.begin(), img.end()));
  return out;
}

std::set<Permutation> closure(const PermutationGroup& G) {
  std::set<Permutation> seen{Permutation::identity(G.degree)};
  std::vector<Permutation> frontier(seen.begin(), seen.end());
  while (!frontier.empty()) {
    std::vector<Permutation> next;
    for (const auto& g : frontier)
      for (const auto& s : G.generators)
        if (seen.insert(s * g).second) next.push_back(s * g);
    frontier = std::move(next);
  }
  return seen;
}

std::vector<Permutation> brute_centralizer(const PermutationGroup& G) {
  std::vector<Permutation> out;
  for (const auto& s : symmetric_group(G.degree))
    if (std::all_of(G.generators.begin(), G.generators.end(), [&](const Permutation& g) { return g * s == s * g; }))
      out.push_back(s);
  return out;
}

void set_partitions(std::size_t d, std::size_t i, std::vector<int>& label, int used, std::vector<std::vector<int>>& out) {
  if (i == d) {
    out.push_back(label);
    return;
  }
  for (int b = 0; b <= used; ++b) {
    label[i] = b;
    set_partitions(d, i + 1, label, std::max(used, b + 1), out);
  }
}

bool preserves(const PermutationGroup& G, const std::vector<int>& label) {
  for (const auto& g : G.generators)
    for (std::size_t a = 0; a < G.degree; ++a)
      for (std::size_t b = 0; b < G.degree; ++b)
        if ((label[a] == label[b]) != (label[g(int(a))] == label[g(int(b))])) return false;
  return true;
}

Partition to_partition(const std::vector<int>& label) {
  const int k = *std::max_element(label.begin(), label.end()) + 1;
  Partition p(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < label.size(); ++i) p[static_cast<std::size_t>(label[i])].push_back(int(i));
  std::sort(p.begin(), p.end());
  return p;
}

Partition normalized(Partition p) {
  for (auto& b : p) std::sort(b.begin(), b.end());
  std::sort(p.begin(), p.end());
  return p;
}

bool refines(const std::vector<int>& fine, const std::vector<int>& coarse) {
  for (std::size_t a = 0; a < fine.size(); ++a)
    for (std::size_t b = 0; b < fine.size(); ++b)
      if (fine[a] == fine[b] && coarse[a] != coarse[b]) return false;
  return true;
}

// Minimal nontrivial block systems by enumeration of all set partitions.
std::set<Partition> brute_minimal_blocks(const PermutationGroup& G) {
  std::vector<std::vector<int>> all;
  std::vector<int> label(G.degree, 0);
  set_partitions(G.degree, 0, label, 0, all);
  std::vector<std::vector<int>> systems;
  for (const auto& l : all) {
    const int k = *std::max_element(l.begin(), l.end()) + 1;
    if (k > 1 && k < int(G.degree) && preserves(G, l)) systems.push_back(l);
  }
  std::set<Partition> out;
  for (const auto& s : systems) {
    bool minimal = true;
    for (const auto& t : systems)
      if (t != s && refines(t, s)) minimal = false;
    if (minimal) out.insert(to_partition(s));
  }
  return out;
}

PermutationGroup random_group(Rng& rng, std::size_t d, int gens) {
  std::vector<Permutation> out;
  for (int k = 0; k < gens; ++k) {
    std::vector<int> img(d);
    std::iota(img.begin(), img.end(), 0);
    for (std::size_t i = d - 1; i > 0; --i) std::swap(img[i], img[static_cast<std::size_t>(rng.uniform() * double(i + 1))]);
    out.emplace_back(img);
  }
  return PermutationGroup(d, out);
}

PermutationGroup wreath_s2_s3() {
  return PermutationGroup(6, {parse_cycles(6, "(1 4)"), parse_cycles(6, "(1 2 3)(4 5 6)"), parse_cycles(6, "(1 2)(4 5)")});
}

}  // namespace

TEST_CASE("permutation basics") {
  const Permutation a = parse_cycles(5, "(1 2 3)(4 5)");
  CHECK(a.cycle_string() == "(1 2 3)(4 5)");
  CHECK(a.order() == 6);
  CHECK((a * a.inverse()).is_identity());
  CHECK(Permutation::identity(4).cycle_string() == "()");
  const Permutation b = parse_cycles(5, "(1 2)");
  // (a*b)(i) = a(b(i))
  CHECK((a * b)(0) == a(b(0)));
  CHECK_THROWS_AS(Permutation(std::vector<int>{0, 0, 1}), Error);
  CHECK_THROWS_AS(parse_cycles(3, "(1 4)"), Error);
  CHECK_THROWS_AS(parse_cycles(3, "(1 2)(2 3)"), Error);
}

TEST_CASE("S2 wr S3 has order 48, one block system of three pairs, centralizer of order 2") {
  const PermutationGroup G = wreath_s2_s3();
  CHECK(is_transitive(G));
  CHECK(*group_order_capped(G, 1000) == 48);
  const auto blocks = minimal_block_systems(G);
  REQUIRE(blocks.size() == 1);
  CHECK(normalized(blocks[0]) == Partition{{0, 3}, {1, 4}, {2, 5}});
  const auto C = centralizer_in_symmetric(G);
  REQUIRE(C.size() == 2);
  CHECK(C[0].is_identity());
  CHECK(C[1] == parse_cycles(6, "(1 4)(2 5)(3 6)"));
}

TEST_CASE("group order cap") {
  const PermutationGroup S5(5, {parse_cycles(5, "(1 2)"), parse_cycles(5, "(1 2 3 4 5)")});
  CHECK(*group_order_capped(S5, 120) == 120);
  CHECK_FALSE(group_order_capped(S5, 119));
}

TEST_CASE("centralizer matches brute force on random groups") {
  Rng rng(3);
  int tested = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = 3 + static_cast<std::size_t>(rng.uniform() * 4);
    const PermutationGroup G = random_group(rng, d, 1 + int(rng.uniform() * 2));
    if (!is_transitive(G)) continue;
    ++tested;
    auto fast = centralizer_in_symmetric(G);
    auto slow = brute_centralizer(G);
    std::sort(fast.begin(), fast.end());
    CHECK(fast == slow);
    CHECK(is_group_closed(fast));
    for (const auto& c : fast)
      for (const auto& g : G.generators) CHECK(commutes(c, g));
  }
  CHECK(tested > 10);
}

TEST_CASE("cyclic regular action is its own centralizer") {
  const PermutationGroup Z6(6, {parse_cycles(6, "(1 2 3 4 5 6)")});
  const auto C = centralizer_in_symmetric(Z6);
  CHECK(C.size() == 6);
  CHECK(describe_group(C).description == "Z6");
  CHECK(describe_group(C).abelian);
}

TEST_CASE("block systems match brute force on random groups") {
  Rng rng(8);
  int tested = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t d = 4 + static_cast<std::size_t>(rng.uniform() * 3);
    const PermutationGroup G = random_group(rng, d, 1 + int(rng.uniform() * 2));
    if (!is_transitive(G)) continue;
    ++tested;
    const auto fast = minimal_block_systems(G);
    std::set<Partition> got;
    for (const auto& p : fast) {
      CHECK(is_block_system(G, p));
      got.insert(normalized(p));
    }
    for (const auto& p : brute_minimal_blocks(G)) CHECK(got.count(p) == 1);
  }
  CHECK(tested > 10);
}

TEST_CASE("primitive and imprimitive examples") {
  const PermutationGroup S4(4, {parse_cycles(4, "(1 2)"), parse_cycles(4, "(1 2 3 4)")});
  CHECK(minimal_block_systems(S4).empty());
  CHECK(centralizer_in_symmetric(S4).size() == 1);
  const PermutationGroup D4(4, {parse_cycles(4, "(1 2 3 4)"), parse_cycles(4, "(1 3)")});
  const auto b = minimal_block_systems(D4);
  REQUIRE(b.size() == 1);
  CHECK(normalized(b[0]) == Partition{{0, 2}, {1, 3}});
  CHECK(is_block_system(D4, {{0, 2}, {1, 3}}));
  CHECK_FALSE(is_block_system(D4, {{0, 1}, {2, 3}}));
  CHECK_THROWS_AS(minimal_block_systems(PermutationGroup(4, {parse_cycles(4, "(1 2)")})), Error);
}

TEST_CASE("group invariants") {
  const PermutationGroup S3(3, {parse_cycles(3, "(1 2)"), parse_cycles(3, "(1 2 3)")});
  const auto elems = closure(S3);
  const GroupInvariants inv = describe_group({elems.begin(), elems.end()});
  CHECK(inv.order == 6);
  CHECK_FALSE(inv.abelian);
  CHECK(inv.description == "S3");
  CHECK(inv.element_orders == std::vector<std::uint64_t>{1, 2, 2, 2, 3, 3});

  const PermutationGroup K(4, {parse_cycles(4, "(1 2)(3 4)"), parse_cycles(4, "(1 3)(2 4)")});
  const auto k = closure(K);
  CHECK(describe_group({k.begin(), k.end()}).description == "Z2^2");
}
