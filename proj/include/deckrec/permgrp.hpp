#pragma once

// Permutations on fiber labels 0..d-1 and the group computations needed to
// read off deck transformations: orbits, capped orders, centralizers and
// block systems.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "deckrec/types.hpp"

namespace deckrec {

class Permutation {
 public:
  Permutation() = default;
  /// Throws Error unless `images` is a bijection of {0..d-1}.
  explicit Permutation(std::vector<int> images);
  static Permutation identity(std::size_t d);
  /// Builds from 0-indexed cycles, e.g. {{0,3},{1,4}} on d labels.
  static Permutation from_cycles(std::size_t d, const std::vector<std::vector<int>>& cycles);

  std::size_t degree() const { return images_.size(); }
  int operator()(int i) const { return images_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& images() const { return images_; }

  bool is_identity() const;
  Permutation inverse() const;
  /// Order (lcm of cycle lengths).
  std::uint64_t order() const;
  /// 1-indexed cycle notation; "()" for the identity.
  std::string cycle_string() const;

  /// (a * b)(i) = a(b(i)): apply b first.
  friend Permutation operator*(const Permutation& a, const Permutation& b);
  friend bool operator==(const Permutation& a, const Permutation& b) = default;
  friend bool operator<(const Permutation& a, const Permutation& b) { return a.images_ < b.images_; }

 private:
  std::vector<int> images_;
};

/// Parses 1-indexed cycle notation such as "(1 4)(2 5)(3 6)".
Permutation parse_cycles(std::size_t d, const std::string& text);

struct PermutationGroup {
  std::size_t degree = 0;
  std::vector<Permutation> generators;

  PermutationGroup() = default;
  PermutationGroup(std::size_t d, std::vector<Permutation> gens);
};

/// Labels reachable from `label` by the generators, in BFS order.
std::vector<int> orbit(const PermutationGroup& G, int label);

bool is_transitive(const PermutationGroup& G);

/// Group order by closure, or nullopt once more than `cap` elements appear.
std::optional<std::uint64_t> group_order_capped(const PermutationGroup& G, std::uint64_t cap);

/// All permutations of S_d commuting with every generator; G must be
/// transitive. The identity comes first, then the rest sorted by the image
/// of label 0.
std::vector<Permutation> centralizer_in_symmetric(const PermutationGroup& G);

using Partition = std::vector<std::vector<int>>;

/// Smallest G-invariant partition in which `a` and `b` share a block.
Partition minimal_block(const PermutationGroup& G, int a, int b);

/// Distinct nontrivial partitions among the minimal blocks of {0, a} for all
/// a != 0. Empty iff G is primitive. G must be transitive.
std::vector<Partition> minimal_block_systems(const PermutationGroup& G);

/// Whether every generator maps each block onto a block of the partition.
bool is_block_system(const PermutationGroup& G, const Partition& blocks);

bool commutes(const Permutation& a, const Permutation& b);

/// Whether the set is closed under composition and inverses.
bool is_group_closed(const std::vector<Permutation>& elements);

/// Elementary isomorphism invariants of a small explicitly listed group.
struct GroupInvariants {
  std::size_t order = 0;
  bool abelian = false;
  std::vector<std::uint64_t> element_orders;  // sorted
  std::string description;                    // e.g. "Z2^4", "S3", "Z6"
};

GroupInvariants describe_group(const std::vector<Permutation>& elements);

}  // namespace deckrec
