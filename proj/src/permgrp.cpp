#include "deckrec/permgrp.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include <boost/container_hash/hash.hpp>

namespace deckrec {

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  std::vector<char> seen(images_.size(), 0);
  for (int v : images_) {
    if (v < 0 || static_cast<std::size_t>(v) >= images_.size() || seen[static_cast<std::size_t>(v)])
      throw Error("permutation images are not a bijection");
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

Permutation Permutation::identity(std::size_t d) {
  std::vector<int> im(d);
  std::iota(im.begin(), im.end(), 0);
  return Permutation(std::move(im));
}

Permutation Permutation::from_cycles(std::size_t d, const std::vector<std::vector<int>>& cycles) {
  std::vector<int> im(d);
  std::iota(im.begin(), im.end(), 0);
  for (const auto& c : cycles)
    for (std::size_t i = 0; i < c.size(); ++i) im.at(static_cast<std::size_t>(c[i])) = c[(i + 1) % c.size()];
  return Permutation(std::move(im));
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != static_cast<int>(i)) return false;
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) inv[static_cast<std::size_t>(images_[i])] = static_cast<int>(i);
  return Permutation(std::move(inv));
}

std::uint64_t Permutation::order() const {
  std::vector<char> seen(images_.size(), 0);
  std::uint64_t result = 1;
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (seen[i]) continue;
    std::uint64_t len = 0;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(images_[j])) {
      seen[j] = 1;
      ++len;
    }
    result = std::lcm(result, len);
  }
  return result;
}

std::string Permutation::cycle_string() const {
  std::ostringstream os;
  std::vector<char> seen(images_.size(), 0);
  bool any = false;
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (seen[i] || images_[i] == static_cast<int>(i)) continue;
    os << "(";
    bool first = true;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(images_[j])) {
      seen[j] = 1;
      if (!first) os << " ";
      os << j + 1;
      first = false;
    }
    os << ")";
    any = true;
  }
  return any ? os.str() : "()";
}

Permutation operator*(const Permutation& a, const Permutation& b) {
  if (a.degree() != b.degree()) throw Error("composing permutations of different degree");
  std::vector<int> im(a.degree());
  for (std::size_t i = 0; i < im.size(); ++i) im[i] = a.images_[static_cast<std::size_t>(b.images_[i])];
  return Permutation(std::move(im));
}

Permutation parse_cycles(std::size_t d, const std::string& text) {
  std::vector<std::vector<int>> cycles;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    if (text[i] != '(') throw Error("malformed cycle notation: " + text);
    const std::size_t close = text.find(')', i);
    if (close == std::string::npos) throw Error("unterminated cycle: " + text);
    std::istringstream in(text.substr(i + 1, close - i - 1));
    std::vector<int> cyc;
    std::string tok;
    while (in >> tok) {
      std::replace(tok.begin(), tok.end(), ',', ' ');
      std::istringstream t2(tok);
      int v;
      while (t2 >> v) {
        if (v < 1 || static_cast<std::size_t>(v) > d) throw Error("cycle label out of range: " + text);
        cyc.push_back(v - 1);
      }
    }
    cycles.push_back(std::move(cyc));
    i = close + 1;
  }
  return Permutation::from_cycles(d, cycles);
}

PermutationGroup::PermutationGroup(std::size_t d, std::vector<Permutation> gens) : degree(d), generators(std::move(gens)) {
  for (const auto& g : generators)
    if (g.degree() != d) throw Error("generator degree mismatch");
}

std::vector<int> orbit(const PermutationGroup& G, int label) {
  std::vector<char> seen(G.degree, 0);
  std::vector<int> out{label};
  seen[static_cast<std::size_t>(label)] = 1;
  for (std::size_t k = 0; k < out.size(); ++k)
    for (const auto& g : G.generators) {
      const int v = g(out[k]);
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        out.push_back(v);
      }
    }
  return out;
}

bool is_transitive(const PermutationGroup& G) { return G.degree == 0 || orbit(G, 0).size() == G.degree; }

std::optional<std::uint64_t> group_order_capped(const PermutationGroup& G, std::uint64_t cap) {
  struct Hash {
    std::size_t operator()(const std::vector<int>& v) const { return boost::hash_range(v.begin(), v.end()); }
  };
  std::unordered_set<std::vector<int>, Hash> seen;
  std::deque<Permutation> queue;
  const Permutation id = Permutation::identity(G.degree);
  seen.insert(id.images());
  queue.push_back(id);
  while (!queue.empty()) {
    const Permutation h = queue.front();
    queue.pop_front();
    for (const auto& g : G.generators) {
      Permutation gh = g * h;
      if (seen.insert(gh.images()).second) {
        if (seen.size() > cap) return std::nullopt;
        queue.push_back(std::move(gh));
      }
    }
  }
  return seen.size();
}

std::vector<Permutation> centralizer_in_symmetric(const PermutationGroup& G) {
  const std::size_t d = G.degree;
  if (!is_transitive(G)) throw Error("centralizer computation needs a transitive group");
  if (d == 0) return {};
  // Schreier tree rooted at 0: reach[v] = (parent, generator index).
  std::vector<int> order = orbit(G, 0);
  std::vector<std::pair<int, int>> parent(d, {-1, -1});
  {
    std::vector<char> seen(d, 0);
    seen[0] = 1;
    std::vector<int> bfs{0};
    for (std::size_t k = 0; k < bfs.size(); ++k)
      for (std::size_t gi = 0; gi < G.generators.size(); ++gi) {
        const int v = G.generators[gi](bfs[k]);
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          parent[static_cast<std::size_t>(v)] = {bfs[k], static_cast<int>(gi)};
          bfs.push_back(v);
        }
      }
    order = std::move(bfs);
  }
  std::vector<Permutation> out;
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<int> sigma(d, -1);
    sigma[0] = static_cast<int>(c);
    for (std::size_t k = 1; k < order.size(); ++k) {
      const int v = order[k];
      const auto [u, gi] = parent[static_cast<std::size_t>(v)];
      sigma[static_cast<std::size_t>(v)] = G.generators[static_cast<std::size_t>(gi)](sigma[static_cast<std::size_t>(u)]);
    }
    bool ok = true;
    for (const auto& g : G.generators) {
      for (std::size_t v = 0; v < d && ok; ++v)
        if (sigma[static_cast<std::size_t>(g(static_cast<int>(v)))] != g(sigma[v])) ok = false;
      if (!ok) break;
    }
    if (!ok) continue;
    std::vector<char> hit(d, 0);
    for (int v : sigma) {
      if (hit[static_cast<std::size_t>(v)]) ok = false;
      hit[static_cast<std::size_t>(v)] = 1;
    }
    if (ok) out.emplace_back(std::move(sigma));
  }
  return out;
}

namespace {

int find_root(std::vector<int>& parent, int v) {
  while (parent[static_cast<std::size_t>(v)] != v) {
    parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
    v = parent[static_cast<std::size_t>(v)];
  }
  return v;
}

Partition to_partition(std::vector<int>& parent) {
  std::map<int, std::vector<int>> groups;
  for (std::size_t v = 0; v < parent.size(); ++v) groups[find_root(parent, static_cast<int>(v))].push_back(static_cast<int>(v));
  Partition out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Partition minimal_block(const PermutationGroup& G, int a, int b) {
  std::vector<int> parent(G.degree);
  std::iota(parent.begin(), parent.end(), 0);
  std::deque<std::pair<int, int>> queue;
  auto unite = [&](int x, int y) {
    x = find_root(parent, x);
    y = find_root(parent, y);
    if (x == y) return;
    parent[static_cast<std::size_t>(y)] = x;
    queue.emplace_back(x, y);
  };
  unite(a, b);
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    for (const auto& g : G.generators) unite(g(x), g(y));
  }
  return to_partition(parent);
}

std::vector<Partition> minimal_block_systems(const PermutationGroup& G) {
  if (!is_transitive(G)) throw Error("block systems need a transitive group");
  std::set<Partition> found;
  for (std::size_t a = 1; a < G.degree; ++a) {
    Partition p = minimal_block(G, 0, static_cast<int>(a));
    if (p.size() > 1) found.insert(std::move(p));
  }
  std::vector<Partition> out(found.begin(), found.end());
  std::stable_sort(out.begin(), out.end(), [](const Partition& x, const Partition& y) { return x.size() > y.size(); });
  return out;
}

bool is_block_system(const PermutationGroup& G, const Partition& blocks) {
  std::vector<int> block_of(G.degree, -1);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int v : blocks[b]) block_of.at(static_cast<std::size_t>(v)) = static_cast<int>(b);
  for (int v : block_of)
    if (v < 0) return false;
  for (const auto& g : G.generators)
    for (const auto& block : blocks) {
      const int target = block_of[static_cast<std::size_t>(g(block.front()))];
      for (int v : block)
        if (block_of[static_cast<std::size_t>(g(v))] != target) return false;
      if (blocks[static_cast<std::size_t>(target)].size() != block.size()) return false;
    }
  return true;
}

bool commutes(const Permutation& a, const Permutation& b) { return a * b == b * a; }

bool is_group_closed(const std::vector<Permutation>& elements) {
  std::set<Permutation> set(elements.begin(), elements.end());
  for (const auto& a : elements) {
    if (!set.count(a.inverse())) return false;
    for (const auto& b : elements)
      if (!set.count(a * b)) return false;
  }
  return true;
}

GroupInvariants describe_group(const std::vector<Permutation>& elements) {
  GroupInvariants inv;
  inv.order = elements.size();
  inv.abelian = true;
  for (const auto& a : elements) {
    inv.element_orders.push_back(a.order());
    for (const auto& b : elements)
      if (!commutes(a, b)) inv.abelian = false;
  }
  std::sort(inv.element_orders.begin(), inv.element_orders.end());
  const std::uint64_t n = inv.order;
  const std::uint64_t maxord = inv.element_orders.empty() ? 1 : inv.element_orders.back();
  if (n == 1) {
    inv.description = "trivial";
  } else if (maxord == n) {
    inv.description = "Z" + std::to_string(n);
  } else if (inv.abelian && maxord == 2) {
    int k = 0;
    for (std::uint64_t m = n; m > 1; m /= 2) ++k;
    inv.description = "Z2^" + std::to_string(k);
  } else if (!inv.abelian && n == 6) {
    inv.description = "S3";
  } else {
    inv.description = std::string(inv.abelian ? "abelian" : "non-abelian") + " of order " + std::to_string(n);
  }
  return inv;
}

}  // namespace deckrec
