#pragma once

// Random instances and brute oracles shared by the property tests and the
// acceptance gate. Oracles work on names and plain std containers only.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "provabs/abstraction.h"
#include "provabs/benchgen.h"
#include "provabs/polynomial.h"

namespace provabs::testing {

struct TreeShape {
  int max_depth = 3;
  int max_fanout = 4;
  // Probability that a non-root node above max_depth is a leaf.
  double leaf_chance = 0.35;
};

inline NodeSpec random_node(Rng& rng, const TreeShape& shape, const std::string& prefix, int depth, int& counter) {
  const int id = counter++;
  const bool leaf = depth == shape.max_depth || (depth > 0 && rng.uniform_real() < shape.leaf_chance);
  if (leaf) return NodeSpec{prefix + "l" + std::to_string(id), {}};
  NodeSpec node{prefix + "N" + std::to_string(id), {}};
  const auto fanout = rng.uniform_int(1, static_cast<std::uint64_t>(shape.max_fanout));
  for (std::uint64_t i = 0; i < fanout; ++i) node.children.push_back(random_node(rng, shape, prefix, depth + 1, counter));
  return node;
}

inline AbstractionTree random_tree(Rng& rng, const TreeShape& shape, const std::string& prefix) {
  int counter = 0;
  return AbstractionTree(random_node(rng, shape, prefix, 0, counter));
}

struct PolyShape {
  int max_polys = 3;
  int max_monomials = 12;
  // Chance that a monomial carries a leaf of a given tree.
  double tree_chance = 0.85;
  // Variables outside the forest.
  int free_vars = 4;
  bool exponents = true;
};

// Positive coefficients, at most one leaf per tree in each monomial.
inline PolySet random_polys(Rng& rng, const AbstractionForest& forest, const PolyShape& shape) {
  std::vector<std::vector<std::string>> leaves(forest.size());
  for (std::size_t t = 0; t < forest.size(); ++t) {
    for (auto l : forest.tree(t).leaves()) leaves[t].push_back(forest.tree(t).label(l));
  }
  std::vector<std::vector<Term>> polys(rng.uniform_int(1, static_cast<std::uint64_t>(shape.max_polys)));
  for (auto& poly : polys) {
    const auto count = rng.uniform_int(1, static_cast<std::uint64_t>(shape.max_monomials));
    for (std::uint64_t m = 0; m < count; ++m) {
      Term term;
      term.coefficient = static_cast<double>(rng.uniform_int(1, 1000)) / 100.0;
      for (std::size_t t = 0; t < forest.size(); ++t) {
        if (rng.uniform_real() >= shape.tree_chance) continue;
        const auto& pick = leaves[t][rng.uniform_int(0, leaves[t].size() - 1)];
        const std::uint32_t exp = shape.exponents && rng.uniform_real() < 0.15 ? 2 : 1;
        term.vars.emplace_back(pick, exp);
      }
      const auto extra = shape.free_vars > 0 ? rng.uniform_int(0, 2) : 0;
      for (std::uint64_t e = 0; e < extra; ++e) {
        const std::uint32_t exp = shape.exponents ? static_cast<std::uint32_t>(rng.uniform_int(1, 2)) : 1;
        term.vars.emplace_back("z" + std::to_string(rng.uniform_int(0, shape.free_vars - 1)), exp);
      }
      poly.push_back(std::move(term));
    }
  }
  return make_polyset(polys);
}

// Uniform choice between {v} and recursing, per node.
inline void random_cut_below(Rng& rng, const AbstractionTree& tree, NodeId v, double stop, std::set<std::string>& out) {
  if (tree.is_leaf(v) || rng.uniform_real() < stop) {
    out.insert(tree.label(v));
    return;
  }
  for (auto c : tree.children(v)) random_cut_below(rng, tree, c, stop, out);
}

inline Vvs random_cut(Rng& rng, const AbstractionForest& forest, double stop = 0.3) {
  Vvs vvs;
  for (const auto& t : forest.trees()) random_cut_below(rng, t, t.root(), stop, vvs.members);
  return vvs;
}

// Name-level substitution oracle.
struct NaiveSize {
  std::size_t num_m = 0;
  std::size_t num_v = 0;
};

inline std::map<std::string, std::string> leaf_mapping(const AbstractionForest& forest, const Vvs& vvs) {
  std::map<std::string, std::string> out;
  for (const auto& t : forest.trees()) {
    for (NodeId v = 0; v < t.size(); ++v) {
      if (!vvs.members.contains(t.label(v))) continue;
      for (auto l : t.leaves_under(v)) out[t.label(l)] = t.label(v);
    }
  }
  return out;
}

inline NaiveSize naive_size(const PolySet& polys, const std::map<std::string, std::string>& mapping) {
  NaiveSize out;
  std::set<std::string> vars;
  for (const auto& p : polys.polynomials()) {
    std::set<std::map<std::string, std::uint32_t>> keys;
    for (const auto& m : p.monomials()) {
      std::map<std::string, std::uint32_t> key;
      for (const auto& f : m.vars) {
        const auto& name = polys.symbols().name(f.var);
        auto it = mapping.find(name);
        const auto& target = it == mapping.end() ? name : it->second;
        key[target] += f.exponent;
        vars.insert(target);
      }
      keys.insert(std::move(key));
    }
    out.num_m += keys.size();
  }
  out.num_v = vars.size();
  return out;
}

// Cuts of a small tree by testing every node subset.
inline std::size_t subset_cut_count(const AbstractionTree& tree) {
  const auto n = tree.size();
  std::size_t count = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    bool ok = true;
    for (NodeId v = 0; v < n && ok; ++v) {
      if (!(mask >> v & 1)) continue;
      for (NodeId u = tree.parent(v); u != kNoNode; u = tree.parent(u)) ok = ok && !(mask >> u & 1);
    }
    for (NodeId v = 0; v < n && ok; ++v) {
      if (!tree.is_leaf(v)) continue;
      bool covered = false;
      for (NodeId u = v; u != kNoNode; u = tree.parent(u)) covered = covered || (mask >> u & 1);
      ok = covered;
    }
    count += ok ? 1 : 0;
  }
  return count;
}

// Whether the graph has a vertex cover with exactly k vertices (1-based edges).
inline bool has_cover_of_size(std::size_t vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                              std::size_t k) {
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << vertices); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != k) continue;
    bool covers = true;
    for (auto [a, b] : edges) covers = covers && ((mask >> (a - 1) & 1) || (mask >> (b - 1) & 1));
    if (covers) return true;
  }
  return false;
}

// Every labeled graph on `vertices` nodes with at least one edge.
inline std::vector<std::vector<std::pair<std::size_t, std::size_t>>> all_graphs(std::size_t vertices) {
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t a = 1; a <= vertices; ++a) {
    for (std::size_t b = a + 1; b <= vertices; ++b) slots.emplace_back(a, b);
  }
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << slots.size()); ++mask) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (mask >> i & 1) edges.push_back(slots[i]);
    }
    out.push_back(std::move(edges));
  }
  return out;
}

inline bool has_isolated_vertex(std::size_t vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<bool> touched(vertices + 1, false);
  for (auto [a, b] : edges) touched[a] = touched[b] = true;
  for (std::size_t v = 1; v <= vertices; ++v) {
    if (!touched[v]) return true;
  }
  return false;
}

}  // namespace provabs::testing
