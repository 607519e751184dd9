#include <algorithm>
#include <cctype>
#include <chrono>
#include <functional>
#include <set>
#include <unordered_set>

#include "provabs/error.h"
#include "provabs/optimizer.h"

namespace provabs {

namespace {

std::string fold_case(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Forest nodes numbered consecutively across trees.
struct FlatForest {
  std::vector<std::size_t> offset;
  std::vector<std::size_t> tree_of;
  std::vector<NodeId> node_of;

  explicit FlatForest(const AbstractionForest& forest) {
    for (std::size_t t = 0; t < forest.size(); ++t) {
      offset.push_back(tree_of.size());
      for (NodeId v = 0; v < forest.tree(t).size(); ++v) {
        tree_of.push_back(t);
        node_of.push_back(v);
      }
    }
  }
  std::size_t size() const { return tree_of.size(); }
};

}  // namespace

CompressionResult greedy_vvs(const PolySet& polys, const AbstractionForest& forest, std::size_t bound) {
  const auto start = std::chrono::steady_clock::now();
  require_compatible(polys, forest);
  if (bound < 1 || bound > polys.num_m()) {
    throw BoundError("bound " + std::to_string(bound) + " outside 1.." + std::to_string(polys.num_m()));
  }
  const std::size_t k = polys.num_m() - bound;
  const auto& symbols = polys.symbols();
  const FlatForest flat(forest);
  const auto base = static_cast<VarId>(symbols.size());

  std::vector<std::size_t> leaf_slot(symbols.size(), static_cast<std::size_t>(-1));
  for (auto v : polys.occurring_variables()) {
    if (auto loc = forest.locate(symbols.name(v))) leaf_slot[v] = flat.offset[loc->tree] + loc->node;
  }

  std::vector<std::size_t> rep(flat.size());
  std::vector<bool> in_set(flat.size(), false);
  std::vector<std::size_t> occurring(flat.size(), 0);
  for (std::size_t g = 0; g < flat.size(); ++g) rep[g] = g;
  for (std::size_t t = 0; t < forest.size(); ++t) {
    const auto& tree = forest.tree(t);
    for (NodeId v = static_cast<NodeId>(tree.size()); v-- > 0;) {
      const auto g = flat.offset[t] + v;
      if (tree.is_leaf(v)) {
        in_set[g] = true;
        auto id = symbols.find(tree.label(v));
        occurring[g] = (id && polys.occurs(*id)) ? 1 : 0;
      } else {
        for (auto c : tree.children(v)) occurring[g] += occurring[flat.offset[t] + c];
      }
    }
  }

  Stats stats;
  auto current_num_m = [&]() {
    std::size_t total = 0;
    std::unordered_set<MonomialKey, MonomialKeyHash> seen;
    for (const auto& p : polys.polynomials()) {
      seen.clear();
      for (const auto& m : p.monomials()) {
        ++stats.monomial_visits;
        std::vector<Factor> factors;
        factors.reserve(m.vars.size());
        for (const auto& f : m.vars) {
          const auto slot = leaf_slot[f.var];
          factors.push_back(slot == static_cast<std::size_t>(-1) ? f
                                                                 : Factor{base + static_cast<VarId>(rep[slot]), f.exponent});
        }
        seen.insert(make_key(std::move(factors)));
      }
      total += seen.size();
    }
    return total;
  };

  // Variables lost by replacing c's children (all in the set) with c.
  auto promotion_cost = [&](std::size_t g) {
    const auto& tree = forest.tree(flat.tree_of[g]);
    std::size_t present = 0;
    for (auto c : tree.children(flat.node_of[g])) present += occurring[flat.offset[flat.tree_of[g]] + c] > 0 ? 1 : 0;
    return present > 0 ? present - 1 : 0;
  };

  auto promote = [&](std::size_t g) {
    const auto t = flat.tree_of[g];
    const auto& tree = forest.tree(t);
    const auto v = flat.node_of[g];
    in_set[g] = true;
    for (auto c : tree.children(v)) in_set[flat.offset[t] + c] = false;
    for (NodeId u = v; u < tree.subtree_end(v); ++u) rep[flat.offset[t] + u] = g;
  };

  using Candidate = std::tuple<std::size_t, std::string, std::string, std::size_t>;
  std::set<Candidate> candidates;
  // A node with at most one occurring child only renames a variable. Below the
  // root it is applied at once so its parent can become a candidate; at the
  // root it is never worth taking.
  std::function<void(std::size_t)> consider = [&](std::size_t g) {
    const auto t = flat.tree_of[g];
    const auto& tree = forest.tree(t);
    const auto v = flat.node_of[g];
    if (tree.is_leaf(v) || in_set[g]) return;
    std::size_t present = 0;
    for (auto c : tree.children(v)) {
      if (!in_set[flat.offset[t] + c]) return;
      present += occurring[flat.offset[t] + c] > 0 ? 1 : 0;
    }
    if (present <= 1) {
      if (tree.parent(v) == kNoNode) return;
      promote(g);
      consider(flat.offset[t] + tree.parent(v));
      return;
    }
    candidates.emplace(promotion_cost(g), fold_case(tree.label(v)), tree.label(v), g);
  };
  for (std::size_t g = flat.size(); g-- > 0;) consider(g);

  CompressionResult result;
  std::size_t ml = 0;
  std::size_t vl = 0;
  while (ml < k && !candidates.empty()) {
    ++stats.node_visits;
    auto [cost, folded, label, g] = *candidates.begin();
    candidates.erase(candidates.begin());
    const auto t = flat.tree_of[g];
    const auto& tree = forest.tree(t);
    const auto v = flat.node_of[g];
    promote(g);
    vl += cost;
    ml = polys.num_m() - current_num_m();
    ++stats.promotions;
    result.promotions.push_back(label);
    if (tree.parent(v) != kNoNode) consider(flat.offset[t] + tree.parent(v));
  }

  for (std::size_t g = 0; g < flat.size(); ++g) {
    if (in_set[g]) result.vvs.members.insert(forest.tree(flat.tree_of[g]).label(flat.node_of[g]));
  }
  result.ml = ml;
  result.vl = vl;
  result.out_num_m = polys.num_m() - ml;
  result.out_num_v = polys.num_v() - vl;
  result.status = ml >= k ? Status::kHeuristicAdequate : Status::kInfeasible;

  if (candidates.empty() && ml < k) {
    result.max_achievable_ml = ml;
  } else {
    const auto saved = rep;
    for (std::size_t t = 0; t < forest.size(); ++t) {
      for (NodeId u = 0; u < forest.tree(t).size(); ++u) rep[flat.offset[t] + u] = flat.offset[t];
    }
    result.max_achievable_ml = polys.num_m() - current_num_m();
    rep = saved;
  }
  stats.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  result.stats = stats;
  return result;
}

}  // namespace provabs
