#include "provabs/abstraction.h"

#include <algorithm>
#include <functional>
#include <map>

#include "provabs/error.h"

namespace provabs {

AbstractionTree::AbstractionTree(const NodeSpec& root) { add(root, kNoNode); }

NodeId AbstractionTree::add(const NodeSpec& spec, NodeId parent) {
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{spec.label, parent, {}, 0});
  index_.try_emplace(spec.label, id);
  for (const auto& child : spec.children) {
    NodeId c = add(child, id);
    nodes_[id].children.push_back(c);
  }
  nodes_[id].end = static_cast<NodeId>(nodes_.size());
  return id;
}

std::optional<NodeId> AbstractionTree::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<NodeId> AbstractionTree::leaves_under(NodeId v) const {
  std::vector<NodeId> out;
  for (NodeId u = v; u < subtree_end(v); ++u) {
    if (is_leaf(u)) out.push_back(u);
  }
  return out;
}

std::size_t AbstractionTree::leaf_count(NodeId v) const {
  std::size_t n = 0;
  for (NodeId u = v; u < subtree_end(v); ++u) n += is_leaf(u) ? 1 : 0;
  return n;
}

std::size_t AbstractionTree::height(NodeId v) const {
  std::size_t h = 0;
  for (auto c : children(v)) h = std::max(h, height(c) + 1);
  return h;
}

std::size_t AbstractionTree::max_fanout() const {
  std::size_t w = 0;
  for (const auto& n : nodes_) w = std::max(w, n.children.size());
  return w;
}

NodeSpec AbstractionTree::to_spec() const {
  std::function<NodeSpec(NodeId)> build = [&](NodeId v) {
    NodeSpec spec{label(v), {}};
    for (auto c : children(v)) spec.children.push_back(build(c));
    return spec;
  };
  return build(root());
}

AbstractionForest::AbstractionForest(std::vector<AbstractionTree> trees) : trees_(std::move(trees)) {
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    for (NodeId v = 0; v < trees_[t].size(); ++v) index_.try_emplace(trees_[t].label(v), Location{t, v});
  }
}

std::size_t AbstractionForest::node_count() const {
  std::size_t n = 0;
  for (const auto& t : trees_) n += t.size();
  return n;
}

std::optional<AbstractionForest::Location> AbstractionForest::locate(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string_view to_string(ForestViolation::Kind kind) {
  switch (kind) {
    case ForestViolation::Kind::kDuplicateLabel:
      return "duplicate-label";
    case ForestViolation::Kind::kSharedLabel:
      return "shared-label";
    case ForestViolation::Kind::kMultipleRoots:
      return "multiple-roots";
    case ForestViolation::Kind::kCycle:
      return "cycle";
    case ForestViolation::Kind::kMultipleParents:
      return "multiple-parents";
    case ForestViolation::Kind::kMetavariableOccurs:
      return "metavariable-occurs";
  }
  return "unknown";
}

EdgeListResult tree_from_edges(const std::vector<std::pair<std::string, std::string>>& edges) {
  using Kind = ForestViolation::Kind;
  EdgeListResult result;
  std::vector<std::string> order;
  std::map<std::string, std::string> parent_of;
  std::map<std::string, std::vector<std::string>> children_of;
  std::set<std::string> seen;
  auto note = [&](const std::string& label) {
    if (seen.insert(label).second) order.push_back(label);
  };
  for (const auto& [parent, child] : edges) {
    note(parent);
    note(child);
    auto [it, inserted] = parent_of.try_emplace(child, parent);
    if (!inserted) {
      if (it->second != parent) {
        result.violations.push_back({Kind::kMultipleParents, child, "parents '" + it->second + "' and '" + parent + "'"});
      }
      continue;
    }
    children_of[parent].push_back(child);
  }
  std::vector<std::string> roots;
  for (const auto& label : order) {
    if (!parent_of.contains(label)) roots.push_back(label);
  }
  if (roots.size() > 1) {
    std::string all;
    for (const auto& r : roots) all += (all.empty() ? "" : ",") + r;
    result.violations.push_back({Kind::kMultipleRoots, roots.front(), "roots: " + all});
  }
  // Anything unreachable from the root (or everything, without a root) sits on a cycle.
  std::set<std::string> reached;
  std::function<void(const std::string&)> reach = [&](const std::string& v) {
    if (!reached.insert(v).second) return;
    for (const auto& c : children_of[v]) reach(c);
  };
  for (const auto& r : roots) reach(r);
  for (const auto& label : order) {
    if (!reached.contains(label)) {
      result.violations.push_back({Kind::kCycle, label, "node not reachable from a root"});
    }
  }
  if (!result.violations.empty() || roots.empty()) {
    if (roots.empty() && result.violations.empty()) {
      result.violations.push_back({Kind::kCycle, "", "no root"});
    }
    return result;
  }
  std::function<NodeSpec(const std::string&)> build = [&](const std::string& v) {
    NodeSpec spec{v, {}};
    for (const auto& c : children_of[v]) spec.children.push_back(build(c));
    return spec;
  };
  result.tree.emplace(build(roots.front()));
  return result;
}

std::vector<ForestViolation> validate_forest(const AbstractionForest& forest) {
  using Kind = ForestViolation::Kind;
  std::vector<ForestViolation> out;
  std::map<std::string, std::vector<std::size_t>> owners;
  for (std::size_t t = 0; t < forest.size(); ++t) {
    const auto& tree = forest.tree(t);
    std::map<std::string, int> counts;
    for (NodeId v = 0; v < tree.size(); ++v) ++counts[tree.label(v)];
    for (const auto& [label, n] : counts) {
      if (n > 1) {
        out.push_back({Kind::kDuplicateLabel, label, "appears " + std::to_string(n) + " times in tree " + std::to_string(t)});
      }
      owners[label].push_back(t);
    }
  }
  for (const auto& [label, trees] : owners) {
    if (trees.size() > 1) {
      std::string list;
      for (auto t : trees) list += (list.empty() ? "" : ",") + std::to_string(t);
      out.push_back({Kind::kSharedLabel, label, "shared by trees " + list});
    }
  }
  return out;
}

std::vector<ForestViolation> validate_forest(const AbstractionForest& forest, const PolySet& polys) {
  auto out = validate_forest(forest);
  for (std::size_t t = 0; t < forest.size(); ++t) {
    const auto& tree = forest.tree(t);
    for (NodeId v = 0; v < tree.size(); ++v) {
      if (tree.is_leaf(v)) continue;
      auto id = polys.symbols().find(tree.label(v));
      if (id && polys.occurs(*id)) {
        out.push_back({ForestViolation::Kind::kMetavariableOccurs, tree.label(v),
                       "internal node of tree " + std::to_string(t) + " occurs in the polynomials"});
      }
    }
  }
  return out;
}

std::vector<CompatibilityViolation> check_compatibility(const PolySet& polys, const AbstractionForest& forest) {
  const auto& symbols = polys.symbols();
  std::vector<std::optional<AbstractionForest::Location>> where(symbols.size());
  for (VarId v = 0; v < symbols.size(); ++v) where[v] = forest.locate(symbols.name(v));

  std::vector<CompatibilityViolation> out;
  for (std::size_t p = 0; p < polys.size(); ++p) {
    const auto& monos = polys[p].monomials();
    for (std::size_t m = 0; m < monos.size(); ++m) {
      std::map<std::size_t, std::vector<VarId>> per_tree;
      for (const auto& f : monos[m].vars) {
        if (!where[f.var]) continue;
        const auto loc = *where[f.var];
        if (!forest.tree(loc.tree).is_leaf(loc.node)) {
          out.push_back({p, m, loc.tree, "internal node '" + symbols.name(f.var) + "' occurs in monomial"});
        }
        per_tree[loc.tree].push_back(f.var);
      }
      for (const auto& [t, vars] : per_tree) {
        if (vars.size() > 1) {
          std::string names;
          for (auto v : vars) names += (names.empty() ? "" : ",") + symbols.name(v);
          out.push_back({p, m, t, "monomial contains several nodes of one tree: " + names});
        }
      }
    }
  }
  return out;
}

void require_compatible(const PolySet& polys, const AbstractionForest& forest) {
  auto violations = check_compatibility(polys, forest);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw CompatibilityError("polynomial " + std::to_string(v.polynomial) + ", monomial " +
                             std::to_string(v.monomial) + ", tree " + std::to_string(v.tree) + ": " + v.detail +
                             (violations.size() > 1 ? " (+" + std::to_string(violations.size() - 1) + " more)" : ""));
  }
}

namespace {

std::optional<NodeSpec> clean_node(const AbstractionTree& tree, NodeId v, const PolySet& polys, bool is_root) {
  if (tree.is_leaf(v)) {
    auto id = polys.symbols().find(tree.label(v));
    if (id && polys.occurs(*id)) return NodeSpec{tree.label(v), {}};
    return std::nullopt;
  }
  NodeSpec spec{tree.label(v), {}};
  for (auto c : tree.children(v)) {
    if (auto kept = clean_node(tree, c, polys, false)) spec.children.push_back(std::move(*kept));
  }
  if (spec.children.empty()) return std::nullopt;
  if (spec.children.size() == 1 && !is_root) return std::move(spec.children.front());
  return spec;
}

}  // namespace

AbstractionTree clean_tree(const AbstractionTree& tree, const PolySet& polys) {
  auto spec = clean_node(tree, tree.root(), polys, true);
  if (!spec) throw EmptyTree("no leaf of tree '" + tree.label(tree.root()) + "' occurs in the polynomials");
  return AbstractionTree(*spec);
}

AbstractionForest clean_forest(const AbstractionForest& forest, const PolySet& polys) {
  std::vector<AbstractionTree> trees;
  for (const auto& t : forest.trees()) {
    if (auto spec = clean_node(t, t.root(), polys, true)) trees.emplace_back(*spec);
  }
  return AbstractionForest(std::move(trees));
}

std::optional<std::string> vvs_problem(const AbstractionForest& forest, const Vvs& vvs) {
  std::vector<std::vector<bool>> marked(forest.size());
  for (std::size_t t = 0; t < forest.size(); ++t) marked[t].assign(forest.tree(t).size(), false);
  for (const auto& label : vvs.members) {
    auto loc = forest.locate(label);
    if (!loc) throw UnknownLabel(label);
    marked[loc->tree][loc->node] = true;
  }
  for (std::size_t t = 0; t < forest.size(); ++t) {
    const auto& tree = forest.tree(t);
    for (NodeId v = 0; v < tree.size(); ++v) {
      if (!marked[t][v]) continue;
      for (NodeId u = tree.parent(v); u != kNoNode; u = tree.parent(u)) {
        if (marked[t][u]) return "'" + tree.label(u) + "' is an ancestor of '" + tree.label(v) + "'";
      }
    }
    for (auto leaf : tree.leaves()) {
      bool covered = false;
      for (NodeId u = leaf; u != kNoNode && !covered; u = tree.parent(u)) covered = marked[t][u];
      if (!covered) return "leaf '" + tree.label(leaf) + "' has no ancestor in the set";
    }
  }
  return std::nullopt;
}

bool is_vvs(const AbstractionForest& forest, const Vvs& vvs) { return !vvs_problem(forest, vvs).has_value(); }

Vvs leaves_vvs(const AbstractionForest& forest) {
  Vvs out;
  for (const auto& t : forest.trees()) {
    for (auto l : t.leaves()) out.members.insert(t.label(l));
  }
  return out;
}

Vvs roots_vvs(const AbstractionForest& forest) {
  Vvs out;
  for (const auto& t : forest.trees()) out.members.insert(t.label(t.root()));
  return out;
}

std::vector<std::vector<NodeId>> cut_representatives(const AbstractionForest& forest, const Vvs& vvs) {
  std::vector<std::vector<NodeId>> rep(forest.size());
  for (std::size_t t = 0; t < forest.size(); ++t) rep[t].assign(forest.tree(t).size(), kNoNode);
  for (const auto& label : vvs.members) {
    auto loc = forest.locate(label);
    if (!loc) throw UnknownLabel(label);
    const auto& tree = forest.tree(loc->tree);
    for (NodeId u = loc->node; u < tree.subtree_end(loc->node); ++u) rep[loc->tree][u] = loc->node;
  }
  return rep;
}

PolySet abstract(const PolySet& polys, const AbstractionForest& forest, const Vvs& vvs) {
  const auto& symbols = polys.symbols();
  auto rep = cut_representatives(forest, vvs);
  auto out_symbols = std::make_shared<SymbolTable>();
  std::vector<VarId> mapped(symbols.size(), 0);
  for (auto v : polys.occurring_variables()) {
    const auto& name = symbols.name(v);
    auto loc = forest.locate(name);
    if (loc && rep[loc->tree][loc->node] != kNoNode) {
      mapped[v] = out_symbols->intern(forest.tree(loc->tree).label(rep[loc->tree][loc->node]));
    } else {
      mapped[v] = out_symbols->intern(name);
    }
  }
  std::vector<Polynomial> out;
  out.reserve(polys.size());
  for (const auto& p : polys.polynomials()) {
    std::vector<Monomial> raw;
    raw.reserve(p.num_monomials());
    for (const auto& m : p.monomials()) {
      std::vector<Factor> factors;
      factors.reserve(m.vars.size());
      for (const auto& f : m.vars) factors.push_back(Factor{mapped[f.var], f.exponent});
      raw.push_back(Monomial{m.coefficient, make_key(std::move(factors))});
    }
    out.push_back(normalize(std::move(raw), *out_symbols));
  }
  return PolySet(std::move(out_symbols), std::move(out));
}

Loss loss(const PolySet& polys, const AbstractionForest& forest, const Vvs& vvs) {
  auto compressed = abstract(polys, forest, vvs);
  return Loss{num_m(polys) - num_m(compressed), num_v(polys) - num_v(compressed)};
}

std::size_t monomial_loss(const PolySet& polys, const AbstractionForest& forest, const Vvs& vvs) {
  return loss(polys, forest, vvs).ml;
}

std::size_t variable_loss(const PolySet& polys, const AbstractionForest& forest, const Vvs& vvs) {
  return loss(polys, forest, vvs).vl;
}

Valuation lift(const Valuation& valuation, const AbstractionForest& forest, const Vvs& vvs) {
  auto rep = cut_representatives(forest, vvs);
  Valuation out = valuation;
  for (std::size_t t = 0; t < forest.size(); ++t) {
    const auto& tree = forest.tree(t);
    for (NodeId v = 0; v < tree.size(); ++v) {
      if (rep[t][v] == kNoNode || rep[t][v] == v) continue;
      auto it = valuation.assignments.find(tree.label(rep[t][v]));
      if (it != valuation.assignments.end()) out.assignments[tree.label(v)] = it->second;
    }
  }
  return out;
}

namespace {

// Appended to a residue key to carry the removed variable's exponent and keep
// residue ids distinct per polynomial.
constexpr VarId kExponentTag = static_cast<VarId>(-1);

}  // namespace

LeafIndex::LeafIndex(const PolySet& polys, const AbstractionTree& tree) : tree_(tree), by_node_(tree.size()) {
  const auto& symbols = polys.symbols();
  std::vector<NodeId> leaf_of(symbols.size(), kNoNode);
  for (auto l : tree_.leaves()) {
    if (auto id = symbols.find(tree_.label(l))) leaf_of[*id] = l;
  }
  for (std::size_t p = 0; p < polys.size(); ++p) {
    std::unordered_map<MonomialKey, std::uint32_t, MonomialKeyHash> ids;
    for (const auto& m : polys[p].monomials()) {
      ++visits_;
      NodeId leaf = kNoNode;
      std::uint32_t exponent = 0;
      MonomialKey rest;
      rest.reserve(m.vars.size());
      for (const auto& f : m.vars) {
        if (leaf_of[f.var] != kNoNode) {
          if (leaf != kNoNode) {
            throw CompatibilityError("monomial of polynomial " + std::to_string(p) + " holds two leaves of tree '" +
                                     tree_.label(tree_.root()) + "'");
          }
          leaf = leaf_of[f.var];
          exponent = f.exponent;
        } else {
          rest.push_back(f);
        }
      }
      if (leaf == kNoNode) continue;
      MonomialKey tagged = rest;
      tagged.push_back(Factor{kExponentTag, exponent});
      auto [it, inserted] = ids.try_emplace(std::move(tagged), static_cast<std::uint32_t>(residue_table_.size()));
      if (inserted) residue_table_.emplace_back(p, Residue{std::move(rest), exponent});
      by_node_[leaf].push_back(it->second);
      ++entries_;
    }
  }
}

std::vector<Residue> LeafIndex::residues(std::size_t polynomial, std::string_view leaf) const {
  std::vector<Residue> out;
  auto v = tree_.find(leaf);
  if (!v) throw UnknownLabel(std::string(leaf));
  for (auto id : by_node_[*v]) {
    if (residue_table_[id].first == polynomial) out.push_back(residue_table_[id].second);
  }
  return out;
}

std::size_t LeafIndex::node_ml(NodeId v) const {
  std::vector<bool> seen(residue_table_.size(), false);
  std::size_t total = 0;
  std::size_t distinct = 0;
  for (NodeId u = v; u < tree_.subtree_end(v); ++u) {
    for (auto id : by_node_[u]) {
      ++total;
      if (!seen[id]) {
        seen[id] = true;
        ++distinct;
      }
    }
  }
  return total - distinct;
}

std::vector<std::size_t> LeafIndex::all_node_ml(std::uint64_t* ops) const {
  std::vector<std::uint32_t> stamp(residue_table_.size(), 0);
  std::vector<std::size_t> out(tree_.size(), 0);
  for (NodeId v = 0; v < tree_.size(); ++v) {
    if (tree_.is_leaf(v)) continue;
    const auto mark = v + 1;
    std::size_t total = 0;
    std::size_t distinct = 0;
    for (NodeId u = v; u < tree_.subtree_end(v); ++u) {
      for (auto id : by_node_[u]) {
        ++total;
        if (stamp[id] != mark) {
          stamp[id] = mark;
          ++distinct;
        }
      }
    }
    out[v] = total - distinct;
    if (ops) *ops += total;
  }
  return out;
}

LeafIndex build_leaf_index(const PolySet& polys, const AbstractionTree& tree) { return LeafIndex(polys, tree); }

std::size_t node_ml(const LeafIndex& index, NodeId v) { return index.node_ml(v); }

}  // namespace provabs
