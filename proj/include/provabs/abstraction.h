#pragma once

// Abstraction trees and forests, valid variable sets (cuts), substitution of
// leaves by their chosen ancestor, and the loss metrics derived from it.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "provabs/polynomial.h"

namespace provabs {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

// Nested, owning description of a tree; the shape used by the JSON format.
struct NodeSpec {
  std::string label;
  std::vector<NodeSpec> children;
};

// Rooted labeled tree. Nodes are stored in preorder, so the subtree of v is the
// id range [v, subtree_end(v)) and the root is node 0.
class AbstractionTree {
 public:
  explicit AbstractionTree(const NodeSpec& root);

  std::size_t size() const { return nodes_.size(); }
  NodeId root() const { return 0; }
  const std::string& label(NodeId v) const { return nodes_.at(v).label; }
  NodeId parent(NodeId v) const { return nodes_.at(v).parent; }
  std::span<const NodeId> children(NodeId v) const { return nodes_.at(v).children; }
  bool is_leaf(NodeId v) const { return nodes_.at(v).children.empty(); }
  NodeId subtree_end(NodeId v) const { return nodes_.at(v).end; }
  bool is_ancestor_or_self(NodeId ancestor, NodeId v) const { return ancestor <= v && v < subtree_end(ancestor); }

  std::optional<NodeId> find(std::string_view label) const;
  std::vector<NodeId> leaves() const { return leaves_under(root()); }
  std::vector<NodeId> leaves_under(NodeId v) const;
  std::size_t leaf_count(NodeId v) const;
  // Edges on the longest downward path from v.
  std::size_t height(NodeId v) const;
  std::size_t max_fanout() const;

  NodeSpec to_spec() const;

 private:
  struct Node {
    std::string label;
    NodeId parent = kNoNode;
    std::vector<NodeId> children;
    NodeId end = 0;
  };
  NodeId add(const NodeSpec& spec, NodeId parent);

  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> index_;
};

class AbstractionForest {
 public:
  struct Location {
    std::size_t tree = 0;
    NodeId node = 0;
  };

  AbstractionForest() = default;
  explicit AbstractionForest(std::vector<AbstractionTree> trees);

  const std::vector<AbstractionTree>& trees() const { return trees_; }
  const AbstractionTree& tree(std::size_t i) const { return trees_.at(i); }
  std::size_t size() const { return trees_.size(); }
  std::size_t node_count() const;
  std::optional<Location> locate(std::string_view label) const;

 private:
  std::vector<AbstractionTree> trees_;
  std::unordered_map<std::string, Location> index_;
};

struct ForestViolation {
  enum class Kind { kDuplicateLabel, kSharedLabel, kMultipleRoots, kCycle, kMultipleParents, kMetavariableOccurs };
  Kind kind;
  std::string label;
  std::string detail;
};

std::string_view to_string(ForestViolation::Kind kind);

// Builds a tree from (parent, child) label pairs. Structural problems (no or
// several roots, a node with two parents, cycles) are reported instead of
// thrown; the tree is returned only when there are none.
struct EdgeListResult {
  std::optional<AbstractionTree> tree;
  std::vector<ForestViolation> violations;
};
EdgeListResult tree_from_edges(const std::vector<std::pair<std::string, std::string>>& edges);

// Duplicate labels inside a tree and labels shared between trees.
std::vector<ForestViolation> validate_forest(const AbstractionForest& forest);
// Additionally rejects internal (metavariable) labels that occur in the polynomials.
std::vector<ForestViolation> validate_forest(const AbstractionForest& forest, const PolySet& polys);

struct CompatibilityViolation {
  std::size_t polynomial = 0;
  std::size_t monomial = 0;
  std::size_t tree = 0;
  std::string detail;
};

// Every monomial may contain at most one distinct label of each tree, and that
// label must be a leaf.
std::vector<CompatibilityViolation> check_compatibility(const PolySet& polys, const AbstractionForest& forest);
// Throws CompatibilityError carrying the first violation.
void require_compatible(const PolySet& polys, const AbstractionForest& forest);

// Drops leaves absent from the polynomials, then childless internal nodes, and
// splices out non-root internal nodes left with a single child. Throws
// EmptyTree when no leaf survives.
AbstractionTree clean_tree(const AbstractionTree& tree, const PolySet& polys);
// Cleans every tree; trees without surviving leaves are dropped.
AbstractionForest clean_forest(const AbstractionForest& forest, const PolySet& polys);

struct Vvs {
  std::set<std::string> members;

  friend bool operator==(const Vvs&, const Vvs&) = default;
};

// Reason the set is not a cut of the forest, or nullopt when it is one.
// Throws UnknownLabel for labels outside the forest.
std::optional<std::string> vvs_problem(const AbstractionForest& forest, const Vvs& vvs);
bool is_vvs(const AbstractionForest& forest, const Vvs& vvs);

// All leaves of every tree.
Vvs leaves_vvs(const AbstractionForest& forest);
// The roots of every tree (maximal compression).
Vvs roots_vvs(const AbstractionForest& forest);

// For each tree, the chosen cut member above each node (kNoNode above the cut).
// Requires a valid Vvs.
std::vector<std::vector<NodeId>> cut_representatives(const AbstractionForest& forest, const Vvs& vvs);

// Replaces every leaf by its cut member and re-normalizes each polynomial.
// Variables outside the forest are kept.
PolySet abstract(const PolySet& polys, const AbstractionForest& forest, const Vvs& vvs);

struct Loss {
  std::size_t ml = 0;
  std::size_t vl = 0;
};
Loss loss(const PolySet& polys, const AbstractionForest& forest, const Vvs& vvs);
std::size_t monomial_loss(const PolySet& polys, const AbstractionForest& forest, const Vvs& vvs);
std::size_t variable_loss(const PolySet& polys, const AbstractionForest& forest, const Vvs& vvs);

// Extends a valuation over the abstracted variables to the original leaves:
// each leaf takes the value of its cut member.
Valuation lift(const Valuation& valuation, const AbstractionForest& forest, const Vvs& vvs);

// Residue of a monomial with respect to a tree: the monomial without its tree
// variable, tagged with that variable's exponent. Two monomials of one
// polynomial merge under abstraction iff their residues are equal.
struct Residue {
  MonomialKey rest;
  std::uint32_t exponent = 1;

  friend bool operator==(const Residue&, const Residue&) = default;
};

// Per polynomial P and leaf l, the set D_P[l] of residues of the monomials of P
// containing l. Built in one pass over the monomials.
class LeafIndex {
 public:
  LeafIndex(const PolySet& polys, const AbstractionTree& tree);

  const AbstractionTree& tree() const { return tree_; }
  std::vector<Residue> residues(std::size_t polynomial, std::string_view leaf) const;
  // Sum over polynomials and leaves of |D_P[l]|.
  std::size_t entry_count() const { return entries_; }
  std::size_t monomial_visits() const { return visits_; }

  // Monomials lost when all leaves below v are replaced by v:
  // sum over P of (sum_i |D_P[l_i]| - |union_i D_P[l_i]|).
  std::size_t node_ml(NodeId v) const;
  // `ops`, when given, accumulates the residue visits performed.
  std::vector<std::size_t> all_node_ml(std::uint64_t* ops = nullptr) const;

 private:
  AbstractionTree tree_;
  std::vector<std::vector<std::uint32_t>> by_node_;
  std::vector<std::pair<std::size_t, Residue>> residue_table_;
  std::size_t entries_ = 0;
  std::size_t visits_ = 0;
};

LeafIndex build_leaf_index(const PolySet& polys, const AbstractionTree& tree);
std::size_t node_ml(const LeafIndex& index, NodeId v);

}  // namespace provabs
