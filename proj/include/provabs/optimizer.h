#pragma once

// Compressors choosing a valid variable set (cut) whose abstraction has at most
// B monomials while losing as few variables as possible:
//  - optimal_vvs_single_tree: exact tree DP over sparse loss tables,
//  - greedy_vvs: bottom-up promotion heuristic for forests,
//  - brute_force_vvs / decide_precise: exhaustive cut enumeration.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "provabs/abstraction.h"
#include "provabs/polynomial.h"

namespace provabs {

inline constexpr std::uint64_t kDefaultCutCap = 10'000'000;

// One present (non-bottom) slot of a loss table. `ml` is the slot index: the
// exact monomial loss when below k, or any loss >= k for the last slot.
// `achieved_ml` is the unclamped loss of the cut that realizes the slot.
struct LossEntry {
  std::size_t ml = 0;
  std::size_t vl = 0;
  std::size_t achieved_ml = 0;

  friend bool operator==(const LossEntry&, const LossEntry&) = default;
};

// Sparse map from monomial loss (0..k) to the minimal variable loss over cuts
// of one subtree. Absent slots mean no such cut exists.
class LossTable {
 public:
  LossTable() = default;
  explicit LossTable(std::vector<LossEntry> entries);

  const std::vector<LossEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const LossEntry* find(std::size_t ml) const;
  std::optional<std::size_t> vl_at(std::size_t ml) const;

  // The unique table holding only slot 0 with no loss (a leaf).
  static LossTable leaf();

 private:
  std::vector<LossEntry> entries_;
};

// Min-plus combination of the tables of disjoint sibling subtrees. Slot j < k
// is the minimum over decompositions summing to exactly j; sums reaching k or
// beyond land in slot k. Only present slots are visited.
LossTable compute_array(std::span<const LossTable> children, std::size_t k);

enum class Status { kOptimal, kHeuristicAdequate, kInfeasible };
std::string_view to_string(Status status);

struct Stats {
  std::uint64_t node_visits = 0;
  std::uint64_t table_entries = 0;
  std::uint64_t combine_ops = 0;
  std::uint64_t monomial_visits = 0;
  std::uint64_t promotions = 0;
  std::uint64_t cuts_evaluated = 0;
  double elapsed_ms = 0.0;

  // Everything the algorithm counted, for the complexity envelope checks.
  std::uint64_t operations() const { return node_visits + table_entries + combine_ops + monomial_visits; }
};

struct CompressionResult {
  Status status = Status::kInfeasible;
  Vvs vvs;
  std::size_t ml = 0;
  std::size_t vl = 0;
  std::size_t out_num_m = 0;
  std::size_t out_num_v = 0;
  // Largest monomial loss any cut reaches; lets callers pick a feasible bound.
  std::size_t max_achievable_ml = 0;
  // Greedy only: promoted nodes in order.
  std::vector<std::string> promotions;
  Stats stats;
};

// Exact optimum for a single tree. Tables are kept after solve() so tests and
// tools can inspect them.
class SingleTreeOptimizer {
 public:
  // Throws CompatibilityError if the tree is incompatible with the polynomials
  // and BoundError unless 1 <= bound <= numM.
  SingleTreeOptimizer(const PolySet& polys, const AbstractionTree& tree, std::size_t bound);

  CompressionResult solve();

  std::size_t k() const { return k_; }
  const LossTable& table(NodeId v) const { return nodes_.at(v).table; }
  const LossTable& table(std::string_view label) const;
  // The cut of v's subtree realizing slot `ml` of v's table.
  std::vector<NodeId> reconstruct(NodeId v, std::size_t ml) const;

 private:
  struct Split {
    std::size_t left = 0;
    std::size_t right = 0;
  };
  struct Stage {
    std::vector<std::size_t> keys;
    std::vector<Split> splits;
  };
  struct NodeState {
    LossTable table;
    std::optional<std::size_t> singleton_slot;
    bool shortcut = false;
    // stages[i] combines children 0..i+1; empty for leaves and shortcut nodes.
    std::vector<Stage> stages;
  };

  void combine(NodeId v);
  void collect(NodeId v, std::size_t ml, std::vector<NodeId>& out) const;

  const PolySet& polys_;
  AbstractionTree tree_;
  std::size_t bound_;
  std::size_t k_;
  std::vector<NodeState> nodes_;
  std::vector<std::size_t> node_ml_;
  std::vector<std::size_t> occurring_leaves_;
  Stats stats_;
  bool solved_ = false;
};

CompressionResult optimal_vvs_single_tree(const PolySet& polys, const AbstractionTree& tree, std::size_t bound);

// Starts from all leaves and repeatedly promotes the candidate (a node whose
// children are all in the set) with the smallest resulting variable loss,
// until the loss target numM - B is met or no candidate remains. Ties go to
// the label that sorts first case-insensitively. Nodes with at most one
// occurring child are renamings: applied silently below the root, skipped at it.
CompressionResult greedy_vvs(const PolySet& polys, const AbstractionForest& forest, std::size_t bound);

// Number of cuts of a tree: cuts(leaf) = 1, cuts(v) = 1 + prod cuts(child).
// Saturates at UINT64_MAX.
std::uint64_t count_cuts(const AbstractionTree& tree);
std::uint64_t count_cuts(const AbstractionForest& forest);

// Every cut of the tree, finest first and {root} last; child cuts are combined
// in lexicographic order. Throws TooManyCuts when count_cuts exceeds the cap.
std::vector<std::vector<NodeId>> enumerate_cuts(const AbstractionTree& tree, std::uint64_t cap = kDefaultCutCap);

// Size and granularity of the abstraction under one cut.
struct CutOutcome {
  Vvs vvs;
  std::size_t num_m = 0;
  std::size_t num_v = 0;
};

// Visits every cut of the forest (cartesian product of tree cuts) and reports
// its abstracted size by direct substitution. Throws TooManyCuts.
void for_each_cut_outcome(const PolySet& polys, const AbstractionForest& forest, std::uint64_t cap,
                          const std::function<void(const CutOutcome&)>& visit);

// Among adequate cuts: fewest variables lost, then most monomials lost, then
// the first enumerated, which favours finer cuts.
CompressionResult brute_force_vvs(const PolySet& polys, const AbstractionForest& forest, std::size_t bound,
                                  std::uint64_t cap = kDefaultCutCap);

// Whether some cut yields exactly `size` monomials and exactly `granularity`
// variables.
bool decide_precise(const PolySet& polys, const AbstractionForest& forest, std::size_t size, std::size_t granularity,
                    std::uint64_t cap = kDefaultCutCap);
// A cut whose size lies in [min_size, max_size] with exactly `granularity`
// variables, if one exists.
std::optional<Vvs> find_precise(const PolySet& polys, const AbstractionForest& forest, std::size_t min_size,
                                std::size_t max_size, std::size_t granularity, std::uint64_t cap = kDefaultCutCap);

}  // namespace provabs
