#include <algorithm>
#include <chrono>
#include <limits>

#include "provabs/error.h"
#include "provabs/optimizer.h"

namespace provabs {

LossTable::LossTable(std::vector<LossEntry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.ml < b.ml; });
}

const LossEntry* LossTable::find(std::size_t ml) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), ml, [](const auto& e, std::size_t x) { return e.ml < x; });
  if (it == entries_.end() || it->ml != ml) return nullptr;
  return &*it;
}

std::optional<std::size_t> LossTable::vl_at(std::size_t ml) const {
  if (const auto* e = find(ml)) return e->vl;
  return std::nullopt;
}

LossTable LossTable::leaf() { return LossTable({LossEntry{0, 0, 0}}); }

std::string_view to_string(Status status) {
  switch (status) {
    case Status::kOptimal:
      return "optimal";
    case Status::kHeuristicAdequate:
      return "heuristic-adequate";
    case Status::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();

// Dense scratch over slots 0..k, reset through the touched list.
class Combiner {
 public:
  explicit Combiner(std::size_t k) : k_(k), vl_(k + 1, kUnset), achieved_(k + 1, 0), left_(k + 1), right_(k + 1) {}

  // Min-plus product of `left` (a partial combination) and `right` (the next
  // child). Writes the combined entries and, per entry, the slots it came from.
  void run(const std::vector<LossEntry>& left, const std::vector<LossEntry>& right, std::vector<LossEntry>& out,
           std::vector<std::size_t>* from_left, std::vector<std::size_t>* from_right, std::uint64_t& ops) {
    touched_.clear();
    for (const auto& a : left) {
      for (const auto& b : right) {
        ++ops;
        const std::size_t slot = std::min(a.ml + b.ml, k_);
        const std::size_t vl = a.vl + b.vl;
        const std::size_t achieved = a.achieved_ml + b.achieved_ml;
        if (vl_[slot] == kUnset) {
          touched_.push_back(slot);
        } else if (vl > vl_[slot] || (vl == vl_[slot] && achieved <= achieved_[slot])) {
          continue;
        }
        vl_[slot] = vl;
        achieved_[slot] = achieved;
        left_[slot] = a.ml;
        right_[slot] = b.ml;
      }
    }
    std::sort(touched_.begin(), touched_.end());
    out.clear();
    if (from_left) from_left->clear();
    if (from_right) from_right->clear();
    for (auto slot : touched_) {
      out.push_back(LossEntry{slot, vl_[slot], achieved_[slot]});
      if (from_left) from_left->push_back(left_[slot]);
      if (from_right) from_right->push_back(right_[slot]);
      vl_[slot] = kUnset;
    }
  }

 private:
  std::size_t k_;
  std::vector<std::size_t> vl_;
  std::vector<std::size_t> achieved_;
  std::vector<std::size_t> left_;
  std::vector<std::size_t> right_;
  std::vector<std::size_t> touched_;
};

}  // namespace

LossTable compute_array(std::span<const LossTable> children, std::size_t k) {
  if (children.empty()) return LossTable();
  std::vector<LossEntry> current;
  for (const auto& e : children.front().entries()) {
    if (e.ml <= k) current.push_back(e);
  }
  Combiner combiner(k);
  std::uint64_t ops = 0;
  std::vector<LossEntry> next;
  for (std::size_t i = 1; i < children.size(); ++i) {
    combiner.run(current, children[i].entries(), next, nullptr, nullptr, ops);
    current.swap(next);
  }
  return LossTable(std::move(current));
}

SingleTreeOptimizer::SingleTreeOptimizer(const PolySet& polys, const AbstractionTree& tree, std::size_t bound)
    : polys_(polys), tree_(tree), bound_(bound), k_(0) {
  require_compatible(polys_, AbstractionForest({tree_}));
  if (bound_ < 1 || bound_ > polys_.num_m()) {
    throw BoundError("bound " + std::to_string(bound_) + " outside 1.." + std::to_string(polys_.num_m()));
  }
  k_ = polys_.num_m() - bound_;
}

const LossTable& SingleTreeOptimizer::table(std::string_view label) const {
  auto v = tree_.find(label);
  if (!v) throw UnknownLabel(std::string(label));
  return table(*v);
}

void SingleTreeOptimizer::combine(NodeId v) {
  auto& state = nodes_[v];
  const auto children = tree_.children(v);
  Combiner combiner(k_);
  std::vector<LossEntry> current = nodes_[children.front()].table.entries();
  std::vector<LossEntry> next;
  for (std::size_t i = 1; i < children.size(); ++i) {
    Stage stage;
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    combiner.run(current, nodes_[children[i]].table.entries(), next, &left, &right, stats_.combine_ops);
    stage.keys.reserve(next.size());
    stage.splits.reserve(next.size());
    for (std::size_t j = 0; j < next.size(); ++j) {
      stage.keys.push_back(next[j].ml);
      stage.splits.push_back(Split{left[j], right[j]});
    }
    state.stages.push_back(std::move(stage));
    current.swap(next);
  }
  state.table = LossTable(std::move(current));
}

CompressionResult SingleTreeOptimizer::solve() {
  const auto start = std::chrono::steady_clock::now();
  stats_ = Stats{};
  nodes_.assign(tree_.size(), NodeState{});

  LeafIndex index(polys_, tree_);
  stats_.monomial_visits += index.monomial_visits();
  node_ml_ = index.all_node_ml(&stats_.monomial_visits);

  occurring_leaves_.assign(tree_.size(), 0);
  for (NodeId v = static_cast<NodeId>(tree_.size()); v-- > 0;) {
    if (tree_.is_leaf(v)) {
      auto id = polys_.symbols().find(tree_.label(v));
      occurring_leaves_[v] = (id && polys_.occurs(*id)) ? 1 : 0;
    } else {
      for (auto c : tree_.children(v)) occurring_leaves_[v] += occurring_leaves_[c];
    }
  }

  // Preorder ids put every child after its parent; walking ids downwards is a
  // bottom-up traversal.
  for (NodeId v = static_cast<NodeId>(tree_.size()); v-- > 0;) {
    ++stats_.node_visits;
    auto& state = nodes_[v];
    if (tree_.is_leaf(v)) {
      state.table = LossTable::leaf();
      stats_.table_entries += state.table.size();
      continue;
    }
    const std::size_t own_ml = node_ml_[v];
    const std::size_t own_vl = occurring_leaves_[v] > 0 ? occurring_leaves_[v] - 1 : 0;
    const std::size_t slot = std::min(own_ml, k_);
    const auto children = tree_.children(v);
    const bool height_one = std::all_of(children.begin(), children.end(), [&](NodeId c) { return tree_.is_leaf(c); });
    if (height_one) {
      state.shortcut = true;
      std::vector<LossEntry> entries{LossEntry{0, 0, 0}};
      if (slot > 0) {
        entries.push_back(LossEntry{slot, own_vl, own_ml});
        state.singleton_slot = slot;
      }
      state.table = LossTable(std::move(entries));
    } else {
      combine(v);
      auto entries = state.table.entries();
      auto it = std::find_if(entries.begin(), entries.end(), [&](const LossEntry& e) { return e.ml == slot; });
      if (it == entries.end()) {
        entries.push_back(LossEntry{slot, own_vl, own_ml});
        state.singleton_slot = slot;
      } else if (own_vl < it->vl || (own_vl == it->vl && own_ml > it->achieved_ml)) {
        *it = LossEntry{slot, own_vl, own_ml};
        state.singleton_slot = slot;
      }
      state.table = LossTable(std::move(entries));
    }
    stats_.table_entries += state.table.size();
  }
  solved_ = true;

  CompressionResult result;
  const auto& root_table = nodes_[tree_.root()].table;
  // Coarsening never lowers ML, so the roots cut attains the maximum.
  result.max_achievable_ml = node_ml_[tree_.root()];
  AbstractionForest single({tree_});
  if (const auto* answer = root_table.find(k_)) {
    result.status = Status::kOptimal;
    for (auto v : reconstruct(tree_.root(), k_)) result.vvs.members.insert(tree_.label(v));
    result.ml = answer->achieved_ml;
    result.vl = answer->vl;
  } else {
    result.status = Status::kInfeasible;
    result.vvs = roots_vvs(single);
    result.ml = node_ml_[tree_.root()];
    result.vl = occurring_leaves_[tree_.root()] > 0 ? occurring_leaves_[tree_.root()] - 1 : 0;
  }
  result.out_num_m = polys_.num_m() - result.ml;
  result.out_num_v = polys_.num_v() - result.vl;
  stats_.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  result.stats = stats_;
  return result;
}

std::vector<NodeId> SingleTreeOptimizer::reconstruct(NodeId v, std::size_t ml) const {
  if (!solved_) throw Error("reconstruct() before solve()");
  if (!nodes_.at(v).table.find(ml)) {
    throw Error("slot " + std::to_string(ml) + " of node '" + tree_.label(v) + "' is empty");
  }
  std::vector<NodeId> out;
  collect(v, ml, out);
  std::sort(out.begin(), out.end());
  return out;
}

void SingleTreeOptimizer::collect(NodeId v, std::size_t ml, std::vector<NodeId>& out) const {
  const auto& state = nodes_[v];
  if (tree_.is_leaf(v) || state.singleton_slot == ml) {
    out.push_back(v);
    return;
  }
  const auto children = tree_.children(v);
  if (state.shortcut) {
    out.insert(out.end(), children.begin(), children.end());
    return;
  }
  std::size_t current = ml;
  for (std::size_t s = state.stages.size(); s-- > 0;) {
    const auto& stage = state.stages[s];
    auto it = std::lower_bound(stage.keys.begin(), stage.keys.end(), current);
    const auto& split = stage.splits[static_cast<std::size_t>(it - stage.keys.begin())];
    collect(children[s + 1], split.right, out);
    current = split.left;
  }
  collect(children.front(), current, out);
}

CompressionResult optimal_vvs_single_tree(const PolySet& polys, const AbstractionTree& tree, std::size_t bound) {
  SingleTreeOptimizer optimizer(polys, tree, bound);
  return optimizer.solve();
}

}  // namespace provabs
