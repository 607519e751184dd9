#include <algorithm>
#include <chrono>
#include <limits>
#include <unordered_set>

#include "provabs/error.h"
#include "provabs/optimizer.h"

namespace provabs {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSaturated - b ? kSaturated : a + b; }

std::uint64_t cuts_below(const AbstractionTree& tree, NodeId v) {
  if (tree.is_leaf(v)) return 1;
  std::uint64_t product = 1;
  for (auto c : tree.children(v)) product = sat_mul(product, cuts_below(tree, c));
  return sat_add(product, 1);
}

// Finest cuts first; {v} last.
std::vector<std::vector<NodeId>> cuts_of(const AbstractionTree& tree, NodeId v) {
  if (tree.is_leaf(v)) return {{v}};
  std::vector<std::vector<NodeId>> partial{{}};
  for (auto c : tree.children(v)) {
    auto child_cuts = cuts_of(tree, c);
    std::vector<std::vector<NodeId>> next;
    next.reserve(partial.size() * child_cuts.size());
    for (const auto& prefix : partial) {
      for (const auto& cut : child_cuts) {
        auto combined = prefix;
        combined.insert(combined.end(), cut.begin(), cut.end());
        next.push_back(std::move(combined));
      }
    }
    partial.swap(next);
  }
  partial.push_back({v});
  return partial;
}

// Substitutes one cut at a time and counts monomials and variables directly.
class CutEvaluator {
 public:
  CutEvaluator(const PolySet& polys, const AbstractionForest& forest, std::uint64_t cap)
      : polys_(polys), forest_(forest) {
    const auto total = count_cuts(forest);
    if (total > cap) throw TooManyCuts(total, cap);
    for (std::size_t t = 0; t < forest.size(); ++t) {
      offset_.push_back(node_total_);
      node_total_ += forest.tree(t).size();
      cuts_.push_back(enumerate_cuts(forest.tree(t), cap));
    }
    const auto& symbols = polys.symbols();
    base_ = static_cast<VarId>(symbols.size());
    slot_.assign(symbols.size(), kNone);
    occurring_ = polys.occurring_variables();
    for (auto v : occurring_) {
      if (auto loc = forest.locate(symbols.name(v))) slot_[v] = offset_[loc->tree] + loc->node;
    }
    rep_.assign(node_total_, 0);
    stamp_.assign(base_ + node_total_, 0);
  }

  // Calls visit(outcome) for every cut until it returns false.
  template <typename Visit>
  void run(Visit&& visit) {
    std::vector<std::size_t> choice(forest_.size(), 0);
    while (true) {
      for (std::size_t t = 0; t < forest_.size(); ++t) apply(t, cuts_[t][choice[t]]);
      CutOutcome outcome;
      for (std::size_t t = 0; t < forest_.size(); ++t) {
        for (auto v : cuts_[t][choice[t]]) outcome.vvs.members.insert(forest_.tree(t).label(v));
      }
      measure(outcome);
      ++evaluated_;
      if (!visit(outcome)) return;
      std::size_t t = 0;
      for (; t < forest_.size(); ++t) {
        if (++choice[t] < cuts_[t].size()) break;
        choice[t] = 0;
      }
      if (t == forest_.size()) return;
    }
  }

  std::uint64_t evaluated() const { return evaluated_; }
  std::uint64_t monomial_visits() const { return visits_; }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  void apply(std::size_t t, const std::vector<NodeId>& cut) {
    const auto& tree = forest_.tree(t);
    for (auto m : cut) {
      for (NodeId u = m; u < tree.subtree_end(m); ++u) rep_[offset_[t] + u] = offset_[t] + m;
    }
  }

  VarId mapped(VarId v) const { return slot_[v] == kNone ? v : base_ + static_cast<VarId>(rep_[slot_[v]]); }

  void measure(CutOutcome& outcome) {
    ++round_;
    for (auto v : occurring_) {
      auto id = mapped(v);
      if (stamp_[id] != round_) {
        stamp_[id] = round_;
        ++outcome.num_v;
      }
    }
    std::unordered_set<MonomialKey, MonomialKeyHash> seen;
    for (const auto& p : polys_.polynomials()) {
      seen.clear();
      seen.reserve(p.num_monomials());
      for (const auto& m : p.monomials()) {
        ++visits_;
        std::vector<Factor> factors;
        factors.reserve(m.vars.size());
        for (const auto& f : m.vars) factors.push_back(Factor{mapped(f.var), f.exponent});
        seen.insert(make_key(std::move(factors)));
      }
      outcome.num_m += seen.size();
    }
  }

  const PolySet& polys_;
  const AbstractionForest& forest_;
  std::vector<std::size_t> offset_;
  std::size_t node_total_ = 0;
  std::vector<std::vector<std::vector<NodeId>>> cuts_;
  VarId base_ = 0;
  std::vector<std::size_t> slot_;
  std::vector<VarId> occurring_;
  std::vector<std::size_t> rep_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t round_ = 0;
  std::uint64_t evaluated_ = 0;
  std::uint64_t visits_ = 0;
};

}  // namespace

std::uint64_t count_cuts(const AbstractionTree& tree) { return cuts_below(tree, tree.root()); }

std::uint64_t count_cuts(const AbstractionForest& forest) {
  std::uint64_t total = 1;
  for (const auto& t : forest.trees()) total = sat_mul(total, count_cuts(t));
  return total;
}

std::vector<std::vector<NodeId>> enumerate_cuts(const AbstractionTree& tree, std::uint64_t cap) {
  const auto total = count_cuts(tree);
  if (total > cap) throw TooManyCuts(total, cap);
  return cuts_of(tree, tree.root());
}

void for_each_cut_outcome(const PolySet& polys, const AbstractionForest& forest, std::uint64_t cap,
                          const std::function<void(const CutOutcome&)>& visit) {
  CutEvaluator evaluator(polys, forest, cap);
  evaluator.run([&](const CutOutcome& outcome) {
    visit(outcome);
    return true;
  });
}

CompressionResult brute_force_vvs(const PolySet& polys, const AbstractionForest& forest, std::size_t bound,
                                  std::uint64_t cap) {
  const auto start = std::chrono::steady_clock::now();
  require_compatible(polys, forest);
  if (bound < 1 || bound > polys.num_m()) {
    throw BoundError("bound " + std::to_string(bound) + " outside 1.." + std::to_string(polys.num_m()));
  }
  const std::size_t k = polys.num_m() - bound;
  CutEvaluator evaluator(polys, forest, cap);

  CompressionResult result;
  std::optional<CutOutcome> best;
  // The last cut enumerated is the roots cut.
  std::optional<CutOutcome> last;
  std::size_t fewest = polys.num_m();
  evaluator.run([&](const CutOutcome& outcome) {
    const std::size_t ml = polys.num_m() - outcome.num_m;
    fewest = std::min(fewest, outcome.num_m);
    last = outcome;
    if (ml >= k) {
      // Fewest variables lost, then most monomials lost, then enumeration order.
      if (!best || outcome.num_v > best->num_v || (outcome.num_v == best->num_v && outcome.num_m < best->num_m)) {
        best = outcome;
      }
    }
    return true;
  });
  result.max_achievable_ml = polys.num_m() - fewest;
  const auto& chosen = best ? *best : *last;
  result.status = best ? Status::kOptimal : Status::kInfeasible;
  result.vvs = chosen.vvs;
  result.ml = polys.num_m() - chosen.num_m;
  result.vl = polys.num_v() - chosen.num_v;
  result.out_num_m = chosen.num_m;
  result.out_num_v = chosen.num_v;
  result.stats.cuts_evaluated = evaluator.evaluated();
  result.stats.monomial_visits = evaluator.monomial_visits();
  result.stats.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

bool decide_precise(const PolySet& polys, const AbstractionForest& forest, std::size_t size, std::size_t granularity,
                    std::uint64_t cap) {
  return find_precise(polys, forest, size, size, granularity, cap).has_value();
}

std::optional<Vvs> find_precise(const PolySet& polys, const AbstractionForest& forest, std::size_t min_size,
                                std::size_t max_size, std::size_t granularity, std::uint64_t cap) {
  require_compatible(polys, forest);
  CutEvaluator evaluator(polys, forest, cap);
  std::optional<Vvs> witness;
  evaluator.run([&](const CutOutcome& outcome) {
    if (outcome.num_m >= min_size && outcome.num_m <= max_size && outcome.num_v == granularity) {
      witness = outcome.vvs;
      return false;
    }
    return true;
  });
  return witness;
}

}  // namespace provabs
