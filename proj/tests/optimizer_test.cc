#include <map>

#include <gtest/gtest.h>

#include "provabs/benchgen.h"
#include "provabs/error.h"
#include "provabs/optimizer.h"

namespace provabs {
namespace {

using Slots = std::map<std::size_t, std::size_t>;

Slots slots(const LossTable& t) {
  Slots out;
  for (const auto& e : t.entries()) out[e.ml] = e.vl;
  return out;
}

LossTable table(const Slots& s) {
  std::vector<LossEntry> entries;
  for (auto [ml, vl] : s) entries.push_back({ml, vl, ml});
  return LossTable(entries);
}

AbstractionForest example_forest(const PolySet& polys) {
  return clean_forest(AbstractionForest({fixtures::plans_tree(), fixtures::year_tree()}), polys);
}

TEST(LossTable, LookupAndLeaf) {
  auto t = table({{0, 0}, {2, 1}});
  EXPECT_EQ(t.vl_at(2), 1u);
  EXPECT_FALSE(t.vl_at(1).has_value());
  EXPECT_EQ(slots(LossTable::leaf()), (Slots{{0, 0}}));
}

TEST(ComputeArray, MinPlusOverPresentSlots) {
  std::vector<LossTable> kids = {table({{0, 0}, {2, 1}}), table({{0, 0}, {1, 1}, {2, 1}})};
  // 2 = 0+2 (vl 1) or 2+0 (vl 1); 3 = 2+1 (vl 2); 4 = 2+2 (vl 2).
  EXPECT_EQ(slots(compute_array(kids, 10)), (Slots{{0, 0}, {1, 1}, {2, 1}, {3, 2}, {4, 2}}));
}

TEST(ComputeArray, SumsAtOrBeyondKClampIntoLastSlot) {
  std::vector<LossTable> kids = {table({{0, 0}, {3, 1}}), table({{0, 0}, {3, 1}})};
  EXPECT_EQ(slots(compute_array(kids, 5)), (Slots{{0, 0}, {3, 1}, {5, 2}}));
}

TEST(ComputeArray, ClampKeepsCheaperOverflow) {
  std::vector<LossTable> kids = {table({{0, 0}, {4, 3}, {5, 1}}), table({{0, 0}, {1, 0}})};
  // 4+1 costs 3, the clamped 5 alone costs 1: slot 5 keeps 1.
  EXPECT_EQ(slots(compute_array(kids, 5)).at(5), 1u);
}

TEST(ComputeArray, NoChildren) { EXPECT_EQ(compute_array({}, 3).size(), 0u); }

TEST(SingleTree, ExampleTablesAndResult) {
  const auto polys = fixtures::telephony_pair();
  const auto tree = clean_tree(fixtures::plans_tree(), polys);
  SingleTreeOptimizer opt(polys, tree, 9);
  EXPECT_EQ(opt.k(), 5u);
  const auto r = opt.solve();
  EXPECT_EQ(slots(opt.table("SB")), (Slots{{0, 0}, {2, 1}}));
  EXPECT_EQ(slots(opt.table("Special")), (Slots{{0, 0}, {4, 2}}));
  EXPECT_EQ(slots(opt.table("Business")), (Slots{{0, 0}, {2, 1}, {4, 2}}));
  EXPECT_EQ(slots(opt.table("Plans")), (Slots{{0, 0}, {2, 1}, {4, 2}, {5, 3}}));
  EXPECT_EQ(r.status, Status::kOptimal);
  EXPECT_EQ(r.vvs, (Vvs{{"SB", "Special", "e", "p1"}}));
  EXPECT_EQ(r.ml, 6u);
  EXPECT_EQ(r.vl, 3u);
  EXPECT_EQ(r.out_num_m, 8u);
  EXPECT_EQ(r.out_num_v, 6u);
  EXPECT_EQ(r.max_achievable_ml, 10u);
}

TEST(SingleTree, BoundEqualToNumMKeepsLeaves) {
  const auto polys = fixtures::telephony_pair();
  const auto tree = clean_tree(fixtures::plans_tree(), polys);
  const auto r = optimal_vvs_single_tree(polys, tree, polys.num_m());
  EXPECT_EQ(r.vl, 0u);
  EXPECT_EQ(r.ml, 0u);
  EXPECT_EQ(r.vvs, leaves_vvs(AbstractionForest({tree})));
}

TEST(SingleTree, InfeasibleReportsReachableLoss) {
  const auto polys = fixtures::telephony_pair();
  const auto tree = clean_tree(fixtures::year_tree(), polys);
  const auto r = optimal_vvs_single_tree(polys, tree, 3);
  EXPECT_EQ(r.status, Status::kInfeasible);
  EXPECT_EQ(r.max_achievable_ml, 7u);
}

TEST(SingleTree, RejectsBadBoundAndIncompatibleInput) {
  const auto polys = fixtures::telephony_pair();
  const auto tree = fixtures::plans_tree();
  EXPECT_THROW(optimal_vvs_single_tree(polys, tree, 0), BoundError);
  EXPECT_THROW(optimal_vvs_single_tree(polys, tree, 15), BoundError);
  auto bad = make_polyset({{{1, {{"b1", 1}, {"b2", 1}}}}});
  EXPECT_THROW(optimal_vvs_single_tree(bad, tree, 1), CompatibilityError);
}

TEST(SingleTree, ReconstructMatchesTableSlot) {
  const auto polys = fixtures::telephony_pair();
  const auto tree = clean_tree(fixtures::plans_tree(), polys);
  SingleTreeOptimizer opt(polys, tree, 9);
  opt.solve();
  const auto business = *tree.find("Business");
  const auto cut = opt.reconstruct(business, 2);
  std::set<std::string> names;
  for (auto v : cut) names.insert(tree.label(v));
  EXPECT_EQ(names, (std::set<std::string>{"SB", "e"}));
}

TEST(SingleTree, NodeVisitsDoNotDependOnBound) {
  const auto polys = fixtures::telephony_pair();
  const auto tree = clean_tree(fixtures::plans_tree(), polys);
  const auto a = optimal_vvs_single_tree(polys, tree, 4).stats.node_visits;
  for (std::size_t b = 5; b <= polys.num_m(); ++b) {
    EXPECT_EQ(optimal_vvs_single_tree(polys, tree, b).stats.node_visits, a);
  }
}

TEST(Greedy, ExampleTrace) {
  const auto polys = fixtures::telephony_pair();
  const auto r = greedy_vvs(polys, example_forest(polys), 4);
  EXPECT_EQ(r.promotions, (std::vector<std::string>{"q1", "SB", "Business", "Special"}));
  EXPECT_EQ(r.vl, 5u);
  EXPECT_EQ(r.ml, 11u);
  EXPECT_EQ(r.status, Status::kHeuristicAdequate);
  EXPECT_EQ(r.stats.promotions, 4u);
}

TEST(Greedy, TiesBreakCaseInsensitively) {
  auto polys = make_polyset({{{1, {{"a1", 1}}}, {1, {{"a2", 1}}}, {1, {{"b1", 1}}}, {1, {{"b2", 1}}}}});
  AbstractionForest forest({AbstractionTree(
      NodeSpec{"r", {NodeSpec{"Beta", {{"b1", {}}, {"b2", {}}}}, NodeSpec{"alpha", {{"a1", {}}, {"a2", {}}}}}})});
  const auto r = greedy_vvs(polys, forest, 3);
  EXPECT_EQ(r.promotions, (std::vector<std::string>{"alpha"}));
}

TEST(Greedy, PromotionsShrinkAsBoundGrows) {
  const auto polys = fixtures::telephony_pair();
  const auto forest = example_forest(polys);
  std::uint64_t last = ~0ull;
  for (std::size_t b = 2; b <= polys.num_m(); ++b) {
    const auto p = greedy_vvs(polys, forest, b).stats.promotions;
    EXPECT_LE(p, last);
    last = p;
  }
  EXPECT_EQ(last, 0u);
}

TEST(Greedy, InfeasibleWhenCandidatesRunOut) {
  const auto polys = fixtures::telephony_pair();
  const auto forest = example_forest(polys);
  const auto r = greedy_vvs(polys, forest, 1);
  EXPECT_EQ(r.status, Status::kInfeasible);
  EXPECT_EQ(r.max_achievable_ml, 12u);
}

TEST(CountCuts, SmallShapes) {
  EXPECT_EQ(count_cuts(fixtures::year_tree()), 17u);
  EXPECT_EQ(count_cuts(AbstractionForest({fixtures::year_tree(), fixtures::year_tree()})), 289u);
  EXPECT_EQ(count_cuts(AbstractionTree(NodeSpec{"x", {}})), 1u);
}

TEST(CountCuts, Saturates) {
  EXPECT_EQ(count_cuts(gen_tree(TreeSpec{1, {64, 2}, "x", ""})), ~0ull);
}

TEST(EnumerateCuts, FinestFirstRootLast) {
  const auto t = fixtures::year_tree();
  const auto cuts = enumerate_cuts(t);
  ASSERT_EQ(cuts.size(), 17u);
  EXPECT_EQ(cuts.front().size(), 12u);
  EXPECT_EQ(cuts.back(), (std::vector<NodeId>{t.root()}));
  EXPECT_THROW(enumerate_cuts(t, 16), TooManyCuts);
}

TEST(BruteForce, ExampleOptimum) {
  const auto polys = fixtures::telephony_pair();
  const auto r = brute_force_vvs(polys, example_forest(polys), 4);
  EXPECT_EQ(r.vvs, (Vvs{{"q1", "Special", "SB", "e", "p1"}}));
  EXPECT_EQ(r.vl, 4u);
  EXPECT_EQ(r.ml, 10u);
  EXPECT_EQ(r.stats.cuts_evaluated, count_cuts(example_forest(polys)));
}

TEST(BruteForce, CapIsEnforced) {
  const auto polys = fixtures::telephony_pair();
  EXPECT_THROW(brute_force_vvs(polys, example_forest(polys), 4, 3), TooManyCuts);
}

TEST(BruteForce, InfeasibleReturnsRoots) {
  const auto polys = fixtures::telephony_pair();
  const auto forest = example_forest(polys);
  const auto r = brute_force_vvs(polys, forest, 1);
  EXPECT_EQ(r.status, Status::kInfeasible);
  EXPECT_EQ(r.vvs, roots_vvs(forest));
  EXPECT_EQ(r.max_achievable_ml, 12u);
}

TEST(Precise, SizeAndGranularity) {
  const auto polys = fixtures::telephony_single();
  AbstractionForest forest({fixtures::plans_tree()});
  // S1 gives 4 monomials over 4 variables; the roots give 2 over 3.
  EXPECT_TRUE(decide_precise(polys, forest, 4, 4));
  EXPECT_TRUE(decide_precise(polys, forest, 2, 3));
  EXPECT_FALSE(decide_precise(polys, forest, 3, 3));
  auto w = find_precise(polys, forest, 1, 3, 3);
  ASSERT_TRUE(w.has_value());
  EXPECT_TRUE(is_vvs(forest, *w));
}

}  // namespace
}  // namespace provabs
