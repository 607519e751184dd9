#include <algorithm>

#include <gtest/gtest.h>

#include "provabs/abstraction.h"
#include "provabs/benchgen.h"
#include "provabs/error.h"

namespace provabs {
namespace {

NodeSpec leaf(const std::string& l) { return NodeSpec{l, {}}; }

std::vector<std::string> labels(const AbstractionTree& t) {
  std::vector<std::string> out;
  for (NodeId v = 0; v < t.size(); ++v) out.push_back(t.label(v));
  return out;
}

TEST(Tree, PreorderLayout) {
  const auto t = fixtures::plans_tree();
  EXPECT_EQ(t.label(t.root()), "Plans");
  EXPECT_EQ(t.size(), 18u);
  EXPECT_EQ(t.leaves().size(), 11u);
  EXPECT_EQ(t.max_fanout(), 3u);
  EXPECT_EQ(t.height(t.root()), 3u);
  const auto business = *t.find("Business");
  EXPECT_EQ(t.leaf_count(business), 3u);
  EXPECT_TRUE(t.is_ancestor_or_self(business, *t.find("b2")));
  EXPECT_FALSE(t.is_ancestor_or_self(business, *t.find("p1")));
  EXPECT_EQ(t.parent(*t.find("SB")), business);
}

TEST(Tree, SpecRoundTrip) {
  const auto t = fixtures::year_tree();
  EXPECT_EQ(labels(AbstractionTree(t.to_spec())), labels(t));
}

TEST(EdgeList, BuildsTree) {
  auto r = tree_from_edges({{"r", "a"}, {"r", "b"}, {"a", "a1"}});
  ASSERT_TRUE(r.tree.has_value());
  EXPECT_TRUE(r.violations.empty());
  EXPECT_EQ(labels(*r.tree), (std::vector<std::string>{"r", "a", "a1", "b"}));
}

TEST(EdgeList, ReportsStructuralProblems) {
  using Kind = ForestViolation::Kind;
  auto two_roots = tree_from_edges({{"r", "a"}, {"s", "b"}});
  EXPECT_FALSE(two_roots.tree.has_value());
  ASSERT_FALSE(two_roots.violations.empty());
  EXPECT_EQ(two_roots.violations[0].kind, Kind::kMultipleRoots);

  auto two_parents = tree_from_edges({{"r", "a"}, {"r", "b"}, {"b", "a"}});
  EXPECT_FALSE(two_parents.tree.has_value());
  EXPECT_EQ(two_parents.violations[0].kind, Kind::kMultipleParents);

  auto cycle = tree_from_edges({{"r", "a"}, {"b", "c"}, {"c", "b"}});
  EXPECT_FALSE(cycle.tree.has_value());
  EXPECT_TRUE(std::any_of(cycle.violations.begin(), cycle.violations.end(),
                          [](const ForestViolation& v) { return v.kind == Kind::kCycle; }));
}

TEST(ValidateForest, DuplicateAndSharedLabels) {
  using Kind = ForestViolation::Kind;
  AbstractionForest dup({AbstractionTree(NodeSpec{"r", {leaf("a"), leaf("a")}})});
  auto v = validate_forest(dup);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Kind::kDuplicateLabel);

  AbstractionForest shared({AbstractionTree(NodeSpec{"r", {leaf("a")}}), AbstractionTree(NodeSpec{"s", {leaf("a")}})});
  v = validate_forest(shared);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Kind::kSharedLabel);
}

TEST(ValidateForest, MetavariableInPolynomial) {
  auto polys = make_polyset({{{1, {{"SB", 1}}}}});
  AbstractionForest forest({fixtures::plans_tree()});
  auto v = validate_forest(forest, polys);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ForestViolation::Kind::kMetavariableOccurs);
  EXPECT_EQ(v[0].label, "SB");
}

TEST(Compatibility, TwoLeavesOfOneTree) {
  auto polys = make_polyset({{{1, {{"b1", 1}, {"b2", 1}}}, {1, {{"p1", 1}, {"m1", 1}}}}});
  AbstractionForest forest({fixtures::plans_tree(), fixtures::year_tree()});
  auto v = check_compatibility(polys, forest);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].tree, 0u);
  EXPECT_THROW(require_compatible(polys, forest), CompatibilityError);
}

TEST(Compatibility, ExampleIsCompatible) {
  AbstractionForest forest({fixtures::plans_tree(), fixtures::year_tree()});
  EXPECT_TRUE(check_compatibility(fixtures::telephony_pair(), forest).empty());
}

TEST(Clean, DropsAbsentLeavesAndSplicesUnaryNodes) {
  const auto cleaned = clean_tree(fixtures::plans_tree(), fixtures::telephony_pair());
  // F, Y and Standard keep one leaf each and disappear.
  EXPECT_EQ(labels(cleaned),
            (std::vector<std::string>{"Plans", "Business", "SB", "b1", "b2", "e", "Special", "f1", "y1", "v", "p1"}));
}

TEST(Clean, KeepsUnaryRoot) {
  const auto cleaned = clean_tree(fixtures::year_tree(), fixtures::telephony_single());
  EXPECT_EQ(labels(cleaned), (std::vector<std::string>{"Year", "q1", "m1", "m3"}));
  auto one = make_polyset({{{1, {{"m1", 1}}}}});
  EXPECT_EQ(labels(clean_tree(fixtures::year_tree(), one)), (std::vector<std::string>{"Year", "m1"}));
}

TEST(Clean, EmptyTreeThrowsAndForestDropsIt) {
  auto polys = make_polyset({{{1, {{"z", 1}}}}});
  EXPECT_THROW(clean_tree(fixtures::year_tree(), polys), EmptyTree);
  EXPECT_EQ(clean_forest(AbstractionForest({fixtures::year_tree()}), polys).size(), 0u);
}

TEST(Vvs, ValidAndInvalidCuts) {
  AbstractionForest forest({fixtures::year_tree()});
  EXPECT_TRUE(is_vvs(forest, Vvs{{"Year"}}));
  EXPECT_TRUE(is_vvs(forest, Vvs{{"q1", "q2", "q3", "m10", "m11", "m12"}}));
  EXPECT_FALSE(is_vvs(forest, Vvs{{"q1", "q2", "q3"}}));
  EXPECT_FALSE(is_vvs(forest, Vvs{{"Year", "q1"}}));
  EXPECT_THROW(vvs_problem(forest, Vvs{{"nope"}}), UnknownLabel);
  EXPECT_EQ(roots_vvs(forest), (Vvs{{"Year"}}));
  EXPECT_EQ(leaves_vvs(forest).members.size(), 12u);
}

TEST(Abstract, QuarterRollupMergesMonths) {
  const auto polys = fixtures::telephony_single();
  AbstractionForest forest({fixtures::year_tree()});
  const auto out = abstract(polys, forest, Vvs{{"q1", "q2", "q3", "q4"}});
  EXPECT_EQ(out.num_m(), 4u);
  EXPECT_EQ(out.num_v(), 5u);
  const auto l = loss(polys, forest, Vvs{{"q1", "q2", "q3", "q4"}});
  EXPECT_EQ(l.ml, 4u);
  EXPECT_EQ(l.vl, 1u);
}

TEST(Abstract, LeavesCutIsIdentity) {
  const auto polys = fixtures::telephony_pair();
  AbstractionForest forest({fixtures::plans_tree(), fixtures::year_tree()});
  const auto out = abstract(polys, forest, leaves_vvs(forest));
  EXPECT_EQ(out.num_m(), polys.num_m());
  EXPECT_EQ(out.num_v(), polys.num_v());
  EXPECT_EQ(to_string(out[1], out.symbols()), to_string(polys[1], polys.symbols()));
}

TEST(Abstract, ExponentsAddWhenFreeVariablesRepeat) {
  // x^2 under a and x^1 under b stay distinct after rolling a, b into r.
  auto polys = make_polyset({{{1, {{"a", 2}}}, {1, {{"b", 1}}}, {1, {{"b", 2}}}}});
  AbstractionForest forest({AbstractionTree(NodeSpec{"r", {leaf("a"), leaf("b")}})});
  EXPECT_EQ(abstract(polys, forest, Vvs{{"r"}}).num_m(), 2u);
}

TEST(Lift, LeavesTakeTheirCutValue) {
  AbstractionForest forest({fixtures::year_tree()});
  Valuation v{{{"q1", 2.0}, {"Year", 9.0}, {"x", 1.0}}};
  auto lifted = lift(v, forest, Vvs{{"q1", "q2", "q3", "q4"}});
  EXPECT_EQ(lifted.assignments.at("m1"), 2.0);
  EXPECT_EQ(lifted.assignments.at("m3"), 2.0);
  EXPECT_EQ(lifted.assignments.at("x"), 1.0);
  EXPECT_FALSE(lifted.assignments.contains("m4"));
}

TEST(LeafIndex, ResiduesCarryExponent) {
  // m1 * p1 and m1^2 * p1 share the rest but not the tree exponent.
  auto polys = make_polyset({{{1, {{"m1", 1}, {"p1", 1}}}, {1, {{"m2", 2}, {"p1", 1}}}}});
  auto index = build_leaf_index(polys, fixtures::year_tree());
  ASSERT_EQ(index.residues(0, "m1").size(), 1u);
  EXPECT_EQ(index.residues(0, "m1")[0].exponent, 1u);
  EXPECT_EQ(index.residues(0, "m2")[0].exponent, 2u);
  EXPECT_EQ(node_ml(index, *index.tree().find("q1")), 0u);
  EXPECT_EQ(index.entry_count(), 2u);
}

TEST(LeafIndex, NodeLossOnExample) {
  const auto polys = fixtures::telephony_pair();
  auto index = build_leaf_index(polys, fixtures::plans_tree());
  const auto& t = index.tree();
  EXPECT_EQ(node_ml(index, *t.find("SB")), 2u);
  EXPECT_EQ(node_ml(index, *t.find("Business")), 4u);
  EXPECT_EQ(node_ml(index, *t.find("Special")), 4u);
  EXPECT_EQ(node_ml(index, *t.find("Plans")), 10u);
  EXPECT_EQ(node_ml(index, *t.find("b1")), 0u);
}

}  // namespace
}  // namespace provabs
