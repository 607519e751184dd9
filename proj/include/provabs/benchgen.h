#pragma once

// Deterministic instance generators. Every generator is a pure function of its
// spec; equal specs give identical output on every platform.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "provabs/abstraction.h"
#include "provabs/polynomial.h"

namespace provabs {

// SplitMix64. Distributions are implemented here rather than taken from
// <random>, whose distributions differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform in [lo, hi]; requires lo <= hi.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  // Uniform in [0, 1).
  double uniform_real();
  // Independent stream; advances this one by a single step.
  Rng split();

 private:
  std::uint64_t state_;
};

// Uniform fan-out per level, root first. Leaves are labeled
// <leaf_prefix><i> for i = 0..; inner nodes <leaf_prefix>_<depth>_<j>.
struct TreeSpec {
  // 1..7 for the catalogue shapes, 0 for a free-form fan-out list.
  int type = 0;
  std::vector<std::size_t> fanouts;
  std::string leaf_prefix = "x";
  // Defaults to <leaf_prefix>_root.
  std::string root_label;
};

// Checks the fan-out list against the shape of `type`. Throws InvalidSpec.
void validate_tree_spec(const TreeSpec& spec);
AbstractionTree gen_tree(const TreeSpec& spec);
std::size_t tree_leaf_count(const TreeSpec& spec);

struct CatalogueRow {
  int type = 0;
  std::vector<std::size_t> fanouts;
  // Published cut count; absent where only a rounded figure is given.
  std::optional<std::uint64_t> cuts;
};
// The published tree-shape catalogue, row by row.
const std::vector<CatalogueRow>& tree_catalogue();

struct TelephonySpec {
  std::size_t num_customers = 100;
  std::size_t num_plans = 128;
  std::size_t num_months = 12;
  // Zip codes customers are spread over; 0 means ceil(num_customers / 50).
  std::size_t num_zips = 0;
  std::uint64_t seed = 42;
  // Shape of the plan tree; its leaf count must equal num_plans. Empty means
  // 2/8/8 for 128 plans and a single level otherwise.
  std::vector<std::size_t> plan_fanouts;
};

struct Instance {
  PolySet polys;
  AbstractionForest forest;
  // One key per polynomial (the group-by value).
  std::vector<std::string> group_keys;
};

// One polynomial per zip: sum over the zip's customers and months of
// duration * price * p<plan> * m<month>. Forest: plan tree, then the Year tree.
Instance gen_telephony(const TelephonySpec& spec);

struct TpchSpec {
  std::size_t num_lineitems = 1000;
  std::size_t num_groups = 10;
  std::size_t modulus = 128;
  std::uint64_t seed = 42;
  // Shape of both trees; leaf count must equal modulus. Empty as for telephony.
  std::vector<std::size_t> fanouts;
};

// Each line item contributes price * s<supplier mod m> * p<part mod m> to the
// polynomial of its group. Forest: suppliers tree, parts tree.
Instance gen_tpch_like(const TpchSpec& spec);
std::string supplier_variable(std::uint64_t key, std::size_t modulus);
std::string part_variable(std::uint64_t key, std::size_t modulus);

struct UppSpec {
  std::vector<std::string> metavars;
  std::size_t n = 1;
  // 1-based positions into metavars, a < b.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

// Leaf i (1-based) of metavariable x.
std::string upp_variable(const std::string& metavar, std::size_t i);
// P = sum over pairs (a,b) and i,j in 1..n of x_a_i * x_b_j with unit
// coefficients, and one depth-1 tree per metavariable. Throws InvalidPair.
Instance gen_upp(const UppSpec& spec);

struct GraphInstance {
  std::size_t num_vertices = 0;
  // 1-based endpoints.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t cover_size = 0;
};

struct VcReduction {
  UppSpec upp;
  std::size_t granularity = 0;
  std::size_t min_size = 0;
  std::size_t max_size = 0;
};

// Flat-abstraction instance whose precise cuts (size in [min_size, max_size],
// exactly `granularity` variables) mirror cover_size-vertex covers. Throws
// InvalidGraph; graphs above 6 vertices need allow_large.
VcReduction vc_reduce(const GraphInstance& graph, bool allow_large = false);

namespace fixtures {

// 220.8 p1 m1 + 240 p1 m3 + ... over plans p1, f1, y1, v and months m1, m3.
PolySet telephony_single();
// The same polynomial plus the business-plan polynomial over b1, b2, e.
PolySet telephony_pair();
// Plans > Business > SB > b1, b2 ; Business > e ; Special > F, Y, v ;
// Standard > p1, p2.
AbstractionTree plans_tree();
// Year > q1..q4 > three months each.
AbstractionTree year_tree();

}  // namespace fixtures

}  // namespace provabs
