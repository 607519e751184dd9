#include "provabs/benchgen.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <map>
#include <set>

#include "provabs/error.h"

namespace provabs {

std::uint64_t Rng::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo;
  if (span == std::numeric_limits<std::uint64_t>::max()) return next();
  const std::uint64_t range = span + 1;
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return lo + x % range;
}

double Rng::uniform_real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

Rng Rng::split() { return Rng(next() ^ 0x5851F42D4C957F2DULL); }

namespace {

std::size_t product(const std::vector<std::size_t>& xs) {
  std::size_t p = 1;
  for (auto x : xs) p *= x;
  return p;
}

NodeSpec build_level(const TreeSpec& spec, std::size_t depth, std::vector<std::size_t>& counters,
                     std::size_t& next_leaf) {
  NodeSpec node;
  if (depth == spec.fanouts.size()) {
    node.label = spec.leaf_prefix + std::to_string(next_leaf++);
    return node;
  }
  if (depth == 0) {
    node.label = spec.root_label.empty() ? spec.leaf_prefix + "_root" : spec.root_label;
  } else {
    node.label = spec.leaf_prefix + "_" + std::to_string(depth) + "_" + std::to_string(counters[depth]++);
  }
  for (std::size_t i = 0; i < spec.fanouts[depth]; ++i) {
    node.children.push_back(build_level(spec, depth + 1, counters, next_leaf));
  }
  return node;
}

std::vector<std::size_t> default_fanouts(std::size_t leaves) {
  if (leaves == 128) return {2, 8, 8};
  return {leaves};
}

PolySet build_polyset(std::shared_ptr<SymbolTable> symbols, std::vector<std::vector<Monomial>> raw) {
  std::vector<Polynomial> polys;
  polys.reserve(raw.size());
  for (auto& r : raw) polys.push_back(normalize(std::move(r), *symbols));
  return PolySet(std::move(symbols), std::move(polys));
}

}  // namespace

void validate_tree_spec(const TreeSpec& spec) {
  if (spec.fanouts.empty()) throw InvalidSpec("tree needs at least one level");
  if (std::any_of(spec.fanouts.begin(), spec.fanouts.end(), [](std::size_t f) { return f == 0; })) {
    throw InvalidSpec("fan-out must be positive");
  }
  const auto& f = spec.fanouts;
  auto want = [&](bool ok, const char* shape) {
    if (!ok) throw InvalidSpec("type " + std::to_string(spec.type) + " needs " + shape);
  };
  switch (spec.type) {
    case 0:
      break;
    case 1:
      want(f.size() == 2, "2 levels");
      break;
    case 2:
    case 3:
    case 4: {
      const std::size_t root = std::size_t{1} << (spec.type - 1);
      want(f.size() == 3 && f[0] == root, "3 levels with root fan-out 2, 4 or 8 for types 2, 3, 4");
      break;
    }
    case 5:
      want(f.size() == 4 && f[0] == 2 && f[1] == 2, "4 levels starting 2, 2");
      break;
    case 6:
      want(f.size() == 4 && f[0] == 2 && f[1] == 4, "4 levels starting 2, 4");
      break;
    case 7:
      want(f.size() == 4 && f[0] == 4 && f[1] == 2, "4 levels starting 4, 2");
      break;
    default:
      throw InvalidSpec("tree type must be 0..7");
  }
}

std::size_t tree_leaf_count(const TreeSpec& spec) { return product(spec.fanouts); }

AbstractionTree gen_tree(const TreeSpec& spec) {
  validate_tree_spec(spec);
  std::vector<std::size_t> counters(spec.fanouts.size(), 0);
  std::size_t next_leaf = 0;
  return AbstractionTree(build_level(spec, 0, counters, next_leaf));
}

const std::vector<CatalogueRow>& tree_catalogue() {
  static const std::vector<CatalogueRow> rows = {
      {1, {2, 64}, 5},
      {1, {4, 32}, 17},
      {1, {8, 16}, 257},
      {1, {16, 8}, 65537},
      {1, {32, 4}, 4294967297ULL},
      {1, {64, 2}, std::nullopt},
      {2, {2, 2, 32}, 26},
      {2, {2, 4, 16}, 290},
      {2, {2, 8, 8}, 66050},
      {2, {2, 16, 4}, 4295098370ULL},
      {2, {2, 32, 2}, std::nullopt},
      {3, {4, 2, 16}, 626},
      {3, {4, 4, 8}, 83522},
      {3, {4, 8, 4}, 4362470402ULL},
      {3, {4, 16, 2}, std::nullopt},
      {4, {8, 2, 8}, 390626},
      {4, {8, 4, 4}, 6975757442ULL},
      {4, {8, 8, 2}, std::nullopt},
      {5, {2, 2, 2, 16}, 677},
      {5, {2, 2, 4, 8}, 84101},
      {5, {2, 2, 8, 4}, 4362602501ULL},
      {5, {2, 2, 16, 2}, std::nullopt},
      {6, {2, 4, 2, 8}, 391877},
      {6, {2, 4, 4, 4}, 6975924485ULL},
      {6, {2, 4, 8, 2}, std::nullopt},
      {7, {4, 2, 2, 8}, 456977},
      {7, {4, 2, 4, 4}, 7072810001ULL},
      {7, {4, 2, 8, 2}, std::nullopt},
  };
  return rows;
}

Instance gen_telephony(const TelephonySpec& spec) {
  if (spec.num_customers < 1) throw InvalidSpec("need at least one customer");
  if (spec.num_plans < 1) throw InvalidSpec("need at least one plan");
  if (spec.num_months < 1 || spec.num_months > 12) throw InvalidSpec("months must be 1..12");
  const auto plan_fanouts = spec.plan_fanouts.empty() ? default_fanouts(spec.num_plans) : spec.plan_fanouts;
  if (product(plan_fanouts) != spec.num_plans) throw InvalidSpec("plan tree leaf count differs from num_plans");
  const std::size_t zips = spec.num_zips == 0 ? (spec.num_customers + 49) / 50 : spec.num_zips;

  // Price per plan in cents, 5..50; the table does not depend on the seed.
  Rng price_rng(0x7E1EF0);
  std::vector<std::uint64_t> cents(spec.num_plans);
  for (auto& c : cents) c = price_rng.uniform_int(5, 50);

  Rng rng(spec.seed);
  Rng customer_rng = rng.split();
  Rng call_rng = rng.split();

  auto symbols = std::make_shared<SymbolTable>();
  std::vector<VarId> plan_var(spec.num_plans);
  std::vector<VarId> month_var(spec.num_months);
  for (std::size_t p = 0; p < spec.num_plans; ++p) plan_var[p] = symbols->intern("p" + std::to_string(p));
  for (std::size_t m = 0; m < spec.num_months; ++m) month_var[m] = symbols->intern("m" + std::to_string(m + 1));

  std::map<std::size_t, std::vector<Monomial>> by_zip;
  for (std::size_t c = 0; c < spec.num_customers; ++c) {
    const auto plan = customer_rng.uniform_int(0, spec.num_plans - 1);
    const auto zip = customer_rng.uniform_int(0, zips - 1);
    auto& raw = by_zip[zip];
    for (std::size_t m = 0; m < spec.num_months; ++m) {
      const auto minutes = call_rng.uniform_int(50, 1200);
      const double revenue = static_cast<double>(minutes * cents[plan]) / 100.0;
      raw.push_back(Monomial{revenue, make_key({Factor{plan_var[plan], 1}, Factor{month_var[m], 1}})});
    }
  }

  Instance out;
  std::vector<std::vector<Monomial>> raw;
  for (auto& [zip, monomials] : by_zip) {
    out.group_keys.push_back(std::to_string(10000 + zip));
    raw.push_back(std::move(monomials));
  }
  out.polys = build_polyset(symbols, std::move(raw));

  TreeSpec plans{0, plan_fanouts, "p", "Plans"};
  NodeSpec year{"Year", {}};
  for (std::size_t q = 0; q < 4 && 3 * q < spec.num_months; ++q) {
    NodeSpec quarter{"q" + std::to_string(q + 1), {}};
    for (std::size_t m = 3 * q; m < std::min(3 * q + 3, spec.num_months); ++m) {
      quarter.children.push_back(NodeSpec{"m" + std::to_string(m + 1), {}});
    }
    year.children.push_back(std::move(quarter));
  }
  // The plan tree numbers leaves from 0 to match p0..p(n-1).
  out.forest = AbstractionForest({gen_tree(plans), AbstractionTree(year)});
  return out;
}

std::string supplier_variable(std::uint64_t key, std::size_t modulus) { return "s" + std::to_string(key % modulus); }
std::string part_variable(std::uint64_t key, std::size_t modulus) { return "p" + std::to_string(key % modulus); }

Instance gen_tpch_like(const TpchSpec& spec) {
  if (spec.modulus < 1) throw InvalidSpec("modulus must be positive");
  if (spec.num_groups < 1) throw InvalidSpec("need at least one group");
  const auto fanouts = spec.fanouts.empty() ? default_fanouts(spec.modulus) : spec.fanouts;
  if (product(fanouts) != spec.modulus) throw InvalidSpec("tree leaf count differs from modulus");

  Rng rng(spec.seed);
  auto symbols = std::make_shared<SymbolTable>();
  for (std::size_t i = 0; i < spec.modulus; ++i) symbols->intern("s" + std::to_string(i));
  for (std::size_t i = 0; i < spec.modulus; ++i) symbols->intern("p" + std::to_string(i));

  std::vector<std::vector<Monomial>> raw(spec.num_groups);
  for (std::size_t i = 0; i < spec.num_lineitems; ++i) {
    const auto supplier = rng.uniform_int(1, 10'000);
    const auto part = rng.uniform_int(1, 200'000);
    const auto group = rng.uniform_int(0, spec.num_groups - 1);
    const auto quantity = rng.uniform_int(1, 50);
    const auto price_cents = rng.uniform_int(90'000, 200'000);
    const auto discount = rng.uniform_int(0, 10);
    const double revenue = static_cast<double>(quantity * price_cents * (100 - discount)) / 10'000.0;
    raw[group].push_back(Monomial{revenue, make_key({Factor{*symbols->find(supplier_variable(supplier, spec.modulus)), 1},
                                                      Factor{*symbols->find(part_variable(part, spec.modulus)), 1}})});
  }

  Instance out;
  std::vector<std::vector<Monomial>> kept;
  for (std::size_t g = 0; g < raw.size(); ++g) {
    if (raw[g].empty()) continue;
    out.group_keys.push_back(std::to_string(g));
    kept.push_back(std::move(raw[g]));
  }
  out.polys = build_polyset(symbols, std::move(kept));
  out.forest = AbstractionForest({gen_tree(TreeSpec{0, fanouts, "s", "Suppliers"}), gen_tree(TreeSpec{0, fanouts, "p", "Parts"})});
  return out;
}

std::string upp_variable(const std::string& metavar, std::size_t i) { return metavar + "_" + std::to_string(i); }

Instance gen_upp(const UppSpec& spec) {
  if (spec.n < 1) throw InvalidSpec("blow-up n must be positive");
  std::set<std::string> labels(spec.metavars.begin(), spec.metavars.end());
  if (labels.size() != spec.metavars.size()) throw InvalidSpec("metavariable labels must be distinct");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto [a, b] : spec.pairs) {
    if (a >= b) throw InvalidPair("pair (" + std::to_string(a) + "," + std::to_string(b) + ") needs a < b");
    if (a < 1 || b > spec.metavars.size()) {
      throw InvalidPair("pair (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
    }
    if (!seen.insert({a, b}).second) {
      throw InvalidPair("pair (" + std::to_string(a) + "," + std::to_string(b) + ") repeated");
    }
  }

  auto symbols = std::make_shared<SymbolTable>();
  std::vector<std::vector<VarId>> ids(spec.metavars.size());
  for (std::size_t a = 0; a < spec.metavars.size(); ++a) {
    for (std::size_t i = 1; i <= spec.n; ++i) ids[a].push_back(symbols->intern(upp_variable(spec.metavars[a], i)));
  }
  std::vector<Monomial> raw;
  raw.reserve(spec.pairs.size() * spec.n * spec.n);
  for (auto [a, b] : spec.pairs) {
    for (auto x : ids[a - 1]) {
      for (auto y : ids[b - 1]) raw.push_back(Monomial{1.0, make_key({Factor{x, 1}, Factor{y, 1}})});
    }
  }
  std::vector<AbstractionTree> trees;
  for (std::size_t a = 0; a < spec.metavars.size(); ++a) {
    NodeSpec root{spec.metavars[a], {}};
    for (std::size_t i = 1; i <= spec.n; ++i) root.children.push_back(NodeSpec{upp_variable(spec.metavars[a], i), {}});
    trees.emplace_back(root);
  }
  Instance out;
  out.group_keys = {"P"};
  out.polys = build_polyset(symbols, {std::move(raw)});
  out.forest = AbstractionForest(std::move(trees));
  return out;
}

VcReduction vc_reduce(const GraphInstance& graph, bool allow_large) {
  const auto v = graph.num_vertices;
  if (v < 2) throw InvalidGraph("need at least 2 vertices");
  if (v > 6 && !allow_large) throw InvalidGraph("more than 6 vertices; pass allow_large to override");
  if (graph.edges.empty()) throw InvalidGraph("edge set is empty");
  if (graph.cover_size < 2 || graph.cover_size + 1 > v) {
    throw InvalidGraph("cover size must lie in 2.." + std::to_string(v - 1));
  }
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (auto [a, b] : graph.edges) {
    if (a == b) throw InvalidGraph("self loop at vertex " + std::to_string(a));
    if (a < 1 || b < 1 || a > v || b > v) throw InvalidGraph("edge endpoint out of range");
    edges.insert({std::min(a, b), std::max(a, b)});
  }
  VcReduction out;
  for (std::size_t i = 1; i <= v; ++i) out.upp.metavars.push_back("x" + std::to_string(i));
  out.upp.n = v * v * v;
  out.upp.pairs.assign(edges.begin(), edges.end());
  out.granularity = (v - graph.cover_size) * out.upp.n + graph.cover_size;
  out.min_size = 2;
  out.max_size = v * v * v * v * v;
  return out;
}

namespace fixtures {

PolySet telephony_single() {
  return make_polyset({{
      {220.8, {{"p1", 1}, {"m1", 1}}},
      {240, {{"p1", 1}, {"m3", 1}}},
      {127.4, {{"f1", 1}, {"m1", 1}}},
      {114.45, {{"f1", 1}, {"m3", 1}}},
      {75.9, {{"y1", 1}, {"m1", 1}}},
      {72.5, {{"y1", 1}, {"m3", 1}}},
      {42, {{"v", 1}, {"m1", 1}}},
      {24.2, {{"v", 1}, {"m3", 1}}},
  }});
}

PolySet telephony_pair() {
  return make_polyset({
      {
          {220.8, {{"p1", 1}, {"m1", 1}}},
          {240, {{"p1", 1}, {"m3", 1}}},
          {127.4, {{"f1", 1}, {"m1", 1}}},
          {114.45, {{"f1", 1}, {"m3", 1}}},
          {75.9, {{"y1", 1}, {"m1", 1}}},
          {72.5, {{"y1", 1}, {"m3", 1}}},
          {42, {{"v", 1}, {"m1", 1}}},
          {24.2, {{"v", 1}, {"m3", 1}}},
      },
      {
          {77.9, {{"b1", 1}, {"m1", 1}}},
          {80.5, {{"b1", 1}, {"m3", 1}}},
          {52.2, {{"e", 1}, {"m1", 1}}},
          {56.5, {{"e", 1}, {"m3", 1}}},
          {69.7, {{"b2", 1}, {"m1", 1}}},
          {100.65, {{"b2", 1}, {"m3", 1}}},
      },
  });
}

AbstractionTree plans_tree() {
  auto leaf = [](const char* l) { return NodeSpec{l, {}}; };
  return AbstractionTree(NodeSpec{
      "Plans",
      {
          NodeSpec{"Business", {NodeSpec{"SB", {leaf("b1"), leaf("b2")}}, leaf("e")}},
          NodeSpec{"Special",
                   {NodeSpec{"F", {leaf("f1"), leaf("f2")}}, NodeSpec{"Y", {leaf("y1"), leaf("y2"), leaf("y3")}}, leaf("v")}},
          NodeSpec{"Standard", {leaf("p1"), leaf("p2")}},
      },
  });
}

AbstractionTree year_tree() {
  NodeSpec year{"Year", {}};
  for (int q = 0; q < 4; ++q) {
    NodeSpec quarter{"q" + std::to_string(q + 1), {}};
    for (int m = 3 * q + 1; m <= 3 * q + 3; ++m) quarter.children.push_back(NodeSpec{"m" + std::to_string(m), {}});
    year.children.push_back(std::move(quarter));
  }
  return AbstractionTree(year);
}

}  // namespace fixtures

}  // namespace provabs
