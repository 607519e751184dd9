#include "provabs/cli.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "provabs/abstraction.h"
#include "provabs/benchgen.h"
#include "provabs/error.h"
#include "provabs/json_io.h"
#include "provabs/optimizer.h"

namespace provabs {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
}

std::string format_number(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::size_t to_size(const std::string& s) {
  std::size_t v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw InvalidSpec("not a count: '" + s + "'");
  return v;
}

std::vector<std::size_t> parse_counts(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& p : split(s, ',')) out.push_back(to_size(p));
  return out;
}

// "1-2,2-3"
std::vector<std::pair<std::size_t, std::size_t>> parse_pairs(const std::string& s) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& p : split(s, ',')) {
    auto ends = split(p, '-');
    if (ends.size() != 2) throw InvalidSpec("pair '" + p + "' must look like a-b");
    out.emplace_back(to_size(ends[0]), to_size(ends[1]));
  }
  return out;
}

std::string join(const std::vector<std::size_t>& xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + std::to_string(xs[i]);
  return out;
}

json violations_json(const std::vector<ForestViolation>& violations) {
  json out = json::array();
  for (const auto& v : violations) {
    out.push_back({{"kind", std::string(to_string(v.kind))}, {"label", v.label}, {"detail", v.detail}});
  }
  return out;
}

json compat_json(const std::vector<CompatibilityViolation>& violations) {
  json out = json::array();
  for (const auto& v : violations) {
    out.push_back({{"polynomial", v.polynomial}, {"monomial", v.monomial}, {"tree", v.tree}, {"detail", v.detail}});
  }
  return out;
}

struct Options {
  std::string input;
  std::string forest;
  std::string vvs;
  std::string vvs_out;
  std::string valuation;
  std::string output;
  std::string algo = "opt";
  std::size_t bound = 0;
  std::size_t bound_max = 0;
  std::size_t granularity = 0;
  std::uint64_t cap = kDefaultCutCap;
  std::uint64_t seed = 42;
  bool lift = false;
  bool stats = false;

  // generate
  std::size_t customers = 100;
  std::size_t plans = 128;
  std::size_t months = 12;
  std::size_t zips = 0;
  std::string fanouts;
  std::size_t lineitems = 1000;
  std::size_t groups = 10;
  std::size_t modulus = 128;
  int type = 0;
  std::string prefix = "x";
  std::string root;
  std::string metavars;
  std::size_t n = 1;
  std::string pairs;
  std::size_t vertices = 0;
  std::string edges;
  std::size_t cover = 0;
  bool allow_large = false;

  // bench
  std::string family = "telephony";
  std::size_t size = 1000;
  std::string types = "1,2,3,4,5,6,7";
  std::string bounds = "0.5";
  std::string algos = "opt,greedy,brute";
};

// Loads the polynomials and forest and rejects invalid or incompatible pairs.
struct Loaded {
  PolySet polys;
  AbstractionForest forest;
};

std::optional<Loaded> load_checked(const Options& o, std::ostream& err) {
  Loaded l{parse_polyset(read_file(o.input)), parse_forest(read_file(o.forest))};
  auto violations = validate_forest(l.forest, l.polys);
  if (!violations.empty()) {
    err << "invalid forest:\n" << violations_json(violations).dump(2) << "\n";
    return std::nullopt;
  }
  auto compat = check_compatibility(l.polys, l.forest);
  if (!compat.empty()) {
    err << "forest incompatible with the polynomials:\n" << compat_json(compat).dump(2) << "\n";
    return std::nullopt;
  }
  return l;
}

int emit_instance(const Options& o, const Instance& inst, json spec, std::optional<std::uint64_t> seed,
                  std::ostream& out, json extra = json::object()) {
  std::filesystem::create_directories(o.output);
  const std::filesystem::path dir(o.output);
  write_file(dir / "polys.json", serialize_polyset(inst.polys));
  write_file(dir / "forest.json", serialize_forest(inst.forest));
  json manifest = {{"spec", std::move(spec)},
                   {"seed", seed ? json(*seed) : json(nullptr)},
                   {"num_m", inst.polys.num_m()},
                   {"num_v", inst.polys.num_v()},
                   {"group_keys", inst.group_keys}};
  for (auto& [k, v] : extra.items()) manifest[k] = v;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  out << manifest.dump(2) << "\n";
  return kExitOk;
}

int cmd_generate_telephony(const Options& o, std::ostream& out) {
  TelephonySpec spec{o.customers, o.plans, o.months, o.zips, o.seed, parse_counts(o.fanouts)};
  auto inst = gen_telephony(spec);
  json j = {{"generator", "telephony"}, {"customers", spec.num_customers}, {"plans", spec.num_plans},
            {"months", spec.num_months}, {"zips", spec.num_zips}, {"plan_fanouts", spec.plan_fanouts}};
  return emit_instance(o, inst, j, spec.seed, out);
}

int cmd_generate_tpch(const Options& o, std::ostream& out) {
  TpchSpec spec{o.lineitems, o.groups, o.modulus, o.seed, parse_counts(o.fanouts)};
  auto inst = gen_tpch_like(spec);
  json j = {{"generator", "tpch"}, {"lineitems", spec.num_lineitems}, {"groups", spec.num_groups},
            {"modulus", spec.modulus}, {"fanouts", spec.fanouts}};
  return emit_instance(o, inst, j, spec.seed, out);
}

int cmd_generate_tree(const Options& o, std::ostream& out) {
  TreeSpec spec{o.type, parse_counts(o.fanouts), o.prefix, o.root};
  auto tree = gen_tree(spec);
  std::filesystem::create_directories(o.output);
  const std::filesystem::path dir(o.output);
  write_file(dir / "forest.json", serialize_forest(AbstractionForest({tree})));
  json manifest = {{"spec", {{"generator", "tree"}, {"type", spec.type}, {"fanouts", spec.fanouts}}},
                   {"seed", nullptr},
                   {"nodes", tree.size()},
                   {"leaves", tree.leaf_count(tree.root())},
                   {"num_cuts", count_cuts(tree)}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  out << manifest.dump(2) << "\n";
  return kExitOk;
}

int cmd_generate_upp(const Options& o, std::ostream& out) {
  UppSpec spec{split(o.metavars, ','), o.n, parse_pairs(o.pairs)};
  auto inst = gen_upp(spec);
  json j = {{"generator", "upp"}, {"metavars", spec.metavars}, {"n", spec.n}, {"pairs", spec.pairs}};
  return emit_instance(o, inst, j, std::nullopt, out);
}

int cmd_generate_vcreduce(const Options& o, std::ostream& out) {
  GraphInstance g{o.vertices, parse_pairs(o.edges), o.cover};
  auto red = vc_reduce(g, o.allow_large);
  auto inst = gen_upp(red.upp);
  json j = {{"generator", "vcreduce"}, {"vertices", g.num_vertices}, {"edges", g.edges}, {"k", g.cover_size}};
  json extra = {{"n", red.upp.n}, {"granularity", red.granularity}, {"min_size", red.min_size}, {"max_size", red.max_size}};
  return emit_instance(o, inst, j, std::nullopt, out, extra);
}

int cmd_verify_forest(const Options& o, std::ostream& out) {
  auto forest = parse_forest(read_file(o.forest));
  auto violations = o.input.empty() ? validate_forest(forest) : validate_forest(forest, parse_polyset(read_file(o.input)));
  out << json{{"ok", violations.empty()}, {"violations", violations_json(violations)}}.dump(2) << "\n";
  return violations.empty() ? kExitOk : kExitInvalid;
}

int cmd_verify_compat(const Options& o, std::ostream& out) {
  auto polys = parse_polyset(read_file(o.input));
  auto forest = parse_forest(read_file(o.forest));
  auto violations = check_compatibility(polys, forest);
  out << json{{"ok", violations.empty()}, {"violations", compat_json(violations)}}.dump(2) << "\n";
  return violations.empty() ? kExitOk : kExitInvalid;
}

int cmd_verify_vvs(const Options& o, std::ostream& out) {
  auto forest = parse_forest(read_file(o.forest));
  auto vvs = parse_vvs(read_file(o.vvs));
  std::optional<std::string> problem;
  try {
    problem = vvs_problem(forest, vvs);
  } catch (const UnknownLabel& e) {
    problem = e.what();
  }
  json doc = {{"ok", !problem}};
  if (problem) doc["problem"] = *problem;
  out << doc.dump(2) << "\n";
  return problem ? kExitInvalid : kExitOk;
}

int cmd_compress(const Options& o, std::ostream& out, std::ostream& err) {
  auto loaded = load_checked(o, err);
  if (!loaded) return kExitInvalid;
  const auto& polys = loaded->polys;
  const auto forest = clean_forest(loaded->forest, polys);
  CompressionResult result;
  if (o.algo == "opt") {
    if (forest.size() > 1) {
      err << "--algo opt needs a single tree; exact selection over several trees is NP-hard. Use greedy or brute.\n";
      return kExitInvalid;
    }
    result = forest.size() == 1 ? optimal_vvs_single_tree(polys, forest.tree(0), o.bound)
                                : brute_force_vvs(polys, forest, o.bound, o.cap);
  } else if (o.algo == "greedy") {
    result = greedy_vvs(polys, forest, o.bound);
  } else {
    result = brute_force_vvs(polys, forest, o.bound, o.cap);
  }
  out << serialize_result(result, o.stats);
  if (!o.output.empty()) write_file(o.output, serialize_polyset(abstract(polys, forest, result.vvs)));
  if (!o.vvs_out.empty()) write_file(o.vvs_out, serialize_vvs(result.vvs));
  if (result.status == Status::kInfeasible) {
    err << "no cut reaches " << o.bound << " monomials; at most " << result.max_achievable_ml
        << " monomials can be saved (bound >= " << polys.num_m() - result.max_achievable_ml << ")\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  auto polys = parse_polyset(read_file(o.input));
  auto valuation = parse_valuation(read_file(o.valuation));
  if (o.lift) {
    if (o.forest.empty() || o.vvs.empty()) {
      err << "--lift needs --forest and --vvs\n";
      return kExitInvalid;
    }
    // Cuts of the forest as given and of its cleaned form (as written by
    // compress --vvs-out) are both accepted.
    const auto raw = parse_forest(read_file(o.forest));
    const auto vvs = parse_vvs(read_file(o.vvs));
    auto problem_in = [&](const AbstractionForest& f) -> std::optional<std::string> {
      try {
        return vvs_problem(f, vvs);
      } catch (const UnknownLabel& e) {
        return std::string(e.what());
      }
    };
    if (!problem_in(raw)) {
      valuation = lift(valuation, raw, vvs);
    } else {
      const auto cleaned = clean_forest(raw, polys);
      if (auto problem = problem_in(cleaned)) {
        err << "not a cut of the forest: " << *problem << "\n";
        return kExitInvalid;
      }
      valuation = lift(valuation, cleaned, vvs);
    }
  }
  for (double v : evaluate(polys, valuation)) out << format_number(v) << "\n";
  return kExitOk;
}

int cmd_decide(const Options& o, std::ostream& out, std::ostream& err) {
  auto loaded = load_checked(o, err);
  if (!loaded) return kExitInvalid;
  const auto forest = clean_forest(loaded->forest, loaded->polys);
  const std::size_t hi = std::max(o.bound, o.bound_max);
  auto witness = find_precise(loaded->polys, forest, o.bound, hi, o.granularity, o.cap);
  json doc = {{"verdict", witness ? "yes" : "no"}};
  if (witness) doc["witness"] = witness->members;
  out << doc.dump(2) << "\n";
  return witness ? kExitOk : kExitNegative;
}

int cmd_bench(const Options& o, std::ostream& out) {
  std::set<int> types;
  for (auto t : parse_counts(o.types)) types.insert(static_cast<int>(t));
  std::vector<double> fractions;
  for (const auto& f : split(o.bounds, ',')) fractions.push_back(std::stod(f));
  const auto algos = split(o.algos, ',');

  std::ostringstream csv;
  csv << "family,type,fanouts,num_cuts,num_m,num_v,bound,algo,status,ml,vl,out_num_m,out_num_v,node_visits,"
         "table_entries,operations,elapsed_ms\n";
  for (const auto& row : tree_catalogue()) {
    if (!types.contains(row.type)) continue;
    const std::size_t leaves = tree_leaf_count(TreeSpec{row.type, row.fanouts, "x", ""});
    Instance inst;
    if (o.family == "telephony") {
      inst = gen_telephony(TelephonySpec{o.size, leaves, 12, 0, o.seed, row.fanouts});
    } else if (o.family == "tpch") {
      inst = gen_tpch_like(TpchSpec{o.size, std::max<std::size_t>(1, o.size / 100), leaves, o.seed, row.fanouts});
    } else {
      throw InvalidSpec("unknown family '" + o.family + "'");
    }
    const auto& raw_tree = inst.forest.tree(0);
    const AbstractionTree tree = clean_tree(raw_tree, inst.polys);
    const AbstractionForest single({tree});
    const auto& polys = inst.polys;
    for (double fraction : fractions) {
      const auto bound = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(fraction * polys.num_m())), 1,
                                                 polys.num_m());
      for (const auto& algo : algos) {
        csv << o.family << "," << row.type << "," << join(row.fanouts, "x") << "," << count_cuts(raw_tree) << ","
            << polys.num_m() << "," << polys.num_v() << "," << bound << "," << algo << ",";
        std::optional<CompressionResult> r;
        std::string status;
        try {
          if (algo == "opt") {
            r = optimal_vvs_single_tree(polys, tree, bound);
          } else if (algo == "greedy") {
            r = greedy_vvs(polys, single, bound);
          } else if (algo == "brute") {
            r = brute_force_vvs(polys, single, bound, o.cap);
          } else {
            throw InvalidSpec("unknown algorithm '" + algo + "'");
          }
          status = std::string(to_string(r->status));
        } catch (const TooManyCuts&) {
          status = "too-many-cuts";
        }
        csv << status << ",";
        if (r) {
          csv << r->ml << "," << r->vl << "," << r->out_num_m << "," << r->out_num_v << "," << r->stats.node_visits
              << "," << r->stats.table_entries << "," << r->stats.operations() << ",";
          if (o.stats) csv << format_number(r->stats.elapsed_ms);
        } else {
          csv << ",,,,,,,";
        }
        csv << "\n";
      }
    }
  }
  if (o.output.empty()) {
    out << csv.str();
  } else {
    write_file(o.output, csv.str());
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compress polynomial sets under abstraction trees."};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("generate", "Write a generated instance to a directory");
  gen->require_subcommand(1);
  auto* gen_tel = gen->add_subcommand("telephony", "Per-zip revenue polynomials over plans and months");
  auto* gen_tpch = gen->add_subcommand("tpch", "Per-group polynomials over suppliers and parts");
  auto* gen_tree_cmd = gen->add_subcommand("tree", "A single catalogue-shaped tree");
  auto* gen_upp_cmd = gen->add_subcommand("upp", "Uniformly partitioned polynomial with its flat forest");
  auto* gen_vc = gen->add_subcommand("vcreduce", "Instance reduced from a vertex-cover question");
  for (auto* c : {gen_tel, gen_tpch, gen_tree_cmd, gen_upp_cmd, gen_vc}) {
    c->add_option("--output", o.output, "Output directory")->required();
  }
  gen_tel->add_option("--customers", o.customers);
  gen_tel->add_option("--plans", o.plans);
  gen_tel->add_option("--months", o.months);
  gen_tel->add_option("--zips", o.zips, "0: one zip per 50 customers");
  gen_tel->add_option("--seed", o.seed);
  gen_tel->add_option("--plan-fanouts", o.fanouts, "Comma separated, root first");
  gen_tpch->add_option("--lineitems", o.lineitems);
  gen_tpch->add_option("--groups", o.groups);
  gen_tpch->add_option("--modulus", o.modulus);
  gen_tpch->add_option("--seed", o.seed);
  gen_tpch->add_option("--fanouts", o.fanouts);
  gen_tree_cmd->add_option("--type", o.type, "1..7, 0 for free-form");
  gen_tree_cmd->add_option("--fanouts", o.fanouts)->required();
  gen_tree_cmd->add_option("--prefix", o.prefix);
  gen_tree_cmd->add_option("--root", o.root);
  gen_upp_cmd->add_option("--metavars", o.metavars, "Comma separated labels")->required();
  gen_upp_cmd->add_option("--n", o.n);
  gen_upp_cmd->add_option("--pairs", o.pairs, "1-based, e.g. 1-2,2-3")->required();
  gen_vc->add_option("--vertices", o.vertices)->required();
  gen_vc->add_option("--edges", o.edges, "1-based, e.g. 1-2,2-3")->required();
  gen_vc->add_option("--k", o.cover, "Cover size")->required();
  gen_vc->add_flag("--allow-large", o.allow_large, "Permit more than 6 vertices");

  auto* verify = app.add_subcommand("verify", "Check a forest, compatibility or a cut");
  verify->require_subcommand(1);
  auto* ver_forest = verify->add_subcommand("forest", "Duplicate, shared or occurring internal labels");
  ver_forest->add_option("--forest", o.forest)->required();
  ver_forest->add_option("--input", o.input, "Also reject internal labels occurring here");
  auto* ver_compat = verify->add_subcommand("compat", "At most one leaf per tree in each monomial");
  ver_compat->add_option("--input", o.input)->required();
  ver_compat->add_option("--forest", o.forest)->required();
  auto* ver_vvs = verify->add_subcommand("vvs", "Whether a label set is a cut");
  ver_vvs->add_option("--forest", o.forest)->required();
  ver_vvs->add_option("--vvs", o.vvs)->required();

  auto* compress = app.add_subcommand("compress", "Choose a cut meeting a size bound");
  compress->add_option("--input", o.input)->required();
  compress->add_option("--forest", o.forest)->required();
  compress->add_option("--bound", o.bound, "Maximum number of monomials")->required();
  compress->add_option("--algo", o.algo)->check(CLI::IsMember({"opt", "greedy", "brute"}));
  compress->add_option("--cap", o.cap, "Cut limit for brute force");
  compress->add_option("--output", o.output, "Write the compressed polynomials here");
  compress->add_option("--vvs-out", o.vvs_out, "Write the chosen cut here");
  compress->add_flag("--stats", o.stats, "Include elapsed time");

  auto* eval = app.add_subcommand("evaluate", "Evaluate every polynomial under a valuation");
  eval->add_option("--input", o.input)->required();
  eval->add_option("--valuation", o.valuation)->required();
  eval->add_option("--forest", o.forest);
  eval->add_option("--vvs", o.vvs);
  eval->add_flag("--lift", o.lift, "Valuation is over cut members; extend it to the leaves");

  auto* decide = app.add_subcommand("decide", "Is there a cut with exactly this size and granularity?");
  decide->add_option("--input", o.input)->required();
  decide->add_option("--forest", o.forest)->required();
  decide->add_option("--bound", o.bound, "Number of monomials (lower end with --bound-max)")->required();
  decide->add_option("--bound-max", o.bound_max, "Accept any size in [bound, bound-max]");
  decide->add_option("--granularity", o.granularity, "Number of variables")->required();
  decide->add_option("--cap", o.cap);

  auto* bench = app.add_subcommand("bench", "Sweep catalogue trees, bounds and algorithms; CSV out");
  bench->add_option("--family", o.family)->check(CLI::IsMember({"telephony", "tpch"}));
  bench->add_option("--size", o.size, "Customers or line items");
  bench->add_option("--types", o.types);
  bench->add_option("--bounds", o.bounds, "Bounds as fractions of numM");
  bench->add_option("--algos", o.algos);
  bench->add_option("--cap", o.cap);
  bench->add_option("--seed", o.seed);
  bench->add_option("--output", o.output);
  bench->add_flag("--stats", o.stats, "Fill the elapsed_ms column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (gen_tel->parsed()) return cmd_generate_telephony(o, out);
    if (gen_tpch->parsed()) return cmd_generate_tpch(o, out);
    if (gen_tree_cmd->parsed()) return cmd_generate_tree(o, out);
    if (gen_upp_cmd->parsed()) return cmd_generate_upp(o, out);
    if (gen_vc->parsed()) return cmd_generate_vcreduce(o, out);
    if (ver_forest->parsed()) return cmd_verify_forest(o, out);
    if (ver_compat->parsed()) return cmd_verify_compat(o, out);
    if (ver_vvs->parsed()) return cmd_verify_vvs(o, out);
    if (compress->parsed()) return cmd_compress(o, out, err);
    if (eval->parsed()) return cmd_evaluate(o, out, err);
    if (decide->parsed()) return cmd_decide(o, out, err);
    if (bench->parsed()) return cmd_bench(o, out);
  } catch (const TooManyCuts& e) {
    err << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace provabs
