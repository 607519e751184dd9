#include "provabs/json_io.h"

#include <cmath>
#include <limits>
#include <memory>
#include <set>
#include <vector>

#include "json.hpp"
#include "provabs/error.h"

namespace provabs {

namespace {

using nlohmann::json;

// Parses with duplicate-key detection; nlohmann otherwise keeps the last value.
json parse_strict(std::string_view text) {
  struct Frame {
    bool array = false;
    std::set<std::string> keys;
    std::string path;
    std::size_t next_index = 0;
  };
  std::vector<Frame> frames;
  std::string pending_key;
  // Path of the value starting now; advances the enclosing array's index.
  auto child_path = [&]() -> std::string {
    if (frames.empty()) return "";
    auto& parent = frames.back();
    if (parent.array) return parent.path + "/" + std::to_string(parent.next_index++);
    return parent.path + "/" + pending_key;
  };
  auto callback = [&](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
      case json::parse_event_t::array_start: {
        auto path = child_path();
        frames.push_back(Frame{event == json::parse_event_t::array_start, {}, std::move(path), 0});
        pending_key.clear();
        break;
      }
      case json::parse_event_t::key: {
        auto key = parsed.get<std::string>();
        if (!frames.back().keys.insert(key).second) {
          throw ParseError(frames.back().path + "/" + key, "repeated key");
        }
        pending_key = key;
        break;
      }
      case json::parse_event_t::object_end:
      case json::parse_event_t::array_end:
        frames.pop_back();
        pending_key.clear();
        break;
      case json::parse_event_t::value:
        // Containers are counted at their start event.
        if (!parsed.is_structured() && !frames.empty() && frames.back().array) ++frames.back().next_index;
        break;
    }
    return true;
  };
  try {
    return json::parse(text.begin(), text.end(), callback);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
}

const json& member(const json& object, const char* key, const std::string& at) {
  auto it = object.find(key);
  if (it == object.end()) throw ParseError(at, std::string("missing key \"") + key + "\"");
  return *it;
}

void only_keys(const json& object, std::initializer_list<const char*> allowed, const std::string& at) {
  for (const auto& [key, _] : object.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError(at + "/" + key, "unexpected key");
  }
}

void expect(bool ok, const std::string& at, const char* what) {
  if (!ok) throw ParseError(at, what);
}

NodeSpec parse_node(const json& node, const std::string& at) {
  expect(node.is_object(), at, "expected a tree node object");
  only_keys(node, {"label", "children"}, at);
  const auto& label = member(node, "label", at);
  expect(label.is_string(), at + "/label", "expected a string");
  NodeSpec spec{label.get<std::string>(), {}};
  if (auto it = node.find("children"); it != node.end()) {
    expect(it->is_array(), at + "/children", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      spec.children.push_back(parse_node((*it)[i], at + "/children/" + std::to_string(i)));
    }
  }
  return spec;
}

json node_json(const NodeSpec& spec) {
  json out = {{"label", spec.label}};
  if (!spec.children.empty()) {
    out["children"] = json::array();
    for (const auto& c : spec.children) out["children"].push_back(node_json(c));
  }
  return out;
}

}  // namespace

PolySet parse_polyset(std::string_view text) {
  const json doc = parse_strict(text);
  if (doc.is_array() && doc.empty()) return PolySet();
  expect(doc.is_object(), "", "expected an object");
  only_keys(doc, {"variables", "polynomials"}, "");

  auto symbols = std::make_shared<SymbolTable>();
  const auto& vars = member(doc, "variables", "");
  expect(vars.is_array(), "/variables", "expected an array");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto at = "/variables/" + std::to_string(i);
    expect(vars[i].is_string(), at, "expected a string");
    const auto name = vars[i].get<std::string>();
    expect(!symbols->find(name), at, "variable declared twice");
    symbols->intern(name);
  }

  const auto& polys = member(doc, "polynomials", "");
  expect(polys.is_array(), "/polynomials", "expected an array");
  std::vector<std::vector<Monomial>> raw(polys.size());
  for (std::size_t p = 0; p < polys.size(); ++p) {
    const auto at = "/polynomials/" + std::to_string(p);
    expect(polys[p].is_object(), at, "expected an object");
    only_keys(polys[p], {"monomials"}, at);
    const auto& monomials = member(polys[p], "monomials", at);
    expect(monomials.is_array(), at + "/monomials", "expected an array");
    for (std::size_t m = 0; m < monomials.size(); ++m) {
      const auto mat = at + "/monomials/" + std::to_string(m);
      const auto& mono = monomials[m];
      expect(mono.is_object(), mat, "expected an object");
      only_keys(mono, {"coef", "vars"}, mat);
      const auto& coef = member(mono, "coef", mat);
      expect(coef.is_number(), mat + "/coef", "expected a number");
      const double c = coef.get<double>();
      expect(std::isfinite(c), mat + "/coef", "coefficient must be finite");
      const auto& vmap = member(mono, "vars", mat);
      expect(vmap.is_object(), mat + "/vars", "expected an object");
      std::vector<Factor> factors;
      for (const auto& [name, exp] : vmap.items()) {
        const auto vat = mat + "/vars/" + name;
        auto id = symbols->find(name);
        expect(id.has_value(), vat, "variable not declared in \"variables\"");
        expect(exp.is_number_integer() && exp.get<std::int64_t>() >= 1, vat, "exponent must be an integer >= 1");
        expect(exp.get<std::int64_t>() <= std::numeric_limits<std::uint32_t>::max(), vat, "exponent too large");
        factors.push_back(Factor{*id, static_cast<std::uint32_t>(exp.get<std::int64_t>())});
      }
      raw[p].push_back(Monomial{c, make_key(std::move(factors))});
    }
  }
  std::vector<Polynomial> out;
  for (auto& r : raw) out.push_back(normalize(std::move(r), *symbols));
  return PolySet(std::move(symbols), std::move(out));
}

std::string serialize_polyset(const PolySet& polys) {
  const auto& symbols = polys.symbols();
  json doc = {{"variables", symbols.names()}, {"polynomials", json::array()}};
  for (const auto& p : polys.polynomials()) {
    json monomials = json::array();
    for (const auto& m : p.monomials()) {
      json vars = json::object();
      for (const auto& f : m.vars) vars[symbols.name(f.var)] = f.exponent;
      monomials.push_back({{"coef", m.coefficient}, {"vars", std::move(vars)}});
    }
    doc["polynomials"].push_back({{"monomials", std::move(monomials)}});
  }
  return doc.dump(2) + "\n";
}

AbstractionForest parse_forest(std::string_view text) {
  const json doc = parse_strict(text);
  expect(doc.is_object(), "", "expected an object");
  only_keys(doc, {"trees"}, "");
  const auto& trees = member(doc, "trees", "");
  expect(trees.is_array(), "/trees", "expected an array");
  std::vector<AbstractionTree> out;
  for (std::size_t t = 0; t < trees.size(); ++t) out.emplace_back(parse_node(trees[t], "/trees/" + std::to_string(t)));
  return AbstractionForest(std::move(out));
}

std::string serialize_forest(const AbstractionForest& forest) {
  json doc = {{"trees", json::array()}};
  for (const auto& t : forest.trees()) doc["trees"].push_back(node_json(t.to_spec()));
  return doc.dump(2) + "\n";
}

Vvs parse_vvs(std::string_view text) {
  const json doc = parse_strict(text);
  expect(doc.is_object(), "", "expected an object");
  only_keys(doc, {"members"}, "");
  const auto& members = member(doc, "members", "");
  expect(members.is_array(), "/members", "expected an array");
  Vvs out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto at = "/members/" + std::to_string(i);
    expect(members[i].is_string(), at, "expected a string");
    expect(out.members.insert(members[i].get<std::string>()).second, at, "member listed twice");
  }
  return out;
}

std::string serialize_vvs(const Vvs& vvs) {
  json doc = {{"members", vvs.members}};
  return doc.dump(2) + "\n";
}

Valuation parse_valuation(std::string_view text) {
  const json doc = parse_strict(text);
  expect(doc.is_object(), "", "expected an object");
  only_keys(doc, {"assignments"}, "");
  const auto& assignments = member(doc, "assignments", "");
  expect(assignments.is_object(), "/assignments", "expected an object");
  Valuation out;
  for (const auto& [name, value] : assignments.items()) {
    expect(value.is_number(), "/assignments/" + name, "expected a number");
    out.assignments[name] = value.get<double>();
  }
  return out;
}

std::string serialize_valuation(const Valuation& valuation) {
  json doc = {{"assignments", valuation.assignments}};
  return doc.dump(2) + "\n";
}

std::string serialize_result(const CompressionResult& result, bool timing) {
  json stats = {
      {"node_visits", result.stats.node_visits},
      {"table_entries", result.stats.table_entries},
      {"combine_ops", result.stats.combine_ops},
      {"monomial_visits", result.stats.monomial_visits},
      {"promotions", result.stats.promotions},
      {"cuts_evaluated", result.stats.cuts_evaluated},
  };
  if (timing) stats["elapsed_ms"] = result.stats.elapsed_ms;
  json doc = {
      {"status", std::string(to_string(result.status))},
      {"vvs", result.vvs.members},
      {"ml", result.ml},
      {"vl", result.vl},
      {"out_num_m", result.out_num_m},
      {"out_num_v", result.out_num_v},
      {"max_achievable_ml", result.max_achievable_ml},
      {"stats", std::move(stats)},
  };
  if (!result.promotions.empty()) doc["promotions"] = result.promotions;
  return doc.dump(2) + "\n";
}

}  // namespace provabs
