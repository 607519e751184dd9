#include "provabs/polynomial.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "provabs/error.h"

namespace provabs {

VarId SymbolTable::intern(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  auto id = static_cast<VarId>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<VarId> SymbolTable::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t MonomialKeyHash::operator()(const MonomialKey& key) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ key.size();
  for (const auto& f : key) {
    std::uint64_t x = (static_cast<std::uint64_t>(f.var) << 32) | f.exponent;
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    h = (h ^ x) * 0x100000001b3ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

MonomialKey make_key(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end());
  MonomialKey key;
  key.reserve(factors.size());
  for (const auto& f : factors) {
    if (!key.empty() && key.back().var == f.var) {
      key.back().exponent += f.exponent;
    } else {
      key.push_back(f);
    }
  }
  return key;
}

namespace {

using NamedKey = std::vector<std::pair<const std::string*, std::uint32_t>>;

NamedKey named_key(const MonomialKey& key, const SymbolTable& symbols) {
  NamedKey out;
  out.reserve(key.size());
  for (const auto& f : key) out.emplace_back(&symbols.name(f.var), f.exponent);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return *a.first < *b.first; });
  return out;
}

bool named_less(const NamedKey& a, const NamedKey& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](const auto& x, const auto& y) {
    if (*x.first != *y.first) return *x.first < *y.first;
    return x.second < y.second;
  });
}

}  // namespace

Polynomial normalize(std::vector<Monomial> raw, const SymbolTable& symbols) {
  std::unordered_map<MonomialKey, std::size_t, MonomialKeyHash> slot;
  std::vector<Monomial> merged;
  merged.reserve(raw.size());
  for (auto& m : raw) {
    if (!std::isfinite(m.coefficient)) {
      throw InvalidCoefficient("non-finite coefficient " + std::to_string(m.coefficient));
    }
    for (const auto& f : m.vars) {
      if (f.exponent == 0) throw InvalidExponent("exponent of '" + symbols.name(f.var) + "' must be >= 1");
    }
    auto key = make_key(std::move(m.vars));
    auto [it, inserted] = slot.try_emplace(key, merged.size());
    if (inserted) {
      merged.push_back(Monomial{m.coefficient, std::move(key)});
    } else {
      merged[it->second].coefficient += m.coefficient;
    }
  }
  std::erase_if(merged, [](const Monomial& m) { return m.coefficient == 0.0; });

  std::vector<NamedKey> names;
  names.reserve(merged.size());
  for (const auto& m : merged) names.push_back(named_key(m.vars, symbols));
  std::vector<std::size_t> order(merged.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return named_less(names[a], names[b]); });

  Polynomial out;
  out.monomials_.reserve(merged.size());
  for (auto i : order) out.monomials_.push_back(std::move(merged[i]));
  return out;
}

PolySet::PolySet() : symbols_(std::make_shared<SymbolTable>()) {}

PolySet::PolySet(std::shared_ptr<const SymbolTable> symbols, std::vector<Polynomial> polys)
    : symbols_(std::move(symbols)), polys_(std::move(polys)) {
  if (!symbols_) symbols_ = std::make_shared<SymbolTable>();
  occurs_.assign(symbols_->size(), false);
  for (const auto& p : polys_) {
    num_m_ += p.num_monomials();
    for (const auto& m : p.monomials()) {
      for (const auto& f : m.vars) {
        if (!occurs_.at(f.var)) {
          occurs_[f.var] = true;
          ++num_v_;
        }
      }
    }
  }
}

std::vector<VarId> PolySet::occurring_variables() const {
  std::vector<VarId> out;
  for (VarId v = 0; v < occurs_.size(); ++v) {
    if (occurs_[v]) out.push_back(v);
  }
  return out;
}

std::size_t num_m(const PolySet& set) {
  std::size_t total = 0;
  for (const auto& p : set.polynomials()) total += p.monomials().size();
  return total;
}

std::size_t num_v(const PolySet& set) {
  std::vector<VarId> vars;
  for (const auto& p : set.polynomials()) {
    for (const auto& m : p.monomials()) {
      for (const auto& f : m.vars) vars.push_back(f.var);
    }
  }
  std::sort(vars.begin(), vars.end());
  return static_cast<std::size_t>(std::unique(vars.begin(), vars.end()) - vars.begin());
}

std::size_t num_v(const Polynomial& poly) {
  std::vector<VarId> vars;
  for (const auto& m : poly.monomials()) {
    for (const auto& f : m.vars) vars.push_back(f.var);
  }
  std::sort(vars.begin(), vars.end());
  return static_cast<std::size_t>(std::unique(vars.begin(), vars.end()) - vars.begin());
}

PolySet make_polyset(const std::vector<std::vector<Term>>& polys) {
  auto symbols = std::make_shared<SymbolTable>();
  std::vector<std::vector<Monomial>> raw(polys.size());
  for (std::size_t i = 0; i < polys.size(); ++i) {
    for (const auto& term : polys[i]) {
      Monomial m{term.coefficient, {}};
      for (const auto& [name, exp] : term.vars) m.vars.push_back(Factor{symbols->intern(name), exp});
      raw[i].push_back(std::move(m));
    }
  }
  std::vector<Polynomial> out;
  out.reserve(raw.size());
  for (auto& r : raw) out.push_back(normalize(std::move(r), *symbols));
  return PolySet(std::move(symbols), std::move(out));
}

double evaluate(const Polynomial& poly, const SymbolTable& symbols, const Valuation& valuation) {
  double total = 0.0;
  for (const auto& m : poly.monomials()) {
    double term = m.coefficient;
    for (const auto& f : m.vars) {
      const auto& name = symbols.name(f.var);
      auto it = valuation.assignments.find(name);
      if (it == valuation.assignments.end()) throw UnboundVariable(name);
      term *= std::pow(it->second, static_cast<double>(f.exponent));
    }
    total += term;
  }
  return total;
}

std::vector<double> evaluate(const PolySet& set, const Valuation& valuation) {
  std::vector<double> out;
  out.reserve(set.size());
  for (const auto& p : set.polynomials()) out.push_back(evaluate(p, set.symbols(), valuation));
  return out;
}

std::string to_string(const Polynomial& poly, const SymbolTable& symbols) {
  std::ostringstream os;
  bool first = true;
  for (const auto& m : poly.monomials()) {
    if (!first) os << " + ";
    first = false;
    os << m.coefficient;
    for (const auto& [name, exp] : named_key(m.vars, symbols)) {
      os << '*' << *name;
      if (exp != 1) os << '^' << exp;
    }
  }
  if (first) os << '0';
  return os.str();
}

}  // namespace provabs
