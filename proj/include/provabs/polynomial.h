#pragma once

// Provenance polynomials: sums of coefficient-weighted monomials over interned
// variables, and ordered multisets of them.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace provabs {

using VarId = std::uint32_t;

// Bijective name <-> id mapping. Ids are dense and assigned in insertion order.
class SymbolTable {
 public:
  VarId intern(std::string_view name);
  std::optional<VarId> find(std::string_view name) const;
  const std::string& name(VarId id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, VarId> ids_;
};

struct Factor {
  VarId var = 0;
  std::uint32_t exponent = 1;

  friend auto operator<=>(const Factor&, const Factor&) = default;
};

// Variable multiset of a monomial: factors sorted by var id, one per variable.
// This, not the coefficient, is the identity of a monomial.
using MonomialKey = std::vector<Factor>;

struct MonomialKeyHash {
  std::size_t operator()(const MonomialKey& key) const noexcept;
};

struct Monomial {
  double coefficient = 0.0;
  MonomialKey vars;
};

// Sorts factors by id and merges repeated variables by adding exponents.
MonomialKey make_key(std::vector<Factor> factors);

class Polynomial {
 public:
  Polynomial() = default;

  const std::vector<Monomial>& monomials() const { return monomials_; }
  std::size_t num_monomials() const { return monomials_.size(); }
  bool empty() const { return monomials_.empty(); }

 private:
  friend Polynomial normalize(std::vector<Monomial> raw, const SymbolTable& symbols);
  std::vector<Monomial> monomials_;
};

// Merges monomials with equal variable multisets (summing coefficients), drops
// exact zeros and sorts canonically: lexicographic over the (name, exponent)
// pairs of each monomial, pairs sorted by name.
// Throws InvalidCoefficient for non-finite coefficients and InvalidExponent for
// zero exponents.
Polynomial normalize(std::vector<Monomial> raw, const SymbolTable& symbols);

// Ordered multiset of normalized polynomials over one shared symbol table.
// Immutable after construction.
class PolySet {
 public:
  PolySet();
  PolySet(std::shared_ptr<const SymbolTable> symbols, std::vector<Polynomial> polys);

  const SymbolTable& symbols() const { return *symbols_; }
  const std::shared_ptr<const SymbolTable>& symbols_ptr() const { return symbols_; }
  const std::vector<Polynomial>& polynomials() const { return polys_; }
  const Polynomial& operator[](std::size_t i) const { return polys_.at(i); }
  std::size_t size() const { return polys_.size(); }

  // Cached at construction.
  std::size_t num_m() const { return num_m_; }
  std::size_t num_v() const { return num_v_; }

  // Ids of variables occurring in at least one monomial, ascending.
  std::vector<VarId> occurring_variables() const;
  bool occurs(VarId var) const { return var < occurs_.size() && occurs_[var]; }

 private:
  std::shared_ptr<const SymbolTable> symbols_;
  std::vector<Polynomial> polys_;
  std::vector<bool> occurs_;
  std::size_t num_m_ = 0;
  std::size_t num_v_ = 0;
};

// Recomputed from scratch, independent of the cached values.
std::size_t num_m(const PolySet& set);
std::size_t num_v(const PolySet& set);
std::size_t num_v(const Polynomial& poly);

// Human-oriented construction from named variables.
struct Term {
  double coefficient = 0.0;
  std::vector<std::pair<std::string, std::uint32_t>> vars;
};

// Interns every name (in order of first appearance) and normalizes each
// polynomial.
PolySet make_polyset(const std::vector<std::vector<Term>>& polys);

struct Valuation {
  std::map<std::string, double> assignments;
};

// Throws UnboundVariable when a variable of the polynomial has no assignment.
double evaluate(const Polynomial& poly, const SymbolTable& symbols, const Valuation& valuation);
std::vector<double> evaluate(const PolySet& set, const Valuation& valuation);

// "3*p1^2*m1" style rendering, canonical order; for diagnostics and tests.
std::string to_string(const Polynomial& poly, const SymbolTable& symbols);

}  // namespace provabs
