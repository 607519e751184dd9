#pragma once

// JSON documents for polynomial sets, forests, cuts, valuations and results.
// Parsers are strict: unknown or repeated keys, wrong types and undeclared
// variables raise ParseError naming the offending location.

#include <string>
#include <string_view>

#include "provabs/abstraction.h"
#include "provabs/optimizer.h"
#include "provabs/polynomial.h"

namespace provabs {

// {"variables":[...],"polynomials":[{"monomials":[{"coef":c,"vars":{"x":e}}]}]}
// A bare [] is accepted as the empty set.
PolySet parse_polyset(std::string_view text);
std::string serialize_polyset(const PolySet& polys);

// {"trees":[{"label":"...","children":[...]}]}; "children" may be omitted for leaves.
AbstractionForest parse_forest(std::string_view text);
std::string serialize_forest(const AbstractionForest& forest);

// {"members":["...",...]}
Vvs parse_vvs(std::string_view text);
std::string serialize_vvs(const Vvs& vvs);

// {"assignments":{"x":v,...}}
Valuation parse_valuation(std::string_view text);
std::string serialize_valuation(const Valuation& valuation);

// elapsed_ms is emitted only when `timing` is set, keeping output reproducible.
std::string serialize_result(const CompressionResult& result, bool timing);

}  // namespace provabs
