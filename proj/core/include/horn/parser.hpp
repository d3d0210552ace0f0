#pragma once

#include <horn/instance.hpp>

#include <string>

namespace horn {

// Parse the line-based instance format:
//   sortname: s1, ..., sk.
//   axiom [id] [@w=w1,..,wr]: head <- b1, ..., br.
//   goal: a1, ..., am.
//   cost: atom = n.
//   nogood: a1, ..., ak.
//   unique: pred(Key1,..; Val1,..).
// `%` starts a comment. Uppercase-initial identifiers are variables,
// lowercase-initial ones constants. Variables in the goal are materialized
// as fresh constants. Axioms without an explicit id get r1, r2, ... in file
// order. Errors carry line/column positions.
AbductionInstance parse_instance(const std::string& text);

// Render an instance back to the concrete syntax; parsing the result yields
// a structurally equal instance (ids explicit, weights explicit).
std::string render_instance(const AbductionInstance& instance);

// Canonical term / atom readers for the renderings produced by render().
Term parse_term(const std::string& text);
Atom parse_atom(const std::string& text);

// Solution JSON:
// {"objective": "...", "cost": int, "abduced": [...], "inferred":
//  [{"atom":..., "axiom":..., "skolem_args": [...]}], "factored":
//  [{"from":..., "to":...}], "eq_classes": [[...], ...]}
std::string render_solution(const Solution& sol);

// Structural checks only: well-formed JSON, the three parts disjoint, and
// eq classes disjoint. Semantic validity is the verifier's job.
Solution parse_solution(const std::string& json_text);

}  // namespace horn
