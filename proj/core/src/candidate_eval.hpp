#pragma once

// Internal helpers shared by the search and the exhaustive oracle: candidate
// structures, the pairwise clustering step, objective evaluation over a
// relation view, and the global-constraint checks.

#include <horn/instance.hpp>
#include <horn/objectives.hpp>
#include <horn/solver.hpp>

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace horn::internal {

using RelatedFn = std::function<bool(const Term&, const Term&)>;

// A fixed choice of inference steps; the eq-dependent parts come later.
struct StructureInfo {
  const AbductionInstance* instance = nullptr;
  std::set<Atom> true_atoms;
  std::map<Atom, InferenceChoice> inferred;
  std::map<Atom, std::vector<Atom>> bodies;  // per inferred head, positional
  std::map<Atom, const AxiomSchema*> axiom_of;
  std::set<Atom> fa;  // true atoms not inferred
};

struct FactorOutcome {
  std::vector<std::pair<Atom, Atom>> factor_via;  // (factored, target)
  std::set<Atom> abduced;
};

// The pairwise clustering rules, well defined for any symmetric relation
// view: atoms pair up when all argument positions are related; an atom with
// a smaller cluster mate factors onto the smallest mate that has none.
FactorOutcome cluster_factoring(const std::set<Atom>& fa,
                                const RelatedFn& related);

// Objective value of a candidate; nullopt when the cost recursion of the
// weighted objective is not well founded (possible only with free factoring
// targets).
std::optional<long long> evaluate_candidate(const StructureInfo& s,
                                            const FactorOutcome& f,
                                            Objective objective);

// Global constraints over candidate pieces.
std::vector<Violation> check_constraints_pieces(
    const AbductionInstance& instance, const std::set<Atom>& true_atoms,
    const std::set<Atom>& abduced, const RelatedFn& related);

// Pairs of terms the search must decide: argument pairs of potentially
// unifiable pot-atom pairs, plus pairs joinable through shared nogood
// variables or unique-slot key/value positions.
std::set<std::pair<Term, Term>> eq_decision_scope(
    const AbductionInstance& instance, const std::set<Atom>& pot);

// True when the body->head edges of the chosen inferences are acyclic.
bool inference_edges_acyclic(const StructureInfo& s);

}  // namespace horn::internal
