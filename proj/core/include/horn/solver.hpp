#pragma once

#include <horn/grounder.hpp>
#include <horn/instance.hpp>
#include <horn/objectives.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace horn {

// Factoring semantics used when searching:
//   Bwda       - every non-inferred atom is a factoring candidate; each
//                unification cluster keeps its smallest atom as the assumed
//                one and factors the rest onto it. Native search mode.
//   BwdgOracle - free choice of factoring targets (assumed or inferred, with
//                the usual order condition); exhaustive reference semantics.
enum class FactoringMode { Bwda, BwdgOracle };

struct SolveOptions {
  FactoringMode factoring_mode = FactoringMode::Bwda;
  bool lazy = true;
  std::optional<long long> bound;  // reject solutions costing more than this
  double time_limit_sec = 0.0;     // 0 = none
};

struct SolveStats {
  long long nodes_explored = 0;
  long long nogoods_learned = 0;
  long long incumbent_updates = 0;
};

enum class SolveStatus { Optimal, Infeasible, TimedOut };

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<Solution> solution;  // best known (TimedOut may lack one)
  SolveStats stats;
};

SolveResult solve(const AbductionInstance& instance, const PotentialGraph& graph,
                  Objective objective, const SolveOptions& options = {});

// Cluster the non-inferred atoms under a transitive eq relation; the
// smallest atom of each cluster is assumed, the others factor onto it.
struct FactoringResult {
  std::map<Atom, Atom> factored;
  std::set<Atom> abduced;
};
FactoringResult canonical_factoring(const std::set<Atom>& true_atoms,
                                    const std::set<Atom>& not_inferred,
                                    const EqRelation& eq);

struct Violation {
  std::string description;
};

// Check the instance's assumption nogoods (over abduced atoms, shared
// variables joined through eq) and unique-slot constraints (over true atoms:
// eq-related keys force eq-related values).
std::vector<Violation> check_global_constraints(const Solution& sol,
                                                const EqRelation& eq,
                                                const AbductionInstance& instance);

// One on-demand constraint: an assignment pattern that must not recur.
struct EqLiteral {
  Term a, b;   // normalized a < b
  bool value;  // the offending decision
};
struct LazyNogood {
  std::vector<EqLiteral> eq_literals;          // transitivity witnesses
  std::vector<std::pair<Atom, Atom>> edge_cycle;  // acyclicity witnesses
};

// Transitivity and acyclicity violations of a complete candidate decision:
// one nogood per decided-false pair that the closure of the decided-true
// pairs forces (a connecting chain of true pairs plus the false pair), and
// one nogood per basic cycle of the edge relation.
std::vector<LazyNogood> find_lazy_violations(
    const std::map<std::pair<Term, Term>, bool>& decided_eq,
    const std::vector<std::pair<Atom, Atom>>& edge_relation);

struct OracleLimits {
  int max_pot = 12;
  int max_eq_terms = 8;
};

struct OracleResult {
  bool feasible = false;
  long long optimal_cost = 0;
  std::vector<Solution> optima;  // deduplicated, sorted by rendering
};

// Exhaustive reference search; guarded by the limits (LimitExceeded).
OracleResult brute_force(const AbductionInstance& instance,
                         const PotentialGraph& graph, Objective objective,
                         FactoringMode mode, const OracleLimits& limits = {});

struct VerifyResult {
  bool valid = false;
  long long cost = 0;
  std::vector<std::string> reasons;
};

// Semantic check of a solution: goals hold, inference instances fit their
// axioms with true bodies, factoring targets are true unifiable non-factored
// atoms, the step relation is acyclic, eq is a sort-respecting equivalence,
// global constraints hold, and the objective value is reproduced.
VerifyResult verify(const AbductionInstance& instance, const Solution& sol,
                    Objective objective);

}  // namespace horn
