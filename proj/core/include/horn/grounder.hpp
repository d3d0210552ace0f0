#pragma once

#include <horn/instance.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace horn {

// How invented terms are limited and named.
//   Unlimited       - always invent; requires an acyclic theory.
//   ParentDepth(i)  - blocked when any head argument has invented structure
//                     nested i or deeper.
//   GenerationDepth(i) - blocked when any head argument already contains i
//                     layers of terms invented by the same (axiom, variable).
struct SkolemPolicy {
  enum class Variant { Unlimited, ParentDepth, GenerationDepth };
  enum class Naming { Structured, Flat };

  Variant variant = Variant::Unlimited;
  int depth = 1;
  Naming naming = Naming::Structured;

  static SkolemPolicy unlimited(Naming n = Naming::Structured) {
    return {Variant::Unlimited, 1, n};
  }
  static SkolemPolicy parent_depth(int i, Naming n = Naming::Structured) {
    return {Variant::ParentDepth, i, n};
  }
  static SkolemPolicy generation_depth(int i, Naming n = Naming::Structured) {
    return {Variant::GenerationDepth, i, n};
  }
};

// Invent the structured witness s(axiom,"var",head_args...) or report that
// the policy blocks this whole axiom instance (std::nullopt). The arguments
// must be structurally expanded (no flat stand-ins).
std::optional<Term> skolemize(const SkolemPolicy& policy,
                              const std::string& axiom_id,
                              const std::string& var_name,
                              const std::vector<Term>& head_args);

struct MayInferEntry {
  std::string axiom_id;
  Atom head;
  std::vector<Term> existential_binding;
  bool operator==(const MayInferEntry& o) const;
  bool operator<(const MayInferEntry& o) const;
};

struct NeedsEntry {
  Atom head;
  std::string axiom_id;
  Atom body;
  bool operator==(const NeedsEntry& o) const;
  bool operator<(const NeedsEntry& o) const;
};

struct PotentialGraph {
  std::set<Atom> pot;
  std::set<MayInferEntry> may_infer;
  std::set<NeedsEntry> needs;
  long long skolem_count = 0;

  // Flat naming only: the structured term each p<k> stands for.
  std::map<int, Term> flat_expansion;

  // Every distinct invented term in the graph (flat graphs list the flat
  // stand-ins; flat_expansion maps them back).
  std::set<Term> invented_terms;
};

inline constexpr long long kDefaultPotLimit = 1'000'000;

// Least fixpoint of backward matching from the goal atoms. Deterministic.
// Throws CyclicTheory for Unlimited on a cyclic theory and ResourceLimit
// when pot grows past pot_limit.
PotentialGraph ground_potential_graph(const AbductionInstance& instance,
                                      const SkolemPolicy& policy,
                                      long long pot_limit = kDefaultPotLimit);

// Strongly connected components (size > 1, or single predicates with a
// self-loop) of the head -> body predicate dependency graph; sorted.
std::vector<std::vector<std::string>> detect_cycles(
    const AbductionInstance& instance);

struct GroundingStats {
  long long pot_count = 0;
  long long edge_count = 0;
  long long skolem_count = 0;
  long long max_term_depth = 0;
};

GroundingStats grounding_stats(const PotentialGraph& graph);

}  // namespace horn
