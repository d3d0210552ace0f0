#pragma once

#include <horn/term.hpp>

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace horn {

enum class ErrorCode {
  SyntaxError,
  SemanticError,
  CyclicTheory,
  ResourceLimit,
  CycleDetected,
  LimitExceeded,
  InvalidArgument,
};

class HornError : public std::runtime_error {
 public:
  HornError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Exact rational weight, normalized with a positive denominator.
struct Rational {
  long long num = 1;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d);
  bool operator==(const Rational&) const = default;
};

// trunc(value * w), computed exactly in integers (value >= 0).
long long scale_trunc(long long value, const Rational& w);

// One argument slot of an axiom atom: a variable or a constant symbol.
struct PatTerm {
  bool is_var = false;
  std::string name;
  bool operator==(const PatTerm&) const = default;
};

struct AtomPattern {
  std::string predicate;
  std::vector<PatTerm> args;
  bool operator==(const AtomPattern&) const = default;
};

struct AxiomSchema {
  std::string id;
  AtomPattern head;
  std::vector<AtomPattern> body;
  std::vector<Rational> weights;  // one per body atom

  // Derived by finalize():
  std::vector<std::string> head_vars;         // distinct, head occurrence order
  std::vector<std::string> existential_vars;  // distinct body-only vars, body order

  // Fills the derived variable lists, applies the default weight (6/5 split
  // evenly over the body) when none was given, and validates that every head
  // variable occurs in the body and the weight count matches the body.
  void finalize();
};

struct NogoodPattern {
  std::vector<AtomPattern> atoms;
  bool operator==(const NogoodPattern&) const = default;
};

struct UniqueSlot {
  std::string predicate;
  std::vector<int> key_positions;
  std::vector<int> value_positions;
  bool operator==(const UniqueSlot&) const = default;
  int arity() const {
    return static_cast<int>(key_positions.size() + value_positions.size());
  }
};

struct AbductionInstance {
  std::vector<AxiomSchema> axioms;
  std::vector<Atom> goal;
  std::map<Atom, long long> initial_costs;  // absent atoms default to 100
  std::set<std::string> sort_names;
  std::vector<NogoodPattern> nogoods;
  std::vector<UniqueSlot> unique_slots;

  long long initial_cost(const Atom& a) const;
  int max_arity() const;
};

inline constexpr long long kDefaultInitialCost = 100;

struct InferenceChoice {
  std::string axiom_id;
  std::vector<Term> skolem_args;  // existential witnesses, declaration order
  bool operator==(const InferenceChoice&) const = default;
};

struct Solution {
  std::string objective;  // informational label ("card", "coh", "wa", or "")
  std::set<Atom> true_atoms;
  std::map<Atom, InferenceChoice> inferred;
  std::map<Atom, Atom> factored;  // factored atom -> factoring target
  std::set<Atom> abduced;
  EqRelation eq;
  long long objective_value = 0;
};

// True when inferred/factored/abduced are pairwise disjoint and their union
// is exactly true_atoms.
bool partition_ok(const Solution& sol);

// Bind an axiom head against a ground atom: constants must match exactly,
// repeated variables must bind consistently.
std::optional<std::map<std::string, Term>> match_head(const AtomPattern& pat,
                                                      const Atom& atom);

// Instantiate a pattern under a binding; every variable must be bound.
Atom substitute(const AtomPattern& pat,
                const std::map<std::string, Term>& binding);

const AxiomSchema* find_axiom(const AbductionInstance& instance,
                              const std::string& id);

// Reconstruct the ground body atoms of one used inference: bind the axiom
// head against the inferred atom and extend the binding with the recorded
// existential witnesses. Throws HornError when the pieces do not fit.
std::vector<Atom> inference_bodies(const AbductionInstance& instance,
                                   const Atom& head,
                                   const InferenceChoice& choice);

}  // namespace horn
